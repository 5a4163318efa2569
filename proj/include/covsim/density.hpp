#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

/// One unnormalized Gaussian bump: mix_weight * exp(-1/2 (q-mean)^T S^-1 (q-mean)).
/// Peak value equals mix_weight at the mean.
struct GaussianComponent {
  Point2 mean;
  double sxx = 1.0, sxy = 0.0, syy = 1.0;  // covariance (m^2), symmetric
  double mix_weight = 1.0;
};

/// Importance function phi(q) over the workspace. Uniform fields evaluate to
/// exactly 1; mixtures add a strictly positive floor so phi > 0 everywhere.
class DensityField {
 public:
  static DensityField uniform() {
    DensityField f;
    f.uniform_ = true;
    return f;
  }

  static DensityField gaussian_mixture(std::vector<GaussianComponent> components,
                                       double floor) {
    if (!(floor > 0.0)) {
      throw std::invalid_argument("density floor must be > 0");
    }
    if (components.empty()) {
      throw std::invalid_argument("gaussian mixture needs at least one component");
    }
    DensityField f;
    f.uniform_ = false;
    f.floor_ = floor;
    f.components_ = std::move(components);
    // Canonical component order so the summation (and therefore the value)
    // is bit-identical regardless of how the mixture was listed.
    std::stable_sort(f.components_.begin(), f.components_.end(),
                     [](const GaussianComponent& a, const GaussianComponent& b) {
                       return std::tie(a.mean.x, a.mean.y, a.sxx, a.sxy, a.syy,
                                       a.mix_weight) <
                              std::tie(b.mean.x, b.mean.y, b.sxx, b.sxy, b.syy,
                                       b.mix_weight);
                     });
    f.inv_.reserve(f.components_.size());
    for (const GaussianComponent& c : f.components_) {
      if (!(c.mix_weight > 0.0)) {
        throw std::invalid_argument("mixture weight must be > 0");
      }
      const double det = c.sxx * c.syy - c.sxy * c.sxy;
      if (!(c.sxx > 0.0) || !(c.syy > 0.0) || !(det > 0.0)) {
        throw std::invalid_argument("covariance must be symmetric positive-definite");
      }
      f.inv_.push_back({c.syy / det, -c.sxy / det, c.sxx / det});
    }
    return f;
  }

  double operator()(Point2 q) const {
    if (uniform_) return 1.0;
    double value = floor_;
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const GaussianComponent& c = components_[k];
      const Inv& m = inv_[k];
      const Point2 d = q - c.mean;
      const double quad = m.ixx * d.x * d.x + 2.0 * m.ixy * d.x * d.y + m.iyy * d.y * d.y;
      value += c.mix_weight * std::exp(-0.5 * quad);
    }
    return value;
  }

  bool is_uniform() const { return uniform_; }
  double floor() const { return floor_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

 private:
  struct Inv {
    double ixx, ixy, iyy;
  };

  bool uniform_ = true;
  double floor_ = 0.0;
  std::vector<GaussianComponent> components_;
  std::vector<Inv> inv_;
};

}  // namespace covsim
