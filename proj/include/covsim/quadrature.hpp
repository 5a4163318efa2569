#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "covsim/density.hpp"
#include "covsim/geometry.hpp"

namespace covsim {

namespace detail {

struct Gl16 {
  std::array<double, 16> nodes;    // on [0,1]
  std::array<double, 16> weights;  // sum to 1
};

// Gauss-Legendre nodes by Newton iteration on P16; deterministic to the last bit.
inline Gl16 make_gl16() {
  constexpr int n = 16;
  Gl16 rule{};
  for (int k = 0; k < n; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - k] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - k] = 0.5 * w;
  }
  return rule;
}

inline const Gl16& gl16() {
  static const Gl16 rule = make_gl16();
  return rule;
}

}  // namespace detail

/// Integrates f over a convex polygon with a fan triangulation and a 16x16
/// tensor Gauss-Legendre rule per triangle (Duffy map). Exact for polynomial
/// integrands well past the moment/cost degrees used here.
template <class F>
double integrate_over_polygon(const ConvexPolygon& poly, F&& f) {
  const auto& rule = detail::gl16();
  const auto& vs = poly.vertices();
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < vs.size(); ++k) {
    const Point2 a = vs[0];
    const Point2 b = vs[k];
    const Point2 c = vs[k + 1];
    const double jac = cross(b - a, c - a);  // = 2 * triangle area
    if (jac <= 0.0) continue;                // collinear sliver
    double tri = 0.0;
    for (int iu = 0; iu < 16; ++iu) {
      const double u = rule.nodes[iu];
      const Point2 base = a + u * (b - a);
      const Point2 edge = u * (c - b);
      double row = 0.0;
      for (int iv = 0; iv < 16; ++iv) {
        const Point2 q = base + rule.nodes[iv] * edge;
        row += rule.weights[iv] * f(q);
      }
      tri += rule.weights[iu] * row * u;
    }
    total += tri * jac;
  }
  return total;
}

struct CellMoments {
  double mass = 0.0;
  std::optional<Point2> centroid;  // empty for empty cells
};

/// Density-weighted mass and centroid of a cell: M = int phi, C = int q phi / M.
inline CellMoments cell_moments(const std::optional<ConvexPolygon>& cell,
                                const DensityField& density) {
  if (!cell) return {};
  const double mass = integrate_over_polygon(*cell, density);
  const double mx = integrate_over_polygon(*cell, [&](Point2 q) { return q.x * density(q); });
  const double my = integrate_over_polygon(*cell, [&](Point2 q) { return q.y * density(q); });
  CellMoments m;
  m.mass = mass;
  m.centroid = Point2{mx / mass, my / mass};
  return m;
}

/// Fills mass/centroid for every cell of a diagram in place.
inline void attach_moments(std::vector<PowerCell>& cells, const DensityField& density) {
  for (PowerCell& cell : cells) {
    const CellMoments m = cell_moments(cell.polygon, density);
    cell.mass = m.mass;
    cell.centroid = m.centroid;
  }
}

}  // namespace covsim
