#pragma once

#include <span>
#include <vector>

#include "covsim/density.hpp"
#include "covsim/geometry.hpp"
#include "covsim/graph.hpp"
#include "covsim/quadrature.hpp"

namespace covsim {

/// Locational cost of a weighted configuration:
///   H = sum_i int_{W_i} 1/2 (||q - p_i||^2 - w_i) phi(q) dq.
/// May be negative once weights grow.
inline double locational_cost(std::span<const PowerCell> cells,
                              std::span<const Point2> positions,
                              std::span<const double> weights,
                              const DensityField& density) {
  double total = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].polygon) continue;
    const Point2 p = positions[i];
    const double w = weights[i];
    total += integrate_over_polygon(*cells[i].polygon, [&](Point2 q) {
      return 0.5 * (norm2(q - p) - w) * density(q);
    });
  }
  return total;
}

/// Graph disagreement of the normalized weight-energy products:
///   sum_i sum_{j in N_i} (c_i - c_j)^2  (each unordered pair counted twice).
inline double convergence_cost(const CommGraph& graph, std::span<const double> c) {
  double total = 0.0;
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (graph.has_edge(i, j)) {
        const double d = c[i] - c[j];
        total += d * d;
      }
    }
  }
  return total;
}

/// The Theorem-1 consensus series w_i * Edot_i; its spread across robots is
/// the primary weight-convergence indicator.
inline std::vector<double> weight_energy_products(std::span<const double> weights,
                                                  std::span<const double> rates) {
  std::vector<double> products(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) products[i] = weights[i] * rates[i];
  return products;
}

}  // namespace covsim
