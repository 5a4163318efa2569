#pragma once

#include <random>
#include <vector>

#include "covsim/engine.hpp"
#include "covsim/scenario.hpp"

namespace covsim::test {

inline std::string scenario_dir() { return COVSIM_SCENARIO_DIR; }

inline ScenarioConfig load_bundled(const std::string& name) {
  return load_scenario(scenario_dir() + "/" + name);
}

/// Power-distance argmin over all sites; the independent ownership oracle.
inline int brute_force_owner(Point2 q, const std::vector<WeightedSite>& sites) {
  int best = 0;
  double best_value = norm2(q - sites[0].position) - sites[0].weight;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const double value = norm2(q - sites[i].position) - sites[i].weight;
    if (value < best_value) {
      best_value = value;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Margin between the best and second-best power distance at q.
inline double ownership_margin(Point2 q, const std::vector<WeightedSite>& sites) {
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  for (const WeightedSite& s : sites) {
    const double value = norm2(q - s.position) - s.weight;
    if (value < best) {
      second = best;
      best = value;
    } else if (value < second) {
      second = value;
    }
  }
  return second - best;
}

}  // namespace covsim::test
