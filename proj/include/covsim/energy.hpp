#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace covsim {

/// Piecewise-constant depletion coefficients; a segment applies from its
/// from_step (inclusive) until the next segment begins.
struct ScheduleSegment {
  int from_step = 0;
  double alpha = 1.0;  // percent per step, temporal cost (> 0)
  double beta = 0.0;   // percent per meter, mobility cost (>= 0)
};

struct EnergyProfile {
  double e_init = 100.0;  // percent, in (0, 100]
  std::vector<ScheduleSegment> schedule{{0, 1.0, 0.0}};

  void validate() const {
    if (!(e_init > 0.0) || !(e_init <= 100.0)) {
      throw std::invalid_argument("e_init must be in (0, 100]");
    }
    if (schedule.empty() || schedule.front().from_step != 0) {
      throw std::invalid_argument("schedule must start at step 0");
    }
    int prev = -1;
    for (const ScheduleSegment& seg : schedule) {
      if (seg.from_step <= prev) {
        throw std::invalid_argument("schedule from_step must be strictly increasing");
      }
      if (!(seg.alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
      if (!(seg.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
      prev = seg.from_step;
    }
  }

  /// Segment active at `step`; boundaries are inclusive on the left.
  const ScheduleSegment& segment_at(int step) const {
    const ScheduleSegment* active = &schedule.front();
    for (const ScheduleSegment& seg : schedule) {
      if (seg.from_step <= step) active = &seg;
    }
    return *active;
  }
};

struct EnergyState {
  double e_current = 100.0;
  double e_dot_last = 0.0;   // Edot(t), percent/step
  double e_dot_prev = 0.0;   // Edot(t-1)
  double e_init_ref = 100.0; // resettable reference capacity
};

/// Magnitude of the depletion rate: alpha + beta * |speed|.
inline double depletion_rate(double alpha, double beta, double speed) {
  return alpha + beta * std::fabs(speed);
}

/// Advances the battery one interval; clamps at empty and shifts the rate history.
inline EnergyState step_energy(const EnergyState& state, double rate, double dt) {
  EnergyState next = state;
  next.e_current = std::max(0.0, state.e_current - rate * dt);
  next.e_dot_prev = state.e_dot_last;
  next.e_dot_last = rate;
  return next;
}

/// Finite-difference rate from two consecutive energy readings. The model has
/// no re-generation and alpha > 0, so a non-positive estimate is invalid.
inline double estimate_rate_online(double e_prev, double e_now, double dt) {
  const double rate = (e_prev - e_now) / dt;
  if (!(rate > 0.0)) {
    throw std::logic_error("energy rate estimate must be > 0 (no re-generation)");
  }
  return rate;
}

/// Reference reset when the depletion rate shifts by more than `threshold`.
/// The one-sided variant keeps the literal increase-only guard.
inline std::pair<bool, EnergyState> detect_rate_change_and_reset(const EnergyState& state,
                                                                 double threshold,
                                                                 bool two_sided = true) {
  const double diff = state.e_dot_last - state.e_dot_prev;
  const bool changed = two_sided ? std::fabs(diff) > threshold : diff > threshold;
  if (!changed) return {false, state};
  EnergyState next = state;
  next.e_init_ref = state.e_current;
  return {true, next};
}

}  // namespace covsim
