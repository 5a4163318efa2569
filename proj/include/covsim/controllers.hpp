#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "covsim/geometry.hpp"

namespace covsim {

enum class ControllerKind { Eac, Atc, Wmtc, Pbc };

inline std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Eac: return "EAC";
    case ControllerKind::Atc: return "ATC";
    case ControllerKind::Wmtc: return "WMTC";
    case ControllerKind::Pbc: return "PBC";
  }
  return "?";
}

inline ControllerKind controller_from_string(const std::string& s) {
  if (s == "EAC") return ControllerKind::Eac;
  if (s == "ATC") return ControllerKind::Atc;
  if (s == "WMTC") return ControllerKind::Wmtc;
  if (s == "PBC") return ControllerKind::Pbc;
  throw std::invalid_argument("unknown controller kind: " + s);
}

/// Shared gains and thresholds. k_w defaults to 0.1 * area(Q) / n when left
/// unset (NaN) so the adaptation speed tracks the environment size.
struct Gains {
  double k_p = 1.0;    // 1/step, position gain
  double k_w = std::numeric_limits<double>::quiet_NaN();  // weight gain
  double k_e = 1.2;    // ATC rate scaling constant
  double atc_gain = 1.0;                // the alpha prefactor in the ATC law
  double pbc_gain = 0.4;                // PBC velocity scale at full battery
  double v_max = 0.4;                   // meters/step speed cap
  double dt = 1.0;                      // steps
  double eps_position = 0.01;           // meters, centroid convergence band
  double delta_energy = 1.0;            // percent, low-battery cutoff
  double w_floor = 0.05;                // weight positivity guard
  double mass_floor = 1e-6;             // stand-in mass for empty cells
  double rate_reset_threshold = 0.2;    // percent/step
  bool two_sided_reset = false;

  void validate() const {
    const double vals[] = {k_p, k_e, atc_gain, pbc_gain, v_max, dt, eps_position,
                           delta_energy, w_floor, mass_floor, rate_reset_threshold};
    for (double v : vals) {
      if (!(v > 0.0)) throw std::invalid_argument("gains must be strictly positive");
    }
    if (!std::isnan(k_w) && !(k_w > 0.0)) {
      throw std::invalid_argument("k_w must be strictly positive");
    }
  }
};

/// Per-step data exchanged with neighbors.
struct NeighborReport {
  int id = -1;
  double weight = 1.0;      // m^2
  double e_init_ref = 100;  // percent
  double e_dot = 1.0;       // percent/step, > 0
};

/// Energy-aware weight adaptation:
///   wdot_i = -(k_w / M_i) * sum_j [ w_i/w_j - (Einit_i/Einit_j) * (Edot_j/Edot_i) ]
/// Balances the weight ratios against capacity and inverse depletion-rate ratios.
inline double eac_weight_delta(const NeighborReport& self,
                               std::span<const NeighborReport> neighbors,
                               double mass, double k_w) {
  if (!(mass > 0.0)) throw std::invalid_argument("eac_weight_delta: mass must be > 0");
  if (!(self.weight > 0.0) || !(self.e_dot > 0.0)) {
    throw std::logic_error("eac_weight_delta: weights and rates must stay positive");
  }
  double sum = 0.0;
  for (const NeighborReport& nb : neighbors) {
    if (!(nb.weight > 0.0) || !(nb.e_dot > 0.0) || !(nb.e_init_ref > 0.0)) {
      throw std::logic_error("eac_weight_delta: invalid neighbor report");
    }
    sum += self.weight / nb.weight -
           (self.e_init_ref / nb.e_init_ref) * (nb.e_dot / self.e_dot);
  }
  return -(k_w / mass) * sum;
}

/// Adaptive-trust baseline with trust inversely proportional to the depletion
/// rate: wdot_i = (a k_w / 2 M_i) * sum_j [ (w_j - w_i) - (e_j - e_i) ],
/// e_i = (k_e / Edot_i)^2.
inline double atc_weight_delta(const NeighborReport& self,
                               std::span<const NeighborReport> neighbors,
                               double mass, double k_w, double k_e, double atc_gain) {
  if (!(mass > 0.0)) throw std::invalid_argument("atc_weight_delta: mass must be > 0");
  if (!(self.e_dot > 0.0)) {
    throw std::logic_error("atc_weight_delta: rates must stay positive");
  }
  const double e_self = (k_e / self.e_dot) * (k_e / self.e_dot);
  double sum = 0.0;
  for (const NeighborReport& nb : neighbors) {
    if (!(nb.e_dot > 0.0)) throw std::logic_error("atc_weight_delta: invalid neighbor report");
    const double e_nb = (k_e / nb.e_dot) * (k_e / nb.e_dot);
    sum += (nb.weight - self.weight) - (e_nb - e_self);
  }
  return (atc_gain * k_w / (2.0 * mass)) * sum;
}

/// Power-balance weight from the current battery fraction, in [-1, 0].
inline double pbc_weight(double e_current, double e_max) {
  return e_current / e_max - 1.0;
}

/// PBC velocity: toward the centroid, magnitude k(E) * min(dist, 1) with the
/// energy-proportional gain k(E) = pbc_gain * E / E_max.
inline Point2 pbc_velocity(Point2 p, Point2 centroid, double e_current, double e_max,
                           double pbc_gain) {
  const Point2 to_c = centroid - p;
  const double dist = norm(to_c);
  if (dist == 0.0) return {0.0, 0.0};
  const double gain = pbc_gain * (e_current / e_max);
  if (dist <= 1.0) return gain * to_c;
  return (gain / dist) * to_c;
}

/// Move-to-centroid step: v = k_p (C - p) clamped to v_max, then the new
/// position is projected back into the domain.
inline Point2 position_step(Point2 p, Point2 centroid, const Gains& gains,
                            const ConvexPolygon& domain) {
  Point2 v = gains.k_p * (centroid - p);
  const double speed = norm(v);
  if (speed > gains.v_max) v = (gains.v_max / speed) * v;
  return domain.clamp_inside(p + gains.dt * v);
}

/// Constant-weight baseline; never adapted.
inline double wmtc_weight() { return 1.0; }

}  // namespace covsim
