#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covsim/controllers.hpp"
#include "covsim/density.hpp"
#include "covsim/energy.hpp"
#include "covsim/geometry.hpp"
#include "covsim/graph.hpp"
#include "covsim/metrics.hpp"
#include "covsim/quadrature.hpp"

namespace covsim {

struct RobotSpec {
  Point2 position;
  EnergyProfile profile;
};

struct ScenarioConfig {
  std::string name;
  ConvexPolygon domain;
  DensityField density = DensityField::uniform();
  std::vector<RobotSpec> robots;
  GraphPolicy graph;
  ControllerKind controller = ControllerKind::Eac;
  Gains gains;
  int max_steps = 500;
  std::uint64_t seed = 1;
};

/// Online two-point fit of the depletion model from (speed, measured rate)
/// samples. The broadcast value is the robot's operating rate at the
/// commanded speed, alpha_hat + beta_hat * v_max, so a robot that slows down
/// near its goal keeps reporting the rate it pays while working. Exact in
/// noise-free simulation once two distinct speeds have been observed.
struct RateEstimator {
  double v_last = std::numeric_limits<double>::quiet_NaN();
  double r_last = std::numeric_limits<double>::quiet_NaN();
  double v_ref = std::numeric_limits<double>::quiet_NaN();
  double r_ref = std::numeric_limits<double>::quiet_NaN();
  double broadcast = std::numeric_limits<double>::quiet_NaN();

  static constexpr double kSpeedResolution = 1e-3;  // meters/step

  void observe(double speed, double rate, double v_max) {
    if (!std::isnan(v_last) && std::fabs(speed - v_last) >= kSpeedResolution) {
      v_ref = v_last;
      r_ref = r_last;
    }
    v_last = speed;
    r_last = rate;
    double alpha_hat = rate;
    double beta_hat = 0.0;
    if (!std::isnan(v_ref) && std::fabs(v_last - v_ref) >= kSpeedResolution) {
      beta_hat = (r_last - r_ref) / (v_last - v_ref);
      if (beta_hat < 0.0) beta_hat = 0.0;
      alpha_hat = r_last - beta_hat * v_last;
      if (!(alpha_hat > 0.0)) {  // degenerate fit across a schedule change
        alpha_hat = rate;
        beta_hat = 0.0;
      }
    }
    broadcast = alpha_hat + beta_hat * v_max;
  }

  // Called when the rate-change guard trips: the samples belong to the old
  // coefficient regime and must not contaminate the next fit.
  void reset_history() {
    v_last = r_last = v_ref = r_ref = std::numeric_limits<double>::quiet_NaN();
  }
};

struct RobotState {
  int id = 0;
  Point2 position;
  double weight = 1.0;
  EnergyState energy;
  EnergyProfile profile;
  RateEstimator rate_estimator;
};

enum class Termination { AllAtCentroid, EnergyDepleted, StepCap };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::AllAtCentroid: return "all-at-centroid";
    case Termination::EnergyDepleted: return "energy-depleted";
    case Termination::StepCap: return "step-cap";
  }
  return "?";
}

struct RobotStepRecord {
  Point2 position;          // after the move
  double weight = 1.0;      // after the weight update
  double energy = 0.0;      // after depletion
  double e_dot = 0.0;       // rate measured online this step
  double area = 0.0;        // cell of this step's diagram
  double mass = 0.0;
  double dist_to_centroid = 0.0;  // NaN for an empty cell
  double w_times_edot = 0.0;
};

struct StepRecord {
  int step = 0;
  std::vector<RobotStepRecord> robots;
  double locational_cost = 0.0;   // configuration entering the step
  double convergence_cost = 0.0;  // post-update consensus disagreement
};

/// Snapshot of the diagram at the terminal positions and weights.
struct FinalState {
  std::vector<Point2> positions;
  std::vector<double> weights;
  std::vector<double> areas;
  std::vector<double> masses;
  std::vector<double> dist_to_centroid;  // NaN for empty cells
  double locational_cost = 0.0;
};

struct SimTrace {
  std::vector<StepRecord> steps;
  Termination termination = Termination::StepCap;
  double lambda2 = 0.0;
  FinalState final_state;
  int steps_executed() const { return static_cast<int>(steps.size()); }
};

/// Resolves the active schedule segment for `step` onto the robot.
inline const ScheduleSegment& apply_schedule(const RobotState& state, int step) {
  return state.profile.segment_at(step);
}

/// Algorithm-1 exit test against the current partition: low battery first,
/// then every robot with a nonempty cell sitting within eps of its centroid.
/// Run at the top of a round, this is the Lloyd fixed-point test (the robots
/// are at the centroids of the partition their own positions induce).
inline std::optional<Termination> termination_check(std::span<const RobotState> states,
                                                    std::span<const PowerCell> cells,
                                                    const Gains& gains) {
  for (const RobotState& r : states) {
    if (r.energy.e_current < gains.delta_energy) return Termination::EnergyDepleted;
  }
  bool any_cell = false;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!cells[i].centroid) continue;
    any_cell = true;
    if (distance(*cells[i].centroid, states[i].position) > gains.eps_position) {
      return std::nullopt;
    }
  }
  return any_cell ? std::optional<Termination>(Termination::AllAtCentroid) : std::nullopt;
}

inline void validate_config(const ScenarioConfig& config) {
  if (config.robots.empty()) throw ScenarioError("scenario needs at least one robot");
  if (config.max_steps < 0) throw ScenarioError("max_steps must be >= 0");
  config.gains.validate();
  for (std::size_t i = 0; i < config.robots.size(); ++i) {
    config.robots[i].profile.validate();
    if (!config.domain.contains(config.robots[i].position)) {
      throw ScenarioError("robot " + std::to_string(i) + " starts outside the domain");
    }
    for (std::size_t j = i + 1; j < config.robots.size(); ++j) {
      if (distance(config.robots[i].position, config.robots[j].position) < 1e-6) {
        throw ScenarioError("robots " + std::to_string(i) + " and " + std::to_string(j) +
                            " share an initial position");
      }
    }
  }
}

/// Runs the synchronous-round simulation: partition, centroids, position
/// update, energy bookkeeping, neighbor exchange, rate-reset check, weight
/// update, then the termination test. Deterministic for a fixed config.
inline SimTrace run_scenario(const ScenarioConfig& config) {
  validate_config(config);
  const int n = static_cast<int>(config.robots.size());

  Gains gains = config.gains;
  if (std::isnan(gains.k_w)) {
    gains.k_w = 0.1 * config.domain.area() / static_cast<double>(n);
  }

  std::vector<RobotState> states(n);
  std::vector<Point2> initial_positions(n);
  for (int i = 0; i < n; ++i) {
    states[i].id = i;
    states[i].position = config.robots[i].position;
    states[i].weight = 1.0;
    states[i].profile = config.robots[i].profile;
    states[i].energy.e_current = states[i].profile.e_init;
    states[i].energy.e_init_ref = states[i].profile.e_init;
    initial_positions[i] = states[i].position;
    // Pre-mission idle calibration: a parked robot reads its temporal cost
    // before moving, which anchors the two-point rate fit from step 0.
    states[i].rate_estimator.observe(0.0, states[i].profile.segment_at(0).alpha,
                                     config.gains.v_max);
  }

  CommGraph graph = build_graph(initial_positions, config.graph);

  SimTrace trace;
  trace.lambda2 = algebraic_connectivity(graph);

  std::vector<WeightedSite> sites(n);
  std::vector<Point2> prev_positions(n);
  std::vector<double> prev_weights(n);
  std::vector<double> measured(n, 0.0);
  std::vector<NeighborReport> reports(n);
  std::vector<PowerCell> cells;

  int step = 0;
  std::optional<Termination> fired;
  while (true) {
    if (config.graph.kind == GraphPolicy::Kind::Disk && config.graph.recompute_each_step &&
        step > 0) {
      std::vector<Point2> current(n);
      for (int i = 0; i < n; ++i) current[i] = states[i].position;
      graph = disk_graph(current, config.graph.radius);
    }

    for (int i = 0; i < n; ++i) {
      prev_positions[i] = states[i].position;
      prev_weights[i] = states[i].weight;
      sites[i] = {states[i].position, states[i].weight};
    }
    cells = compute_power_diagram(sites, config.domain);
    attach_moments(cells, config.density);

    fired = termination_check(states, cells, gains);
    if (fired || step >= config.max_steps) break;

    const double pre_cost =
        locational_cost(cells, prev_positions, prev_weights, config.density);

    // Position update; empty-cell robots hold this round.
    for (int i = 0; i < n; ++i) {
      RobotState& r = states[i];
      if (!cells[i].centroid) continue;
      const Point2 c = *cells[i].centroid;
      if (config.controller == ControllerKind::Pbc) {
        const Point2 v =
            pbc_velocity(r.position, c, r.energy.e_current, r.profile.e_init, gains.pbc_gain);
        r.position = config.domain.clamp_inside(r.position + gains.dt * v);
      } else {
        r.position = position_step(r.position, c, gains, config.domain);
      }
    }

    // Energy depletion under the active schedule, measured back online.
    for (int i = 0; i < n; ++i) {
      RobotState& r = states[i];
      const ScheduleSegment& seg = apply_schedule(r, step);
      const double speed = distance(r.position, prev_positions[i]) / gains.dt;
      const double rate = depletion_rate(seg.alpha, seg.beta, speed);
      const double e_before = r.energy.e_current;
      r.energy = step_energy(r.energy, rate, gains.dt);
      if (step == 0) r.energy.e_dot_prev = r.energy.e_dot_last;
      measured[i] = estimate_rate_online(e_before, r.energy.e_current, gains.dt);
      // No reset on a drained battery: the run is about to stop and a zero
      // reference would poison the consensus values.
      if (step > 0 && r.energy.e_current > 0.0) {
        auto [changed, next] = detect_rate_change_and_reset(
            r.energy, gains.rate_reset_threshold, gains.two_sided_reset);
        if (changed) {
          r.energy = next;
          r.rate_estimator.reset_history();
        }
      }
      r.rate_estimator.observe(speed, measured[i], gains.v_max);
    }

    // Synchronous neighbor exchange: every weight update reads this snapshot.
    for (int i = 0; i < n; ++i) {
      reports[i] = {i, states[i].weight, states[i].energy.e_init_ref,
                    states[i].rate_estimator.broadcast};
    }
    for (int i = 0; i < n; ++i) {
      RobotState& r = states[i];
      const double mass = std::max(cells[i].mass, gains.mass_floor);
      switch (config.controller) {
        case ControllerKind::Eac: {
          std::vector<NeighborReport> nbs;
          for (int j : graph.neighbors(i)) nbs.push_back(reports[j]);
          const double wdot = eac_weight_delta(reports[i], nbs, mass, gains.k_w);
          r.weight = std::max(r.weight + wdot * gains.dt, gains.w_floor);
          break;
        }
        case ControllerKind::Atc: {
          std::vector<NeighborReport> nbs;
          for (int j : graph.neighbors(i)) nbs.push_back(reports[j]);
          const double wdot =
              atc_weight_delta(reports[i], nbs, mass, gains.k_w, gains.k_e, gains.atc_gain);
          r.weight = r.weight + wdot * gains.dt;
          break;
        }
        case ControllerKind::Wmtc:
          break;
        case ControllerKind::Pbc:
          r.weight = pbc_weight(r.energy.e_current, r.profile.e_init);
          break;
      }
    }

    StepRecord record;
    record.step = step;
    record.robots.resize(n);
    std::vector<double> c_values(n);
    for (int i = 0; i < n; ++i) {
      RobotStepRecord& row = record.robots[i];
      row.position = states[i].position;
      row.weight = states[i].weight;
      row.energy = states[i].energy.e_current;
      row.e_dot = states[i].rate_estimator.broadcast;
      row.area = cells[i].area;
      row.mass = cells[i].mass;
      // Distance from the position the partition was computed at to its
      // centroid: the quantity the fixed-point test watches.
      row.dist_to_centroid = cells[i].centroid
                                 ? distance(*cells[i].centroid, prev_positions[i])
                                 : std::numeric_limits<double>::quiet_NaN();
      row.w_times_edot = states[i].weight * states[i].rate_estimator.broadcast;
      c_values[i] = row.w_times_edot / states[i].energy.e_init_ref;
    }
    record.locational_cost = pre_cost;
    record.convergence_cost = convergence_cost(graph, c_values);
    trace.steps.push_back(std::move(record));
    ++step;
  }

  trace.termination = fired.value_or(Termination::StepCap);

  // `cells` holds the diagram of the terminal configuration.
  trace.final_state.positions.resize(n);
  trace.final_state.weights.resize(n);
  trace.final_state.areas.resize(n);
  trace.final_state.masses.resize(n);
  trace.final_state.dist_to_centroid.resize(n);
  for (int i = 0; i < n; ++i) {
    trace.final_state.positions[i] = states[i].position;
    trace.final_state.weights[i] = states[i].weight;
    trace.final_state.areas[i] = cells[i].area;
    trace.final_state.masses[i] = cells[i].mass;
    trace.final_state.dist_to_centroid[i] =
        cells[i].centroid ? distance(*cells[i].centroid, states[i].position)
                          : std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<Point2> final_positions(trace.final_state.positions);
  trace.final_state.locational_cost =
      locational_cost(cells, final_positions, trace.final_state.weights, config.density);
  return trace;
}

}  // namespace covsim
