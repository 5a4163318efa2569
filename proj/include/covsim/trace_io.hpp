#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "covsim/engine.hpp"
#include "covsim/scenario.hpp"

namespace covsim {

/// Shortest round-trip decimal form; locale-free and byte-stable, so traces
/// replay exactly and golden files stay deterministic.
inline std::string fmt_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline void write_trace_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "step,robot,x,y,weight,energy,e_dot,area,mass,dist_to_centroid,w_times_edot\n";
  for (const StepRecord& step : trace.steps) {
    for (std::size_t i = 0; i < step.robots.size(); ++i) {
      const RobotStepRecord& r = step.robots[i];
      out << step.step << ',' << i << ',' << fmt_double(r.position.x) << ','
          << fmt_double(r.position.y) << ',' << fmt_double(r.weight) << ','
          << fmt_double(r.energy) << ',' << fmt_double(r.e_dot) << ','
          << fmt_double(r.area) << ',' << fmt_double(r.mass) << ','
          << fmt_double(r.dist_to_centroid) << ',' << fmt_double(r.w_times_edot) << '\n';
    }
  }
}

inline void write_metrics_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics file: " + path);
  out << "step,locational_cost,convergence_cost\n";
  for (const StepRecord& step : trace.steps) {
    out << step.step << ',' << fmt_double(step.locational_cost) << ','
        << fmt_double(step.convergence_cost) << '\n';
  }
}

inline void write_summary(const SimTrace& trace, const ScenarioConfig& config,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary file: " + path);
  out << "scenario: " << config.name << '\n';
  out << "controller: " << to_string(config.controller) << '\n';
  out << "robots: " << config.robots.size() << '\n';
  out << "steps_executed: " << trace.steps_executed() << '\n';
  out << "termination: " << to_string(trace.termination) << '\n';
  out << "lambda2: " << fmt_double(trace.lambda2) << '\n';
  out << "final_weights:";
  for (double w : trace.final_state.weights) out << ' ' << fmt_double(w);
  out << '\n';
  out << "final_areas:";
  for (double a : trace.final_state.areas) out << ' ' << fmt_double(a);
  out << '\n';
  out << "final_locational_cost: " << fmt_double(trace.final_state.locational_cost) << '\n';
}

/// Static filled-partition snapshot in the style of the coverage figures.
inline void write_partition_svg(const ConvexPolygon& domain,
                                const std::vector<PowerCell>& cells,
                                const std::vector<Point2>& positions,
                                const std::string& path) {
  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                   "#b07aa1", "#edc948", "#76b7b2", "#ff9da7",
                                   "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
  constexpr int kPaletteSize = 12;

  double min_x = domain.vertices()[0].x, max_x = min_x;
  double min_y = domain.vertices()[0].y, max_y = min_y;
  for (const Point2& v : domain.vertices()) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const double span = std::max(max_x - min_x, max_y - min_y);
  const double scale = 600.0 / span;
  const double pad = 20.0;
  auto sx = [&](double x) { return pad + (x - min_x) * scale; };
  auto sy = [&](double y) { return pad + (max_y - y) * scale; };  // flip y for SVG

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write svg file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << (2 * pad + (max_x - min_x) * scale) << "\" height=\""
      << (2 * pad + (max_y - min_y) * scale) << "\">\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].polygon) continue;
    out << "  <polygon points=\"";
    for (const Point2& v : cells[i].polygon->vertices()) {
      out << sx(v.x) << ',' << sy(v.y) << ' ';
    }
    out << "\" fill=\"" << kPalette[i % kPaletteSize]
        << "\" fill-opacity=\"0.45\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  }
  out << "  <polygon points=\"";
  for (const Point2& v : domain.vertices()) out << sx(v.x) << ',' << sy(v.y) << ' ';
  out << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out << "  <circle cx=\"" << sx(positions[i].x) << "\" cy=\"" << sy(positions[i].y)
        << "\" r=\"5\" fill=\"#111\"/>\n";
    out << "  <text x=\"" << sx(positions[i].x) + 8 << "\" y=\"" << sy(positions[i].y) - 8
        << "\" font-size=\"14\" font-family=\"sans-serif\">" << (i + 1) << "</text>\n";
  }
  out << "</svg>\n";
}

inline void write_partition_svg_for_state(const ScenarioConfig& config,
                                          const std::vector<Point2>& positions,
                                          const std::vector<double>& weights,
                                          const std::string& path) {
  std::vector<WeightedSite> sites(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) sites[i] = {positions[i], weights[i]};
  std::vector<PowerCell> cells = compute_power_diagram(sites, config.domain);
  write_partition_svg(config.domain, cells, positions, path);
}

/// Writes trace.csv, metrics.csv, summary.txt and (optionally) initial/final
/// partition snapshots into `out_dir`.
inline void emit_trace(const SimTrace& trace, const ScenarioConfig& config,
                       const std::string& out_dir, bool svg = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_trace_csv(trace, (fs::path(out_dir) / "trace.csv").string());
  write_metrics_csv(trace, (fs::path(out_dir) / "metrics.csv").string());
  write_summary(trace, config, (fs::path(out_dir) / "summary.txt").string());
  if (svg && !trace.steps.empty()) {
    std::vector<Point2> initial;
    std::vector<double> ones(config.robots.size(), 1.0);
    for (const RobotSpec& r : config.robots) initial.push_back(r.position);
    std::ostringstream first_name;
    first_name << "partition_" << std::setw(4) << std::setfill('0') << 0 << ".svg";
    write_partition_svg_for_state(config, initial, ones,
                                  (fs::path(out_dir) / first_name.str()).string());

    const StepRecord& last = trace.steps.back();
    std::vector<Point2> final_positions;
    for (const RobotStepRecord& r : last.robots) final_positions.push_back(r.position);
    std::ostringstream last_name;
    last_name << "partition_" << std::setw(4) << std::setfill('0') << last.step << ".svg";
    write_partition_svg_for_state(config, final_positions, trace.final_state.weights,
                                  (fs::path(out_dir) / last_name.str()).string());
  }
}

struct ComparisonRow {
  ControllerKind controller;
  std::vector<double> final_weights;
  double final_locational_cost = 0.0;
  int steps = 0;
  Termination termination = Termination::StepCap;
};

/// Runs the same scenario (same initial positions) once per controller.
inline std::vector<ComparisonRow> compare_controllers(const ScenarioConfig& config,
                                                      const std::vector<ControllerKind>& kinds) {
  std::vector<ComparisonRow> rows;
  for (ControllerKind kind : kinds) {
    ScenarioConfig variant = config;
    variant.controller = kind;
    const SimTrace trace = run_scenario(variant);
    ComparisonRow row;
    row.controller = kind;
    row.final_weights = trace.final_state.weights;
    row.final_locational_cost = trace.final_state.locational_cost;
    row.steps = trace.steps_executed();
    row.termination = trace.termination;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string render_comparison(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "ctrl" << std::setw(8) << "steps" << std::setw(18)
      << "termination" << std::setw(16) << "final_cost" << "final_weights\n";
  for (const ComparisonRow& row : rows) {
    std::ostringstream weights;
    weights << '{';
    for (std::size_t i = 0; i < row.final_weights.size(); ++i) {
      if (i) weights << ',';
      weights << std::fixed << std::setprecision(3) << row.final_weights[i];
    }
    weights << '}';
    out << std::left << std::setw(8) << to_string(row.controller) << std::setw(8)
        << row.steps << std::setw(18) << to_string(row.termination) << std::setw(16)
        << std::setprecision(6) << std::defaultfloat << row.final_locational_cost
        << weights.str() << '\n';
  }
  return out.str();
}

struct SweepRow {
  double radius = 0.0;
  double lambda2 = 0.0;
  int steps_to_threshold = -1;  // first step with cost < 1% of initial; -1 if never
  int steps_executed = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

/// First step index at which the convergence cost drops below the fraction
/// of its initial (step-0) value; -1 when it never does.
inline int steps_to_convergence_threshold(const SimTrace& trace, double fraction = 0.01) {
  if (trace.steps.empty()) return -1;
  const double initial = trace.steps.front().convergence_cost;
  if (initial <= 0.0) return 0;
  for (const StepRecord& step : trace.steps) {
    if (step.convergence_cost < fraction * initial) return step.step;
  }
  return -1;
}

/// The connectivity study: same scenario re-run with disk graphs of varying
/// radii over the same (frozen) initial positions.
inline std::vector<SweepRow> sweep_connectivity(const ScenarioConfig& config,
                                                const std::vector<double>& radii) {
  std::vector<SweepRow> rows;
  for (double radius : radii) {
    ScenarioConfig variant = config;
    variant.graph.kind = GraphPolicy::Kind::Disk;
    variant.graph.radius = radius;
    variant.graph.recompute_each_step = false;
    const SimTrace trace = run_scenario(variant);  // throws if disconnected
    SweepRow row;
    row.radius = radius;
    row.lambda2 = trace.lambda2;
    row.steps_to_threshold = steps_to_convergence_threshold(trace);
    row.steps_executed = trace.steps_executed();
    row.initial_cost = trace.steps.empty() ? 0.0 : trace.steps.front().convergence_cost;
    row.final_cost = trace.steps.empty() ? 0.0 : trace.steps.back().convergence_cost;
    rows.push_back(row);
  }
  return rows;
}

inline std::string render_sweep(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "radius" << std::setw(12) << "lambda2"
      << std::setw(20) << "steps_to_1pct" << std::setw(10) << "steps" << std::setw(16)
      << "initial_cost" << "final_cost\n";
  for (const SweepRow& row : rows) {
    out << std::left << std::setw(10) << row.radius << std::setw(12)
        << std::setprecision(4) << row.lambda2 << std::setw(20) << row.steps_to_threshold
        << std::setw(10) << row.steps_executed << std::setw(16) << std::setprecision(6)
        << row.initial_cost << row.final_cost << '\n';
  }
  return out.str();
}

}  // namespace covsim
