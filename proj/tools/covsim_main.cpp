// Command-line front end for the coverage simulator: batch runs, controller
// comparisons, the connectivity sweep, and scenario validation.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covsim/scenario.hpp"
#include "covsim/trace_io.hpp"

namespace {

std::vector<covsim::ControllerKind> parse_controller_list(const std::string& csv) {
  std::vector<covsim::ControllerKind> kinds;
  std::stringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) kinds.push_back(covsim::controller_from_string(token));
  }
  if (kinds.empty()) throw std::invalid_argument("no controllers given");
  return kinds;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) values.push_back(std::stod(token));
  }
  if (values.empty()) throw std::invalid_argument("no radii given");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware coverage simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string controller_override;
  std::string controllers_csv = "EAC,ATC,WMTC,PBC";
  std::string radii_csv;
  bool svg = false;

  CLI::App* run = app.add_subcommand("run", "Run one scenario and emit its trace");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--controller", controller_override, "override the controller (EAC|ATC|WMTC|PBC)");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--svg", svg, "also write partition snapshots");

  CLI::App* compare = app.add_subcommand("compare", "Run several controllers on one scenario");
  compare->add_option("scenario", scenario_path, "scenario file")->required();
  compare->add_option("--controllers", controllers_csv, "comma-separated controller list");
  compare->add_option("--out", out_dir, "output directory for per-controller traces");

  CLI::App* sweep = app.add_subcommand("sweep-connectivity",
                                       "Re-run a scenario with disk graphs of varying radii");
  sweep->add_option("scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--radii", radii_csv, "comma-separated disk radii")->required();

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("scenario", scenario_path, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      covsim::ScenarioConfig config = covsim::load_scenario(scenario_path);
      if (!controller_override.empty()) {
        config.controller = covsim::controller_from_string(controller_override);
      }
      const covsim::SimTrace trace = covsim::run_scenario(config);
      covsim::emit_trace(trace, config, out_dir, svg);
      std::cout << "steps: " << trace.steps_executed()
                << "  termination: " << covsim::to_string(trace.termination)
                << "  final cost: " << trace.final_state.locational_cost << '\n';
      std::cout << "outputs written to " << out_dir << '\n';
    } else if (compare->parsed()) {
      const covsim::ScenarioConfig config = covsim::load_scenario(scenario_path);
      const auto kinds = parse_controller_list(controllers_csv);
      const auto rows = covsim::compare_controllers(config, kinds);
      std::cout << covsim::render_comparison(rows);
      if (!out_dir.empty() && out_dir != "out") {
        for (covsim::ControllerKind kind : kinds) {
          covsim::ScenarioConfig variant = config;
          variant.controller = kind;
          const covsim::SimTrace trace = covsim::run_scenario(variant);
          covsim::emit_trace(trace, variant, out_dir + "/" + covsim::to_string(kind));
        }
      }
    } else if (sweep->parsed()) {
      const covsim::ScenarioConfig config = covsim::load_scenario(scenario_path);
      const auto radii = parse_double_list(radii_csv);
      const auto rows = covsim::sweep_connectivity(config, radii);
      std::cout << covsim::render_sweep(rows);
    } else if (validate->parsed()) {
      const covsim::ScenarioConfig config = covsim::load_scenario(scenario_path);
      std::cout << "ok: " << config.name << " (" << config.robots.size() << " robots, "
                << covsim::to_string(config.controller) << ")\n";
    }
  } catch (const covsim::ScenarioError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
