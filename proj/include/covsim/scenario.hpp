#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covsim/engine.hpp"

namespace covsim {

namespace detail {

using json = nlohmann::json;

/// Best-effort line lookup for a key token, so semantic errors can point at
/// the offending line of the source document.
inline std::string line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find(needle) != std::string::npos) {
      return " (line " + std::to_string(number) + ")";
    }
  }
  return "";
}

class ScenarioReader {
 public:
  ScenarioReader(const std::string& text, const std::string& source)
      : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& path, const std::string& key,
                         const std::string& message) const {
    std::string where = path.empty() ? key : path + "." + key;
    throw ScenarioError(source_ + ": " + where + ": " + message + line_of_key(text_, key));
  }

  void require_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) const {
    for (const auto& item : obj.items()) {
      bool ok = false;
      for (const char* k : allowed) {
        if (item.key() == k) {
          ok = true;
          break;
        }
      }
      if (!ok) fail(path, item.key(), "unknown key");
    }
  }

  double number(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.contains(key)) fail(path, key, "missing required field");
    if (!obj[key].is_number()) fail(path, key, "expected a number");
    return obj[key].get<double>();
  }

  double number_or(const json& obj, const std::string& path, const std::string& key,
                   double fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path, key, "expected a number");
    return obj[key].get<double>();
  }

  Point2 point(const json& value, const std::string& path, const std::string& key) const {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
        !value[1].is_number()) {
      fail(path, key, "expected a [x, y] pair");
    }
    return {value[0].get<double>(), value[1].get<double>()};
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::string source_;
};

inline ConvexPolygon parse_domain(const ScenarioReader& r, const json& obj) {
  r.require_keys(obj, "domain", {"rect", "vertices"});
  try {
    if (obj.contains("rect")) {
      const json& rect = obj["rect"];
      if (!rect.is_array() || rect.size() != 4) {
        r.fail("domain", "rect", "expected [x0, y0, x1, y1]");
      }
      return ConvexPolygon::rectangle(rect[0].get<double>(), rect[1].get<double>(),
                                      rect[2].get<double>(), rect[3].get<double>());
    }
    if (obj.contains("vertices")) {
      std::vector<Point2> verts;
      for (const json& v : obj["vertices"]) {
        verts.push_back(r.point(v, "domain", "vertices"));
      }
      return ConvexPolygon::from_vertices(std::move(verts));
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("domain: ") + e.what());
  }
  throw ScenarioError("domain: missing required field rect or vertices");
}

inline DensityField parse_density(const ScenarioReader& r, const json& obj) {
  r.require_keys(obj, "density", {"kind", "floor", "components"});
  if (!obj.contains("kind")) r.fail("density", "kind", "missing required field");
  const std::string kind = obj["kind"].get<std::string>();
  if (kind == "uniform") return DensityField::uniform();
  if (kind != "gaussian-mixture") {
    r.fail("density", "kind", "must be uniform or gaussian-mixture");
  }
  const double floor = r.number_or(obj, "density", "floor", 0.01);
  std::vector<GaussianComponent> components;
  if (!obj.contains("components")) r.fail("density", "components", "missing required field");
  for (const json& comp : obj["components"]) {
    r.require_keys(comp, "density.components", {"mean", "cov", "weight"});
    GaussianComponent g;
    if (!comp.contains("mean")) r.fail("density.components", "mean", "missing required field");
    g.mean = r.point(comp["mean"], "density.components", "mean");
    if (!comp.contains("cov")) r.fail("density.components", "cov", "missing required field");
    const json& cov = comp["cov"];
    if (cov.is_array() && cov.size() == 2 && cov[0].is_array() && cov[0].size() == 2 &&
        cov[1].is_array() && cov[1].size() == 2) {
      g.sxx = cov[0][0].get<double>();
      g.sxy = cov[0][1].get<double>();
      g.syy = cov[1][1].get<double>();
      if (cov[1][0].get<double>() != g.sxy) {
        r.fail("density.components", "cov", "covariance must be symmetric");
      }
    } else if (cov.is_number()) {
      g.sxx = g.syy = cov.get<double>();  // isotropic shorthand: sigma^2 * I
      g.sxy = 0.0;
    } else {
      r.fail("density.components", "cov", "expected 2x2 matrix or isotropic scalar");
    }
    g.mix_weight = r.number_or(comp, "density.components", "weight", 1.0);
    components.push_back(g);
  }
  try {
    return DensityField::gaussian_mixture(std::move(components), floor);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("density: ") + e.what());
  }
}

inline EnergyProfile parse_profile(const ScenarioReader& r, const json& obj,
                                   const std::string& path) {
  EnergyProfile profile;
  profile.e_init = r.number_or(obj, path, "e_init", 100.0);
  profile.schedule.clear();
  if (obj.contains("schedule")) {
    for (const json& seg : obj["schedule"]) {
      r.require_keys(seg, path + ".schedule", {"from_step", "alpha", "beta"});
      ScheduleSegment s;
      s.from_step = static_cast<int>(r.number(seg, path + ".schedule", "from_step"));
      s.alpha = r.number(seg, path + ".schedule", "alpha");
      s.beta = r.number(seg, path + ".schedule", "beta");
      profile.schedule.push_back(s);
    }
  } else {
    ScheduleSegment s;
    s.from_step = 0;
    s.alpha = r.number_or(obj, path, "alpha", 1.0);
    s.beta = r.number_or(obj, path, "beta", 0.0);
    profile.schedule.push_back(s);
  }
  try {
    profile.validate();
  } catch (const std::invalid_argument& e) {
    std::string key = std::string(e.what()).find("alpha") != std::string::npos ? "alpha"
                      : std::string(e.what()).find("beta") != std::string::npos ? "beta"
                      : std::string(e.what()).find("e_init") != std::string::npos
                          ? "e_init"
                          : "schedule";
    r.fail(path, key, e.what());
  }
  return profile;
}

inline std::vector<RobotSpec> parse_robots(const ScenarioReader& r, const json& value,
                                           const ConvexPolygon& domain, std::uint64_t seed) {
  std::vector<RobotSpec> robots;
  if (value.is_array()) {
    if (value.empty()) throw ScenarioError("robots: list must not be empty");
    int index = 0;
    for (const json& entry : value) {
      const std::string path = "robots[" + std::to_string(index) + "]";
      r.require_keys(entry, path, {"position", "e_init", "alpha", "beta", "schedule"});
      RobotSpec spec;
      if (!entry.contains("position")) r.fail(path, "position", "missing required field");
      spec.position = r.point(entry["position"], path, "position");
      spec.profile = parse_profile(r, entry, path);
      robots.push_back(std::move(spec));
      ++index;
    }
    return robots;
  }
  if (value.is_object() && value.contains("random")) {
    r.require_keys(value, "robots", {"random"});
    const json& rnd = value["random"];
    r.require_keys(rnd, "robots.random",
                   {"count", "e_init", "alpha_range", "beta_range", "margin"});
    const int count = static_cast<int>(r.number(rnd, "robots.random", "count"));
    if (count < 1) r.fail("robots.random", "count", "must be >= 1");
    const double e_init = r.number_or(rnd, "robots.random", "e_init", 100.0);
    auto range = [&](const char* key, double lo_default, double hi_default) {
      if (!rnd.contains(key)) return std::pair<double, double>{lo_default, hi_default};
      const json& arr = rnd[key];
      if (!arr.is_array() || arr.size() != 2) {
        r.fail("robots.random", key, "expected [lo, hi]");
      }
      return std::pair<double, double>{arr[0].get<double>(), arr[1].get<double>()};
    };
    const auto [alo, ahi] = range("alpha_range", 1.0, 1.0);
    const auto [blo, bhi] = range("beta_range", 0.0, 0.0);
    const double margin = r.number_or(rnd, "robots.random", "margin", 1.0);

    // Deterministic placement: rejection-sample inside the domain.
    std::mt19937_64 rng(seed);
    double min_x = domain.vertices()[0].x, max_x = min_x;
    double min_y = domain.vertices()[0].y, max_y = min_y;
    for (const Point2& v : domain.vertices()) {
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
    std::uniform_real_distribution<double> ux(min_x + margin, max_x - margin);
    std::uniform_real_distribution<double> uy(min_y + margin, max_y - margin);
    std::uniform_real_distribution<double> ua(alo, ahi);
    std::uniform_real_distribution<double> ub(blo, bhi);
    while (static_cast<int>(robots.size()) < count) {
      const Point2 p{ux(rng), uy(rng)};
      if (!domain.contains(p)) continue;
      bool clash = false;
      for (const RobotSpec& other : robots) {
        if (distance(other.position, p) < 1e-3) clash = true;
      }
      if (clash) continue;
      RobotSpec spec;
      spec.position = p;
      spec.profile.e_init = e_init;
      spec.profile.schedule = {{0, ua(rng), ub(rng)}};
      spec.profile.validate();
      robots.push_back(std::move(spec));
    }
    return robots;
  }
  throw ScenarioError("robots: expected a list of robots or a random block");
}

inline GraphPolicy parse_graph(const ScenarioReader& r, const json& obj) {
  r.require_keys(obj, "graph", {"policy", "radius", "frozen"});
  GraphPolicy policy;
  if (!obj.contains("policy")) r.fail("graph", "policy", "missing required field");
  const std::string kind = obj["policy"].get<std::string>();
  if (kind == "complete") {
    policy.kind = GraphPolicy::Kind::Complete;
  } else if (kind == "disk") {
    policy.kind = GraphPolicy::Kind::Disk;
    policy.radius = r.number(obj, "graph", "radius");
    if (!(policy.radius > 0.0)) r.fail("graph", "radius", "must be > 0");
  } else {
    r.fail("graph", "policy", "must be complete or disk");
  }
  if (obj.contains("frozen")) {
    policy.recompute_each_step = !obj["frozen"].get<bool>();
  }
  return policy;
}

inline Gains parse_gains(const ScenarioReader& r, const json& obj) {
  r.require_keys(obj, "gains",
                 {"k_p", "k_w", "k_e", "atc_gain", "pbc_gain", "v_max", "dt",
                  "eps_position", "delta_energy", "w_floor", "mass_floor",
                  "rate_reset_threshold", "rate_reset_two_sided"});
  Gains g;
  g.k_p = r.number_or(obj, "gains", "k_p", g.k_p);
  g.k_w = r.number_or(obj, "gains", "k_w", g.k_w);
  g.k_e = r.number_or(obj, "gains", "k_e", g.k_e);
  g.atc_gain = r.number_or(obj, "gains", "atc_gain", g.atc_gain);
  g.pbc_gain = r.number_or(obj, "gains", "pbc_gain", g.pbc_gain);
  g.v_max = r.number_or(obj, "gains", "v_max", g.v_max);
  g.dt = r.number_or(obj, "gains", "dt", g.dt);
  g.eps_position = r.number_or(obj, "gains", "eps_position", g.eps_position);
  g.delta_energy = r.number_or(obj, "gains", "delta_energy", g.delta_energy);
  g.w_floor = r.number_or(obj, "gains", "w_floor", g.w_floor);
  g.mass_floor = r.number_or(obj, "gains", "mass_floor", g.mass_floor);
  g.rate_reset_threshold =
      r.number_or(obj, "gains", "rate_reset_threshold", g.rate_reset_threshold);
  if (obj.contains("rate_reset_two_sided")) {
    g.two_sided_reset = obj["rate_reset_two_sided"].get<bool>();
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("gains: ") + e.what());
  }
  return g;
}

}  // namespace detail

/// Parses a scenario document. Every error names the offending key (and the
/// source line where it can be located). Defaults are applied here so the
/// returned config is fully resolved.
inline ScenarioConfig parse_scenario(const std::string& text,
                                     const std::string& source = "scenario") {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  detail::ScenarioReader reader(text, source);
  reader.require_keys(doc, "",
                      {"name", "domain", "density", "robots", "graph", "controller",
                       "gains", "run"});

  ScenarioConfig config;
  config.name = doc.contains("name") ? doc["name"].get<std::string>() : source;
  if (!doc.contains("domain")) throw ScenarioError(source + ": missing required section domain");
  config.domain = detail::parse_domain(reader, doc["domain"]);
  config.density = doc.contains("density") ? detail::parse_density(reader, doc["density"])
                                           : DensityField::uniform();
  if (doc.contains("run")) {
    reader.require_keys(doc["run"], "run", {"max_steps", "seed"});
    config.max_steps =
        static_cast<int>(reader.number_or(doc["run"], "run", "max_steps", 500.0));
    config.seed =
        static_cast<std::uint64_t>(reader.number_or(doc["run"], "run", "seed", 1.0));
  }
  if (!doc.contains("robots")) throw ScenarioError(source + ": missing required section robots");
  config.robots = detail::parse_robots(reader, doc["robots"], config.domain, config.seed);
  config.graph = doc.contains("graph") ? detail::parse_graph(reader, doc["graph"])
                                       : GraphPolicy{};
  if (doc.contains("controller")) {
    try {
      config.controller = controller_from_string(doc["controller"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(source + ": controller: " + e.what());
    }
  }
  config.gains = doc.contains("gains") ? detail::parse_gains(reader, doc["gains"]) : Gains{};

  validate_config(config);
  // The connected-network assumption is checked up front, not at run time.
  std::vector<Point2> positions;
  for (const RobotSpec& r : config.robots) positions.push_back(r.position);
  build_graph(positions, config.graph);
  return config;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

/// Canonical serialized form: explicit robot list, full schedules, resolved
/// defaults. parse(serialize(parse(x))) == parse(x) on semantic content.
inline std::string serialize_scenario(const ScenarioConfig& config) {
  using detail::json;
  json doc;
  doc["name"] = config.name;
  {
    json verts = json::array();
    for (const Point2& v : config.domain.vertices()) verts.push_back({v.x, v.y});
    doc["domain"] = {{"vertices", verts}};
  }
  if (config.density.is_uniform()) {
    doc["density"] = {{"kind", "uniform"}};
  } else {
    json comps = json::array();
    for (const GaussianComponent& c : config.density.components()) {
      comps.push_back({{"mean", {c.mean.x, c.mean.y}},
                       {"cov", {{c.sxx, c.sxy}, {c.sxy, c.syy}}},
                       {"weight", c.mix_weight}});
    }
    doc["density"] = {{"kind", "gaussian-mixture"},
                      {"floor", config.density.floor()},
                      {"components", comps}};
  }
  {
    json robots = json::array();
    for (const RobotSpec& r : config.robots) {
      json sched = json::array();
      for (const ScheduleSegment& s : r.profile.schedule) {
        sched.push_back({{"from_step", s.from_step}, {"alpha", s.alpha}, {"beta", s.beta}});
      }
      robots.push_back({{"position", {r.position.x, r.position.y}},
                        {"e_init", r.profile.e_init},
                        {"schedule", sched}});
    }
    doc["robots"] = robots;
  }
  if (config.graph.kind == GraphPolicy::Kind::Complete) {
    doc["graph"] = {{"policy", "complete"}};
  } else {
    doc["graph"] = {{"policy", "disk"},
                    {"radius", config.graph.radius},
                    {"frozen", !config.graph.recompute_each_step}};
  }
  doc["controller"] = to_string(config.controller);
  const Gains& g = config.gains;
  json gains = {{"k_p", g.k_p},
                {"k_e", g.k_e},
                {"atc_gain", g.atc_gain},
                {"pbc_gain", g.pbc_gain},
                {"v_max", g.v_max},
                {"dt", g.dt},
                {"eps_position", g.eps_position},
                {"delta_energy", g.delta_energy},
                {"w_floor", g.w_floor},
                {"mass_floor", g.mass_floor},
                {"rate_reset_threshold", g.rate_reset_threshold},
                {"rate_reset_two_sided", g.two_sided_reset}};
  if (!std::isnan(g.k_w)) gains["k_w"] = g.k_w;
  doc["gains"] = gains;
  doc["run"] = {{"max_steps", config.max_steps}, {"seed", config.seed}};
  return doc.dump(2) + "\n";
}

}  // namespace covsim
