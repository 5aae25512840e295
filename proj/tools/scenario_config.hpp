#pragma once

// Scenario files are INI with TOML-style sections:
//
//   scenario = evolve
//   seed = 42
//   [family]
//   kind = plummer
//   ...
//
// Lists are comma separated. Comments start with ';'.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace lab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FamilyConfig {
  std::string kind = "plummer";  // plummer, cusp, product, core-halo
  double kappa = 1.0;
  double lambda = 1.0;
  double theta = 2.0;
  double delta = 0.42;
  double radius = 1.0;
  double cutoff = 0.05;
  std::optional<double> norm_ratio;  // rescale to norm_ratio * C_{3/2}
};

struct SolverConfig {
  std::size_t n = 2000;
  double t_end = 10.0;
  double cadence = 0.05;
  double dt = 2.5e-3;
  bool adaptive = false;
  double accuracy = 1e-2;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  std::string frozen = "off";  // off, point-mass, initial
  double point_mass = 1.0;
  double alpha = 6.0;
  bool audit = false;
  double max_energy_drift = std::numeric_limits<double>::quiet_NaN();
};

struct ConstantsConfig {
  std::vector<double> beta{1.5, 2.0, 3.0};
};

struct SweepConfig {
  std::vector<double> kappa{1.0};
  std::vector<double> lambda;
  std::vector<double> epsilon;
};

struct BlowupSweepConfig {
  std::vector<double> norm_ratio{0.5, 1.5, 2.0};
  std::vector<std::string> energy{"negative", "zero", "positive"};
  double energy_magnitude = 0.5;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 42;
  std::string out = "out";
  FamilyConfig family;
  SolverConfig solver;
  ConstantsConfig constants;
  SweepConfig sweep;
  BlowupSweepConfig blowup;
};

inline const std::set<std::string>& scenario_names() {
  static const std::set<std::string> s{"constants", "trial-family", "evolve", "blowup-sweep", "bounds-audit"};
  return s;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(field + ": expected a number, got '" + text + "'");
}

inline bool to_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(field + ": expected true or false, got '" + text + "'");
}

inline std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(to_double(field, s));
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

inline void positive(const std::string& field, double v) {
  if (!(v > 0.0)) throw ConfigError(field + ": must be > 0");
}

}  // namespace detail

inline void validate(const ScenarioConfig& c) {
  using detail::positive;
  if (!scenario_names().count(c.scenario)) throw ConfigError("scenario: unknown scenario '" + c.scenario + "'");
  const auto& f = c.family;
  static const std::set<std::string> kinds{"plummer", "cusp", "product", "core-halo"};
  if (!kinds.count(f.kind)) throw ConfigError("family.kind: unknown family '" + f.kind + "'");
  positive("family.kappa", f.kappa);
  positive("family.lambda", f.lambda);
  positive("family.theta", f.theta);
  positive("family.radius", f.radius);
  if (!(f.delta > 0.0 && f.delta < 1.0)) throw ConfigError("family.delta: must lie in (0, 1)");
  if (!(f.cutoff >= 0.0)) throw ConfigError("family.cutoff: must be >= 0");
  if (f.norm_ratio) positive("family.norm_ratio", *f.norm_ratio);
  const auto& s = c.solver;
  if (s.n == 0) throw ConfigError("solver.n: must be > 0");
  positive("solver.t_end", s.t_end);
  positive("solver.cadence", s.cadence);
  positive("solver.dt", s.dt);
  positive("solver.accuracy", s.accuracy);
  positive("solver.dt_min", s.dt_min);
  positive("solver.dt_max", s.dt_max);
  positive("solver.point_mass", s.point_mass);
  if (s.dt_min > s.dt_max) throw ConfigError("solver.dt_min: must not exceed solver.dt_max");
  if (!(s.alpha > 3.0)) throw ConfigError("solver.alpha: must be > 3");
  if (s.frozen != "off" && s.frozen != "point-mass" && s.frozen != "initial")
    throw ConfigError("solver.frozen: expected off, point-mass or initial");
  if (!std::isnan(s.max_energy_drift)) positive("solver.max_energy_drift", s.max_energy_drift);
  for (double b : c.constants.beta)
    if (!(b > 1.0)) throw ConfigError("constants.beta: every beta must be > 1");
  for (double k : c.sweep.kappa) positive("sweep.kappa", k);
  for (double l : c.sweep.lambda) positive("sweep.lambda", l);
  for (double e : c.sweep.epsilon)
    if (!(e >= 0.0)) throw ConfigError("sweep.epsilon: must be >= 0");
  if (c.scenario == "trial-family" && c.sweep.lambda.empty() && c.sweep.epsilon.empty())
    throw ConfigError("sweep: give lambda or epsilon");
  for (double r : c.blowup.norm_ratio) positive("blowup.norm_ratio", r);
  for (const auto& e : c.blowup.energy)
    if (e != "negative" && e != "zero" && e != "positive")
      throw ConfigError("blowup.energy: expected negative, zero or positive, got '" + e + "'");
  if (c.blowup.energy.empty()) throw ConfigError("blowup.energy: empty list");
  positive("blowup.energy_magnitude", c.blowup.energy_magnitude);
  if ((c.scenario == "evolve" || c.scenario == "bounds-audit" || c.scenario == "blowup-sweep") &&
      f.kind != "core-halo" && !(f.cutoff > 0.0))
    throw ConfigError("family.cutoff: sampling needs an angular-momentum cutoff > 0");
}

inline ScenarioConfig parse_config(const boost::property_tree::ptree& pt) {
  using namespace detail;
  ScenarioConfig c;
  auto text = [](const boost::property_tree::ptree& node) { return trim(node.get_value<std::string>()); };
  for (const auto& [key, node] : pt) {
    if (node.empty()) {
      const auto v = text(node);
      if (key == "scenario") c.scenario = v;
      else if (key == "seed") {
        const double s = to_double("seed", v);
        if (s < 0.0 || s != std::floor(s)) throw ConfigError("seed: expected an unsigned integer");
        c.seed = static_cast<std::uint64_t>(s);
      } else if (key == "out") c.out = v;
      else throw ConfigError(key + ": unknown key");
      continue;
    }
    for (const auto& [name, leaf] : node) {
      const std::string field = key + "." + name;
      const auto v = text(leaf);
      auto num = [&] { return to_double(field, v); };
      if (key == "family") {
        auto& f = c.family;
        if (name == "kind") f.kind = v;
        else if (name == "kappa") f.kappa = num();
        else if (name == "lambda") f.lambda = num();
        else if (name == "theta") f.theta = num();
        else if (name == "delta") f.delta = num();
        else if (name == "radius") f.radius = num();
        else if (name == "cutoff") f.cutoff = num();
        else if (name == "norm_ratio") f.norm_ratio = num();
        else throw ConfigError(field + ": unknown key");
      } else if (key == "solver") {
        auto& s = c.solver;
        if (name == "n") {
          const double n = num();
          if (n < 1.0 || n != std::floor(n)) throw ConfigError(field + ": expected a positive integer");
          s.n = static_cast<std::size_t>(n);
        } else if (name == "t_end") s.t_end = num();
        else if (name == "cadence") s.cadence = num();
        else if (name == "dt") s.dt = num();
        else if (name == "adaptive") s.adaptive = to_bool(field, v);
        else if (name == "accuracy") s.accuracy = num();
        else if (name == "dt_min") s.dt_min = num();
        else if (name == "dt_max") s.dt_max = num();
        else if (name == "frozen") s.frozen = v;
        else if (name == "point_mass") s.point_mass = num();
        else if (name == "alpha") s.alpha = num();
        else if (name == "audit") s.audit = to_bool(field, v);
        else if (name == "max_energy_drift") s.max_energy_drift = num();
        else throw ConfigError(field + ": unknown key");
      } else if (key == "constants") {
        if (name == "beta") c.constants.beta = to_list(field, v);
        else throw ConfigError(field + ": unknown key");
      } else if (key == "sweep") {
        if (name == "kappa") c.sweep.kappa = to_list(field, v);
        else if (name == "lambda") c.sweep.lambda = to_list(field, v);
        else if (name == "epsilon") c.sweep.epsilon = to_list(field, v);
        else throw ConfigError(field + ": unknown key");
      } else if (key == "blowup") {
        if (name == "norm_ratio") c.blowup.norm_ratio = to_list(field, v);
        else if (name == "energy") c.blowup.energy = split(v);
        else if (name == "energy_magnitude") c.blowup.energy_magnitude = num();
        else throw ConfigError(field + ": unknown key");
      } else {
        throw ConfigError(key + ": unknown section");
      }
    }
  }
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(pt);
}

}  // namespace lab
