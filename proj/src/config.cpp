#include "homwit/config.hpp"

#include "homwit/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace homwit::config {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(where + ": missing key '" + key + "'");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& where, const std::string& key,
                       std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

statemodel::PhotonPreparation parse_photon(const json& obj, const std::string& where) {
  require_keys(obj, where, {"theta_deg", "delay_um"});
  const double theta_deg = get_number(obj, where, "theta_deg", 0.0);
  const double delay = get_number(obj, where, "delay_um", 0.0);
  return statemodel::PhotonPreparation(theta_deg * std::numbers::pi / 180.0, delay);
}

statemodel::PairCalibration parse_calibration(const json& obj, const std::string& where) {
  require_keys(obj, where, {"v", "sigma"});
  const double v = get_number(obj, where, "v", 1.0, true);
  const double sigma = get_number(obj, where, "sigma", 0.0, true);
  try {
    return statemodel::PairCalibration(v, sigma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  experiment.validate();
  if (!(anrd.survival > 0.0) || anrd.survival > 1.0) {
    throw ConfigError("anrd.survival must lie in (0, 1]");
  }
  if (bootstrap_resamples < 2) throw ConfigError("bootstrap must be >= 2");
  if (surface.beta_steps < 2 || surface.gamma_steps < 2 || surface.dx_steps < 2) {
    throw ConfigError("surface grids need at least 2 steps per axis");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  require_keys(root, "config",
               {"photons", "calibration", "events", "seed", "efficiency", "anrd", "bootstrap",
                "surface"});

  RunConfig cfg;

  if (root.contains("photons")) {
    const auto& ph = root.at("photons");
    require_keys(ph, "photons", {"a", "b", "c"});
    if (ph.contains("a")) cfg.experiment.a = parse_photon(ph.at("a"), "photons.a");
    if (ph.contains("b")) cfg.experiment.b = parse_photon(ph.at("b"), "photons.b");
    if (ph.contains("c")) cfg.experiment.c = parse_photon(ph.at("c"), "photons.c");
  }

  if (root.contains("calibration")) {
    const auto& cal = root.at("calibration");
    require_keys(cal, "calibration", {"ab", "bc", "ac"});
    if (cal.contains("ab")) cfg.experiment.cal.ab = parse_calibration(cal.at("ab"), "calibration.ab");
    if (cal.contains("bc")) cfg.experiment.cal.bc = parse_calibration(cal.at("bc"), "calibration.bc");
    if (cal.contains("ac")) cfg.experiment.cal.ac = parse_calibration(cal.at("ac"), "calibration.ac");
  }

  cfg.experiment.events = get_uint(root, "config", "events", cfg.experiment.events);
  cfg.experiment.seed = get_uint(root, "config", "seed", cfg.experiment.seed);
  cfg.experiment.efficiency =
      get_number(root, "config", "efficiency", cfg.experiment.efficiency);

  if (root.contains("anrd")) {
    const auto& a = root.at("anrd");
    require_keys(a, "anrd", {"enabled", "survival", "corrected"});
    cfg.anrd.enabled = get_bool(a, "anrd", "enabled", cfg.anrd.enabled);
    cfg.anrd.survival = get_number(a, "anrd", "survival", cfg.anrd.survival);
    cfg.anrd.corrected = get_bool(a, "anrd", "corrected", cfg.anrd.corrected);
  }

  if (root.contains("bootstrap")) {
    const auto& b = root.at("bootstrap");
    if (!b.is_number_integer()) throw ConfigError("bootstrap: expected an integer");
    cfg.bootstrap_resamples = b.get<int>();
  }

  if (root.contains("surface")) {
    const auto& s = root.at("surface");
    require_keys(s, "surface",
                 {"beta_min_deg", "beta_max_deg", "beta_steps", "gamma_min_deg", "gamma_max_deg",
                  "gamma_steps", "dx_min_um", "dx_max_um", "dx_steps"});
    cfg.surface.beta_min_deg = get_number(s, "surface", "beta_min_deg", cfg.surface.beta_min_deg);
    cfg.surface.beta_max_deg = get_number(s, "surface", "beta_max_deg", cfg.surface.beta_max_deg);
    cfg.surface.beta_steps =
        static_cast<std::size_t>(get_uint(s, "surface", "beta_steps", cfg.surface.beta_steps));
    cfg.surface.gamma_min_deg =
        get_number(s, "surface", "gamma_min_deg", cfg.surface.gamma_min_deg);
    cfg.surface.gamma_max_deg =
        get_number(s, "surface", "gamma_max_deg", cfg.surface.gamma_max_deg);
    cfg.surface.gamma_steps =
        static_cast<std::size_t>(get_uint(s, "surface", "gamma_steps", cfg.surface.gamma_steps));
    cfg.surface.dx_min_um = get_number(s, "surface", "dx_min_um", cfg.surface.dx_min_um);
    cfg.surface.dx_max_um = get_number(s, "surface", "dx_max_um", cfg.surface.dx_max_um);
    cfg.surface.dx_steps =
        static_cast<std::size_t>(get_uint(s, "surface", "dx_steps", cfg.surface.dx_steps));
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace homwit::config
