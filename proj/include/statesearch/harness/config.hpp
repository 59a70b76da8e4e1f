#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "statesearch/dpmm_weights.hpp"
#include "statesearch/problems/wind.hpp"

namespace statesearch::harness {

/// Raised for invalid user-supplied configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& newsvendor_competitors() {
  static const std::vector<std::string> ids = {"fbo-kernel", "fbo-dp", "gbo-kernel", "gbo-dp", "oracle"};
  return ids;
}

inline const std::vector<std::string>& wind_competitors() {
  static const std::vector<std::string> ids = {"known-wind", "fbo-kernel", "fbo-dp", "ignore-state"};
  return ids;
}

struct ExperimentConfig {
  std::string problem = "newsvendor";
  /// Empty selects every competitor of the problem.
  std::vector<std::string> competitors;
  std::uint64_t seed = 1;
  std::string output;

  // Newsvendor
  std::size_t sample_paths = 8;
  std::vector<std::size_t> checkpoints = {25, 50, 100, 200, 350, 500};
  std::size_t test_size = 100;

  // Wind
  bool synthetic = true;
  std::string wind_csv;
  std::size_t years = 4;
  /// Caps the evaluated hours per test year; 0 evaluates all.
  std::size_t max_test_hours = 0;
  wind::OuParams ou;

  // Dirichlet-process weights; unset fields take the problem's profile.
  std::optional<double> dp_alpha;
  std::optional<double> dp_dispersion;
  std::optional<std::size_t> dp_burn_in;
  std::optional<std::size_t> dp_thin;
  std::optional<std::size_t> dp_samples;

  // Chain continuation per online step of the gradient-based competitors.
  std::size_t gbo_warm_burn_in = 0;
  std::size_t gbo_warm_thin = 2;
  std::size_t gbo_warm_samples = 10;

  const std::vector<std::string>& known_competitors() const {
    return problem == "wind" ? wind_competitors() : newsvendor_competitors();
  }

  std::vector<std::string> resolved_competitors() const { return competitors.empty() ? known_competitors() : competitors; }

  bool runs(const std::string& id) const {
    const auto c = resolved_competitors();
    return std::find(c.begin(), c.end(), id) != c.end();
  }

  DpmmConfig dpmm() const {
    DpmmConfig d = problem == "wind" ? DpmmConfig::wind_profile() : DpmmConfig::newsvendor_profile();
    if (dp_alpha) d.alpha = *dp_alpha;
    if (dp_dispersion) d.vm_dispersion = *dp_dispersion;
    if (dp_burn_in) d.burn_in = *dp_burn_in;
    if (dp_thin) d.thin = *dp_thin;
    if (dp_samples) d.num_samples = *dp_samples;
    return d;
  }

  void validate() const {
    if (problem != "newsvendor" && problem != "wind") throw ConfigError("problem must be newsvendor or wind");
    for (const auto& c : competitors) {
      const auto& known = known_competitors();
      if (std::find(known.begin(), known.end(), c) == known.end()) {
        throw ConfigError("unknown competitor '" + c + "' for problem " + problem);
      }
    }
    if (sample_paths < 1) throw ConfigError("sample_paths must be positive");
    if (test_size < 1) throw ConfigError("test_size must be positive");
    if (checkpoints.empty()) throw ConfigError("checkpoints must be nonempty");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      if (checkpoints[i] < 1) throw ConfigError("checkpoints must be positive");
      if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("checkpoints must increase");
    }
    if (problem == "wind") {
      if (!synthetic && wind_csv.empty()) throw ConfigError("wind needs a CSV path or synthetic data");
      if (synthetic && years < 2) throw ConfigError("years must be at least 2");
    }
    try {
      ou.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (gbo_warm_samples < 1 || gbo_warm_thin < 1) throw ConfigError("warm-start schedule must sample");
    try {
      dpmm().validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) {
    T v{};
    read_key(j, key, v);
    out = v;
  }
}

}  // namespace detail

/// Flat JSON object whose keys mirror the ExperimentConfig fields.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> keys = {
      "problem",       "competitors",    "seed",          "output",           "sample_paths",  "checkpoints",
      "test_size",     "synthetic",      "wind_csv",      "years",            "max_test_hours", "dp_alpha",
      "dp_dispersion", "dp_burn_in",     "dp_thin",       "dp_samples",       "gbo_warm_burn_in",
      "gbo_warm_thin", "gbo_warm_samples", "ou_kappa",     "ou_sigma",         "ou_level",
      "ou_daily_amplitude", "ou_seasonal_amplitude"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key '" + k + "'");
  }
  ExperimentConfig c;
  detail::read_key(j, "problem", c.problem);
  detail::read_key(j, "competitors", c.competitors);
  detail::read_key(j, "seed", c.seed);
  detail::read_key(j, "output", c.output);
  detail::read_key(j, "sample_paths", c.sample_paths);
  detail::read_key(j, "checkpoints", c.checkpoints);
  detail::read_key(j, "test_size", c.test_size);
  detail::read_key(j, "synthetic", c.synthetic);
  detail::read_key(j, "wind_csv", c.wind_csv);
  detail::read_key(j, "years", c.years);
  detail::read_key(j, "max_test_hours", c.max_test_hours);
  detail::read_key(j, "dp_alpha", c.dp_alpha);
  detail::read_key(j, "dp_dispersion", c.dp_dispersion);
  detail::read_key(j, "dp_burn_in", c.dp_burn_in);
  detail::read_key(j, "dp_thin", c.dp_thin);
  detail::read_key(j, "dp_samples", c.dp_samples);
  detail::read_key(j, "gbo_warm_burn_in", c.gbo_warm_burn_in);
  detail::read_key(j, "gbo_warm_thin", c.gbo_warm_thin);
  detail::read_key(j, "gbo_warm_samples", c.gbo_warm_samples);
  detail::read_key(j, "ou_kappa", c.ou.kappa);
  detail::read_key(j, "ou_sigma", c.ou.sigma);
  detail::read_key(j, "ou_level", c.ou.level);
  detail::read_key(j, "ou_daily_amplitude", c.ou.daily_amplitude);
  detail::read_key(j, "ou_seasonal_amplitude", c.ou.seasonal_amplitude);
  if (!c.wind_csv.empty() && !j.contains("synthetic")) c.synthetic = false;
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

/// Independent generator for a (purpose, index) pair under one master seed.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose, index};
  return std::mt19937_64(seq);
}

}  // namespace statesearch::harness
