#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rho/psi.hpp"

namespace rho::harness {

using json = nlohmann::ordered_json;

// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::size_t n = 1;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::vector<PsiKind> psi;
  std::vector<std::string> estimators;
  std::string out_dir = "results";
  std::size_t threads = 1;
  json params = json::object();  // experiment-specific (grids, steps, sweeps, kappa)

  template <class T>
  T param(const std::string& key) const {
    if (!params.contains(key)) throw ConfigError(experiment + ": missing parameter '" + key + "'");
    try {
      return params.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(experiment + ": parameter '" + key + "': " + e.what());
    }
  }

  bool uses(const std::string& estimator) const {
    for (const auto& e : estimators)
      if (e == estimator) return true;
    return false;
  }

  json to_json() const {
    json psi_names = json::array();
    for (const auto& k : psi) psi_names.push_back(name(k));
    return json{{"experiment", experiment}, {"n", n},         {"reps", reps},       {"seed", seed},
                {"psi", psi_names},         {"estimators", estimators},             {"out_dir", out_dir},
                {"threads", threads},       {"params", params}};
  }
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

// Defaults overlaid by `file` (params merged key by key). Estimator names are
// checked by the registry, not here.
inline ExperimentConfig parse_config(const json& defaults, const json& file) {
  if (!file.is_object()) throw ConfigError("config must be a JSON object");
  json merged = defaults;
  for (auto it = file.begin(); it != file.end(); ++it) {
    if (it.key() == "params") {
      if (!it.value().is_object()) throw ConfigError("'params' must be an object");
      for (auto p = it.value().begin(); p != it.value().end(); ++p) merged["params"][p.key()] = p.value();
    } else if (merged.contains(it.key())) {
      merged[it.key()] = it.value();
    } else {
      throw ConfigError("unknown config key '" + it.key() + "'");
    }
  }

  ExperimentConfig c;
  try {
    c.experiment = merged.at("experiment").get<std::string>();
    auto count = [&](const char* key) {
      const auto& v = merged.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(std::string("'") + key + "' must be an integer >= 1");
      return static_cast<std::size_t>(v.get<long long>());
    };
    c.n = count("n");
    c.reps = count("reps");
    c.threads = count("threads");
    const auto& sv = merged.at("seed");
    if (!(sv.is_number_unsigned() || (sv.is_number_integer() && sv.get<long long>() >= 0)))
      throw ConfigError("'seed' must be a non-negative integer");
    c.seed = merged.at("seed").get<std::uint64_t>();
    for (const auto& p : merged.at("psi")) {
      try {
        c.psi.push_back(psi_from_name(p.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (c.psi.empty()) throw ConfigError("'psi' must list at least one kind");
    c.estimators = merged.at("estimators").get<std::vector<std::string>>();
    c.out_dir = merged.at("out_dir").get<std::string>();
    c.params = merged.at("params");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace rho::harness
