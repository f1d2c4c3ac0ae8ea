#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rho/harness/risk.hpp"

namespace rho::harness {

using json = nlohmann::ordered_json;

// One CSV row. `group` names the sweep point (e.g. "eps=0.05") and is
// written as the leading entries of the flags cell.
struct Record {
  std::string experiment;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::optional<double> estimate, h2_loss, sq_loss;
  std::string group;
  std::vector<std::pair<std::string, std::string>> flags;

  Record& flag(std::string key, std::string value) {
    flags.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Record& flag(std::string key, const char* value) { return flag(std::move(key), std::string(value)); }
  Record& flag(std::string key, double value);
  Record& flag(std::string key, bool value) { return flag(std::move(key), value ? "1" : "0"); }
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  Record& flag(std::string key, I value) {
    return flag(std::move(key), std::to_string(value));
  }

  std::optional<std::string> find(const std::string& key) const {
    for (const auto& [k, v] : flags)
      if (k == key) return v;
    return std::nullopt;
  }
};

// Shortest round-trip representation, '.' decimal point.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline Record& Record::flag(std::string key, double value) { return flag(std::move(key), format_double(value)); }

inline const char* kCsvHeader = "experiment,rep,seed,estimator,estimate,h2_loss,sq_loss,flags";

inline std::string csv_row(const Record& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string flags = r.group.empty() ? std::string() : r.group + ";";
  for (const auto& [k, v] : r.flags) flags += k + "=" + v + ";";
  return r.experiment + "," + std::to_string(r.rep) + "," + std::to_string(r.seed) + "," + r.estimator + "," +
         opt(r.estimate) + "," + opt(r.h2_loss) + "," + opt(r.sq_loss) + "," + flags;
}

inline void write_csv(std::ostream& os, const std::vector<Record>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

inline json risk_json(const RiskSummary& r) {
  return json{{"count", r.count}, {"mean", r.mean}, {"sd", r.sd}, {"se", r.se},
              {"q50", r.q50},     {"q90", r.q90},   {"q99", r.q99}};
}

// Per (group, estimator): risk of each present loss column.
inline json summarize_losses(const std::vector<Record>& records) {
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> acc;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : records) {
    auto key = std::make_pair(r.group, r.estimator);
    if (!acc.count(key)) order.push_back(key);
    auto& slot = acc[key];
    if (r.h2_loss) slot.first.push_back(*r.h2_loss);
    if (r.sq_loss) slot.second.push_back(*r.sq_loss);
  }
  json out = json::array();
  for (const auto& key : order) {
    const auto& [h2, sq] = acc[key];
    json e{{"group", key.first}, {"estimator", key.second}};
    if (!h2.empty()) e["h2_loss"] = risk_json(estimate_risk(h2));
    if (!sq.empty()) e["sq_loss"] = risk_json(estimate_risk(sq));
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_outputs(const std::filesystem::path& dir, const std::vector<Record>& records, const json& summary) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "records.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "records.csv").string());
    write_csv(csv, records);
  }
  std::ofstream js(dir / "summary.json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  js << summary.dump(2) << '\n';
}

}  // namespace rho::harness
