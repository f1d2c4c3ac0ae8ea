#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rho/harness/experiments.hpp"
#include "rho/harness/verify.hpp"

namespace h = rho::harness;

namespace {

constexpr int kConfigError = 2;
constexpr int kVerifyFailure = 3;

int run_command(const std::string& experiment, const std::string& config_path, std::optional<std::size_t> reps,
                std::optional<std::uint64_t> seed, std::optional<std::size_t> threads, const std::string& out) {
  h::json file = config_path.empty() ? h::json::object() : h::read_json_file(config_path);
  if (reps) file["reps"] = *reps;
  if (seed) file["seed"] = *seed;
  if (threads) file["threads"] = *threads;
  if (!out.empty()) file["out_dir"] = out;
  h::ExperimentConfig cfg = h::make_config(experiment, file);
  h::RunResult res = h::run_experiment(cfg);
  std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / cfg.experiment;
  h::write_outputs(dir, res.records, res.summary);
  std::cout << res.records.size() << " records -> " << (dir / "records.csv").string() << "\n";
  std::cout << "checks: " << res.summary["checks"].dump() << "\n";
  return 0;
}

int verify_command() {
  bool ok = true;
  for (const auto& suite : h::verify_suites()) {
    h::CheckResult r = suite();
    std::printf("%-28s %s  (%.2fs)  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rho-estimator experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list registered experiments");

  auto* run = app.add_subcommand("run", "run one experiment");
  std::string experiment, config_path, out;
  std::optional<std::size_t> reps, threads;
  std::optional<std::uint64_t> seed;
  run->add_option("experiment", experiment, "registry name")->required();
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--reps", reps, "replications");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--threads", threads, "worker threads");
  run->add_option("--out", out, "output directory");

  auto* verify = app.add_subcommand("verify", "run the property suites");

  auto* config = app.add_subcommand("config", "print the default config of an experiment");
  std::string config_name;
  config->add_option("experiment", config_name, "registry name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*list) {
      for (const auto& e : h::registry()) std::cout << e.name << "\t" << e.description << "\n";
      return 0;
    }
    if (*run) return run_command(experiment, config_path, reps, seed, threads, out);
    if (*verify) return verify_command();
    if (*config) {
      std::cout << h::make_config(config_name).to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
