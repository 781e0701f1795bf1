#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prevint/report.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::optional<std::string>& out_dir,
                 const std::optional<long long>& seed, const std::optional<int>& runs,
                 const std::optional<int>& bootstrap, int threads) {
  prevint::RunManifest manifest;
  try {
    manifest = prevint::parse_manifest_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (out_dir) manifest.output_dir = *out_dir;
  for (prevint::ScenarioConfig& cfg : manifest.scenarios) {
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (runs) cfg.n_sim = *runs;
    if (bootstrap) cfg.bootstrap_replicates = *bootstrap;
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      std::cerr << "config error: scenario '" << cfg.name << "': " << e.what() << "\n";
      return 1;
    }
  }
  if (manifest.scenarios.empty()) {
    std::cerr << "config error: no scenarios defined\n";
    return 1;
  }

  try {
    for (const prevint::ScenarioConfig& cfg : manifest.scenarios) {
      const prevint::ScenarioResult result = prevint::run_scenario(cfg, threads);
      std::cout << prevint::format_result_text(result) << "\n";
      const std::vector<std::string> written = prevint::write_scenario_outputs(
          result, manifest.output_dir, manifest.emit_csv, manifest.emit_text);
      for (const std::string& path : written) std::cout << "wrote " << path << "\n";
      std::cout << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_roc(const std::string& out_dir, double mu, double sigma, std::vector<double> nus,
            int grid) {
  if (nus.empty()) nus = {2.5, 1.0};
  try {
    std::filesystem::create_directories(out_dir);
    for (double nu : nus) {
      prevint::BinormalParams params{mu, nu, sigma};
      prevint::validate(params);
      char name[64];
      std::snprintf(name, sizeof(name), "roc_nu%g.csv", nu);
      const std::string path = out_dir + "/" + name;
      prevint::write_roc_csv(params, grid, path);
      std::cout << "wrote " << path << " (AUC = " << prevint::auc(params) << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prevint: prevalence estimation intervals, double-binormal simulation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  std::optional<int> runs;
  std::optional<int> bootstrap;
  int threads = 1;

  CLI::App* simulate = app.add_subcommand("simulate", "Run the scenarios of a config file");
  simulate->add_option("config", config_path, "Scenario config file")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides the config)");
  simulate->add_option("--seed", seed, "Seed override for every scenario");
  simulate->add_option("--runs", runs, "Simulation-run override for every scenario");
  simulate->add_option("--bootstrap", bootstrap, "Bootstrap-replicate override for every scenario");
  simulate->add_option("--threads", threads, "Worker threads (results do not depend on this)");

  std::string roc_out = "out";
  double mu = 0.0;
  double sigma = 1.0;
  std::vector<double> nus;
  int grid = 10001;

  CLI::App* roc = app.add_subcommand("roc", "Write ROC curve CSV data");
  roc->add_option("--out", roc_out, "Output directory");
  roc->add_option("--mu", mu, "Negative-class mean");
  roc->add_option("--sigma", sigma, "Common standard deviation");
  roc->add_option("--nu", nus, "Positive-class mean(s); default 2.5 and 1");
  roc->add_option("--grid", grid, "Threshold grid size");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return run_simulate(config_path, out_dir, seed, runs, bootstrap, threads);
  return run_roc(roc_out, mu, sigma, nus, grid);
}
