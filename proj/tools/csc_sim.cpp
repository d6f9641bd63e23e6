// Command-line harness: deployment generation, single-strategy runs,
// experiment presets and the small-instance oracle check.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csc/error.hpp"
#include "csc/format.hpp"
#include "csc/scenario.hpp"

namespace fs = std::filesystem;
using namespace csc;

namespace {

ScenarioConfig config_from(const std::string& path) {
  return path.empty() ? ScenarioConfig{} : load_config_file(path);
}

void print_files(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int run_generate(const std::string& config_path, std::optional<std::uint64_t> seed_opt, const std::string& out) {
  const ScenarioConfig config = config_from(config_path);
  const std::uint64_t seed = seed_opt.value_or(config.seed);
  const Instance inst = make_instance(config, seed);
  fs::create_directories(out);
  std::vector<fs::path> files;
  {
    files.push_back(fs::path(out) / "deployment.json");
    std::ofstream os(files.back(), std::ios::binary);
    os << nlohmann::json(inst.deployment()).dump(2) << '\n';
  }
  {
    files.push_back(fs::path(out) / "demand.csv");
    std::ofstream os(files.back(), std::ios::binary);
    write_demand_csv(os, inst.demand());
  }
  {
    files.push_back(fs::path(out) / "graphs.json");
    std::ofstream os(files.back(), std::ios::binary);
    const auto& g = inst.graphs();
    nlohmann::json j;
    j["physical"] = g.physical;
    j["mrf"] = g.mrf;
    j["color"] = g.coloring.color;
    j["num_colors"] = g.coloring.num_colors();
    os << j.dump(2) << '\n';
  }
  {
    files.push_back(fs::path(out) / "config.json");
    std::ofstream os(files.back(), std::ios::binary);
    os << to_json(config).dump(2) << '\n';
  }
  print_files(files);
  std::cout << "N=" << inst.num_bs() << " M=" << inst.num_ue() << " L=" << inst.graphs().coloring.num_colors() << '\n';
  return 0;
}

int run_solve(const std::string& tag, const std::string& config_path, std::optional<std::uint64_t> seed_opt,
              const std::string& out) {
  const ScenarioConfig config = config_from(config_path);
  // Bare CSC-S takes the payoff scheme from the config.
  const Strategy strategy = tag == "CSC-S" ? (config.scheme == Scheme::kPlain ? Strategy::kCscSPc : Strategy::kCscSIc)
                                           : strategy_from_string(tag);
  const std::uint64_t seed = seed_opt.value_or(config.seed);
  const Instance inst = make_instance(config, seed);
  const RunResult r = run_scenario(inst, config, strategy, seed);
  print_files(write_run(r, out));
  std::cout << "strategy=" << to_string(strategy) << " system_utility=" << fmt_double(r.system_utility)
            << " total_cost=" << fmt_double(r.breakdown.total_cost) << '\n';
  if (r.sampler && r.sampler->trace.not_converged_warning)
    std::cerr << "warning: sampler did not meet the convergence criterion within max_sweeps\n";
  return 0;
}

int run_experiment(const std::string& preset, const std::string& config_path, std::optional<std::uint64_t> seed_opt,
                   const std::string& out) {
  const ScenarioConfig config = config_from(config_path);
  const std::uint64_t seed = seed_opt.value_or(config.seed);
  print_files(run_preset(preset, config, seed, out));
  return 0;
}

int run_oracle_check(int max_n, int max_k, int instances, double tol, std::uint64_t seed, const std::string& out) {
  const auto summary = oracle_check(instances, max_n, max_k, tol, seed);
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream os(fs::path(out) / "oracle_check.csv", std::ios::binary);
    os << "seed,num_bs,num_services,oracle_cost,cpgs_cost,within_tolerance\n";
    for (const auto& r : summary.rows)
      os << r.seed << ',' << r.num_bs << ',' << r.num_services << ',' << fmt_double(r.oracle_cost) << ','
         << fmt_double(r.cpgs_cost) << ',' << (r.within_tolerance ? 1 : 0) << '\n';
  }
  std::cout << "matched " << summary.passed << '/' << summary.rows.size() << " instances within "
            << fmt_double(tol * 100.0) << "% in " << fmt_double(summary.seconds) << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative service caching simulator"};
  app.require_subcommand(1);

  std::string config_path, out = "out", tag, preset;
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("generate", "Generate a deployment, demand and graphs");
  gen->add_option("--config", config_path, "Scenario config JSON")->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Master seed (overrides the config)");
  gen->add_option("--out", out, "Output directory");

  auto* solve = app.add_subcommand("solve", "Run one strategy on a generated scenario");
  solve->add_option("--strategy", tag, "NCOL, CSC-O, CSC-S (scheme from config), CSC-S-PC, CSC-S-IC or ORACLE")->required();
  solve->add_option("--config", config_path, "Scenario config JSON")->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "Master seed (overrides the config)");
  solve->add_option("--out", out, "Output directory");

  auto* exp = app.add_subcommand("experiment", "Run an experiment preset");
  exp->add_option("--preset", preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  exp->add_option("--config", config_path, "Scenario config JSON")->check(CLI::ExistingFile);
  exp->add_option("--seed", seed, "Master seed (overrides the config)");
  exp->add_option("--out", out, "Output directory");

  int max_n = 5, max_k = 4, instances = 100;
  double tol = 0.005;
  std::uint64_t oracle_seed = 1;
  std::string oracle_out;
  auto* oc = app.add_subcommand("oracle-check", "Compare annealed CPGS against the exhaustive oracle");
  oc->add_option("--max-n", max_n, "Largest BS count")->check(CLI::Range(1, 8));
  oc->add_option("--max-k", max_k, "Largest catalog size")->check(CLI::Range(1, 8));
  oc->add_option("--instances", instances, "Number of random instances")->check(CLI::PositiveNumber);
  oc->add_option("--tolerance", tol, "Relative cost tolerance");
  oc->add_option("--seed", oracle_seed, "Master seed");
  oc->add_option("--out", oracle_out, "Optional output directory for oracle_check.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_generate(config_path, seed, out);
    if (*solve) return run_solve(tag, config_path, seed, out);
    if (*exp) return run_experiment(preset, config_path, seed, out);
    if (*oc) return run_oracle_check(max_n, max_k, instances, tol, oracle_seed, oracle_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
