#pragma once

// Scenario configuration, end-to-end runs of each caching strategy and the
// experiment presets that emit CSV/JSON results.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csc/coalition_game.hpp"

namespace csc {

// Per-request defaults: input size in bits and processor workload in cycles.
// The workload unit sets the cost scale that the temperature is compared
// against.
inline constexpr double kDefaultRequestBits = 1e6;
inline constexpr double kDefaultRequestCycles = 0.05;

struct ScenarioConfig {
  DeploymentParams deployment;
  double radio_radius = 150.0;
  NeighborParams neighbors;
  ChannelModel channel;
  ServiceCatalog catalog = ServiceCatalog::uniform(10, kDefaultRequestBits, kDefaultRequestCycles, 10.0);
  double cloud_unit_cost = 5.0;
  RateRange rate_range;
  SamplerParams sampler;
  CoalitionOptions coalition;
  Scheme scheme = Scheme::kIncentivized;
  std::uint64_t seed = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Fills defaults for missing keys; rejects unknown keys and invalid values.
ScenarioConfig load_config(const nlohmann::json& j);
ScenarioConfig load_config_file(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

// Instance derived from (config, seed): deployment, reachability, graphs and
// demand all come from sub-seeds of `seed`.
Instance make_instance(const ScenarioConfig& config, std::uint64_t seed);
Instance make_instance(const ScenarioConfig& config, const Deployment& deployment, std::uint64_t seed);

enum class Strategy { kNcol, kCscO, kCscSPc, kCscSIc, kOracle };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct RunResult {
  Strategy strategy = Strategy::kNcol;
  CachingConfig config;
  CostBreakdown breakdown;
  double system_utility = 0.0;
  // Per-BS utility including side payments (equals realized U_n except CSC-S IC).
  std::vector<double> bs_payoffs;
  std::optional<SamplerResult> sampler;
  std::optional<FormationResult> formation;
  std::optional<nlohmann::json> partition;
};

RunResult run_scenario(const Instance& instance, const ScenarioConfig& config, Strategy strategy,
                       std::uint64_t seed);

const std::vector<std::string>& preset_names();

// Writes the preset's files into out_dir and returns their paths.
std::vector<std::filesystem::path> run_preset(const std::string& name, const ScenarioConfig& config,
                                              std::uint64_t seed, const std::filesystem::path& out_dir);

// Writes RunResult files for `solve`: costs.csv, caching.csv, plus trace.csv /
// partition.json / payments.csv when applicable.
std::vector<std::filesystem::path> write_run(const RunResult& result, const std::filesystem::path& out_dir);

struct OracleCheckRow {
  std::uint64_t seed = 0;
  int num_bs = 0;
  int num_services = 0;
  double oracle_cost = 0.0;
  double cpgs_cost = 0.0;
  bool within_tolerance = false;
};

struct OracleCheckSummary {
  std::vector<OracleCheckRow> rows;
  int passed = 0;
  double seconds = 0.0;
};

// Random small instances (N <= max_n, K <= max_k, capacity 1) solved by the
// annealed CPGS and by the exhaustive oracle.
OracleCheckSummary oracle_check(int instances, int max_n, int max_k, double relative_tolerance,
                                std::uint64_t seed);

}  // namespace csc
