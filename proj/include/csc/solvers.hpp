#pragma once

// Caching solvers: the non-collaborative greedy baseline, Gibbs samplers
// (sequential and chromatic parallel) and the exhaustive oracle.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csc/cost_model.hpp"

namespace csc {

// Top-capacity services by aggregated workload of M_n; ties to lowest id.
ServiceSet solve_ncol(const Instance& instance, int bs);
CachingConfig ncol_config(const Instance& instance);

// p_j proportional to exp(-(cost_j - min cost) / tau).
std::vector<double> boltzmann(std::span<const double> costs, double tau);

// Conditional of BS i over F_i given the current decisions of its Markov
// blanket. Reads only one-hop costs (Omega_i) and blanket decisions.
std::vector<double> gibbs_conditional(const Instance& instance, int bs, const CachingConfig& config, double tau,
                                      const Scope& scope);

enum class ReturnMode { kBestSeen, kLastSampled };

// tau(sweep) = max(tau_min, tau_start * decay^sweep).
struct Annealing {
  double tau_start = 10.0;
  double decay = 0.95;
  double tau_min = 0.05;
};

struct SamplerParams {
  double temperature = 10.0;  // used when annealing is off
  std::optional<Annealing> annealing;
  int max_sweeps = 500;
  int window = 10;
  double tolerance = 1e-3;
  bool stop_on_convergence = true;
  ReturnMode return_mode = ReturnMode::kBestSeen;
  std::uint64_t seed = 0;
  bool record_conditionals = false;
  bool record_visits = false;
  // Evaluate the members of a color step on worker threads.
  bool parallel = false;
  // Defaults to the NCOL configuration.
  std::optional<CachingConfig> initial;
  // Independent chains (chain r > 0 seeded with derive_seed(seed, r)); the
  // lowest-cost result wins, ties to the earliest chain.
  int restarts = 1;

  double temperature_at(int sweep) const;
  bool at_final_temperature(int sweep) const;
  void validate() const;
};

struct SweepRecord {
  int sweep = 0;
  double temperature = 0.0;
  long long update_rounds = 0;  // cumulative
  double total_cost = 0.0;      // after this sweep
  double best_cost = 0.0;       // best seen so far, including the start
};

struct SamplerTrace {
  double initial_cost = 0.0;
  std::vector<SweepRecord> sweeps;
  int rounds_per_sweep = 0;
  bool converged = false;
  int converged_at = -1;
  // Set when max_sweeps was reached without convergence.
  bool not_converged_warning = false;
  // [sweep][bs] -> conditional sampled from in that sweep (empty for inactive BSs).
  std::vector<std::vector<std::vector<double>>> conditionals;
  // Joint configurations after each sweep, keyed by per-BS feasible index.
  std::map<std::vector<int>, long long> visits;
};

struct SamplerResult {
  CachingConfig config;
  double cost = 0.0;
  SamplerTrace trace;
};

// Chromatic parallel Gibbs sampling: colorsets visited in ascending color
// order, members of a colorset sample against a shared snapshot.
SamplerResult run_cpgs(const Instance& instance, const SamplerParams& params, const Scope& scope);
// One BS per step in id order.
SamplerResult run_sequential_gs(const Instance& instance, const SamplerParams& params, const Scope& scope);

inline constexpr std::uint64_t kDefaultEnumerationCap = 4096;

struct ExhaustiveResult {
  CachingConfig config;
  double cost = 0.0;
  std::uint64_t evaluated = 0;
};

// Product of |F_n| over the active BSs, saturating at UINT64_MAX.
std::uint64_t configuration_space_size(const Instance& instance, const Scope& scope);

// Exact argmin of total_cost over the active BSs' product space; ties to the
// lexicographically smallest index tuple. Inactive BSs keep their NCOL sets.
// Throws EnumerationCapError above `cap`.
ExhaustiveResult solve_exhaustive(const Instance& instance, const Scope& scope,
                                  std::uint64_t cap = kDefaultEnumerationCap);

// "2-0-1": per-BS feasible index.
std::string config_key(const std::vector<int>& indices);

// Columns: sweep,total_cost,best_cost
void write_trace_csv(std::ostream& os, const SamplerTrace& trace);
// Columns: config,count
void write_visits_csv(std::ostream& os, const SamplerTrace& trace);

}  // namespace csc
