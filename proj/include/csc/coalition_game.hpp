#pragma once

// Coalitional game among strategic small cells: coalition values,
// plain/incentivized payoff division, Pareto dominance and merge-and-split
// coalition formation.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csc/solvers.hpp"

namespace csc {

// PC: realized utilities only. IC: proportional-fairness surplus division
// with side payments cleared inside each coalition.
enum class Scheme { kPlain, kIncentivized };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& s);

using Members = std::vector<int>;       // sorted BS ids
using Partition = std::vector<Members>;  // ordered by smallest member

struct Coalition {
  Members members;
  double value = 0.0;                 // v(S)
  std::vector<ServiceSet> config;     // a_S, aligned with members
  std::vector<double> utilities;      // U_n(a_S), aligned with members
  bool exact = true;                  // solved by the exhaustive oracle
};

struct CoalitionOptions {
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  // Sampler used above the cap; its seed is replaced by a coalition-derived one.
  SamplerParams sampler = default_sampler();
  std::uint64_t seed = 0;
  int max_split_size = 8;
  // Relative tolerance for the Pareto comparisons.
  double pareto_tolerance = 1e-9;
  // Operation cap = factor * N accepted merges/splits.
  int operation_cap_factor = 10;

  static SamplerParams default_sampler();
};

struct Division {
  std::vector<double> weights;    // psi_n
  std::vector<double> modified;   // U~_n
  std::vector<double> payments;   // y_n = U~_n - U_n
  bool equal_weight_fallback = false;
};

// psi_n = v({n}) / sum_j v({j}); U~_n = psi_n (v(S) - sum_j v({j})) + v({n}).
// Falls back to equal weights when some v({n}) <= 0.
Division incentivized_utilities(double coalition_value, const std::vector<double>& singleton_values,
                                const std::vector<double>& realized_utilities);

// a >= b member-wise with at least one strict inequality. Both maps must
// cover the same BS set (throws otherwise). Differences within
// tolerance * max(1, max |u|) count as equal.
bool pareto_dominates(const std::map<int, double>& a, const std::map<int, double>& b, double tolerance = 1e-9);

// Memoizing evaluator for one instance and scheme.
class CoalitionGame {
 public:
  CoalitionGame(const Instance& instance, Scheme scheme, CoalitionOptions options = {});

  const Instance& instance() const { return instance_; }
  Scheme scheme() const { return scheme_; }
  const CoalitionOptions& options() const { return options_; }

  // v(S) with its restricted-optimal configuration.
  const Coalition& value(const Members& members);
  double singleton_value(int bs);
  // Payoff of each member (U~ under IC, realized U under PC).
  std::map<int, double> payoffs(const Members& members);
  std::map<int, double> payoffs(const Partition& collection);
  // Sum of payoffs over every BS of a partition.
  double system_payoff(const Partition& partition);
  std::size_t evaluated_coalitions() const { return cache_.size(); }

 private:
  const Instance& instance_;
  Scheme scheme_;
  CoalitionOptions options_;
  std::map<Members, Coalition> cache_;
};

// Standalone value computation (no memoization).
Coalition coalition_value(const Instance& instance, const Members& members, const CoalitionOptions& options = {});

struct Operation {
  enum class Kind { kMerge, kSplit };
  Kind kind = Kind::kMerge;
  Partition before;  // the coalitions that were replaced
  Partition after;   // their replacement
  double system_payoff = 0.0;  // after the operation
};

struct MoveResult {
  Partition partition;
  bool accepted = false;
  Operation operation;  // meaningful when accepted
  long long attempts = 0;
};

// First pairwise merge (coalitions in smallest-member order, partners that
// hold a G-neighbor of some member) whose union Pareto-dominates the pair.
MoveResult try_merge(CoalitionGame& game, const Partition& partition);
// First binary split of a coalition of size 2..max_split_size that
// Pareto-dominates it.
MoveResult try_split(CoalitionGame& game, const Partition& partition);

Partition singletons(int num_bs);
Partition normalize(Partition partition);
bool is_partition_of(const Partition& partition, int num_bs);

struct PayoffEntry {
  int bs = 0;
  int coalition = 0;
  double singleton_value = 0.0;
  double weight = 0.0;
  double realized_utility = 0.0;
  double modified_utility = 0.0;
  double payment = 0.0;
};

struct PayoffReport {
  Scheme scheme = Scheme::kIncentivized;
  std::vector<PayoffEntry> per_bs;        // indexed by BS id
  std::vector<double> coalition_payments;  // sum of y_n per coalition
  std::vector<double> coalition_abs_payments;
  bool equal_weight_fallback = false;
};

PayoffReport payoff_report(CoalitionGame& game, const Partition& partition);

struct StabilityReport {
  bool terminated = false;   // a full merge+split pass accepted nothing
  bool dhp_stable = false;   // verified by an extra pass on the final partition
  // A D_c-stable partition, when one exists, is the unique merge-and-split
  // fixed point, so a D_hp-stable output is that partition whenever it exists.
  bool dc_stable_if_exists = false;
  std::vector<Operation> accepted;
  long long merge_attempts = 0;
  long long split_attempts = 0;
  int operation_cap = 0;
};

struct FormationResult {
  Partition partition;
  CachingConfig config;
  PayoffReport payoffs;
  StabilityReport stability;
  // System payoff before any operation and after each accepted one.
  std::vector<double> payoff_history;
};

// Algorithm starting from singletons and alternating merge/split passes.
FormationResult form_coalitions(const Instance& instance, Scheme scheme, const CoalitionOptions& options = {});
FormationResult form_coalitions(CoalitionGame& game);

// True when neither try_merge nor try_split accepts anything.
bool verify_dhp_stability(CoalitionGame& game, const Partition& partition);

std::string to_string(const Partition& partition);

nlohmann::json partition_json(CoalitionGame& game, const FormationResult& result);
// Columns: bs_id,coalition,singleton_value,weight,realized_utility,modified_utility,payment
void write_payments_csv(std::ostream& os, const PayoffReport& report);

}  // namespace csc
