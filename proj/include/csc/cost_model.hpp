#pragma once

// Routing of UE demand to base stations, the resulting workload split and
// the per-SC cost C_n / utility U_n.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "csc/demand.hpp"
#include "csc/topology.hpp"

namespace csc {

// Subset of service ids (K <= 64).
class ServiceSet {
 public:
  constexpr ServiceSet() = default;
  static ServiceSet of(std::initializer_list<int> services);
  static constexpr ServiceSet from_bits(std::uint64_t bits) {
    ServiceSet s;
    s.bits_ = bits;
    return s;
  }

  bool contains(int service) const { return (bits_ >> service) & 1U; }
  void insert(int service) { bits_ |= std::uint64_t{1} << service; }
  int size() const;
  std::vector<int> members() const;
  std::uint64_t bits() const { return bits_; }
  // "3" or "1;4".
  std::string to_string() const;

  friend bool operator==(ServiceSet, ServiceSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

// One feasible set per BS.
using CachingConfig = std::vector<ServiceSet>;

// Collaboration scope. Every BS carries a group label; a UE may offload only
// to reachable BSs sharing its home BS's label. `active` marks the BSs whose
// costs and decisions are being optimized.
class Scope {
 public:
  Scope() = default;

  static Scope all(int num_bs);
  // `members` collaborate with each other; every other BS is isolated and
  // inactive.
  static Scope of(int num_bs, const std::vector<int>& members);
  // Disjoint coalitions covering every BS; all active.
  static Scope partition(int num_bs, const std::vector<std::vector<int>>& coalitions);

  int num_bs() const { return static_cast<int>(group_.size()); }
  bool active(int bs) const { return active_[bs] != 0; }
  bool same_group(int a, int b) const { return group_[a] == group_[b]; }
  const std::vector<int>& active_members() const { return members_; }

 private:
  std::vector<int> group_;
  std::vector<char> active_;
  std::vector<int> members_;
};

struct Candidate {
  int bs = 0;
  double gain = 0.0;
  double rate = 0.0;
};

// Deployment, graphs, demand and channel bundled with the derived lookup
// tables the cost functions need. Immutable once constructed, except for
// explicit gain overrides used by constructed test scenarios.
class Instance {
 public:
  Instance(Deployment deployment, NetworkGraphs graphs, ServiceCatalog catalog, DemandMatrix demand,
           ChannelModel channel, double cloud_unit_cost);

  const Deployment& deployment() const { return deployment_; }
  const NetworkGraphs& graphs() const { return graphs_; }
  const ServiceCatalog& catalog() const { return catalog_; }
  const DemandMatrix& demand() const { return demand_; }
  const ChannelModel& channel() const { return channel_; }
  double cloud_unit_cost() const { return cloud_unit_cost_; }

  int num_bs() const { return deployment_.num_bs(); }
  int num_ue() const { return deployment_.num_ue(); }
  int num_services() const { return catalog_.size(); }

  int home(int ue) const { return deployment_.user_equipment[ue].home_bs; }
  double unit_cost(int bs) const { return deployment_.base_stations[bs].unit_cost; }
  // M_n.
  const std::vector<int>& registered(int bs) const { return registered_[bs]; }
  // Offload targets of UE m: N_m restricted to the home BS and its G-neighbors,
  // zero-rate non-home BSs dropped; sorted by gain (desc), then id.
  const std::vector<Candidate>& candidates(int ue) const { return candidates_[ue]; }
  // F_n, lexicographic order of sorted member tuples.
  const std::vector<ServiceSet>& feasible_sets(int bs) const { return feasible_[bs]; }
  int feasible_index(int bs, ServiceSet set) const;
  double rate(int ue, int bs) const;
  double gain(int ue, int bs) const;

  void override_gain(int ue, int bs, double gain);

 private:
  void rebuild_candidates(int ue);

  Deployment deployment_;
  NetworkGraphs graphs_;
  ServiceCatalog catalog_;
  DemandMatrix demand_;
  ChannelModel channel_;
  double cloud_unit_cost_;

  std::vector<std::vector<int>> registered_;
  std::vector<std::vector<double>> gain_;  // [ue][bs]
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<std::vector<ServiceSet>> feasible_;
};

// All subsets of {0..num_services-1} with exactly `capacity` members.
std::vector<ServiceSet> enumerate_feasible_sets(int num_services, int capacity);

bool is_feasible(const Instance& instance, const CachingConfig& config);

struct Route {
  int target_bs = -1;  // v_m^k
  bool cloud = false;  // forwarded to the cloud by target_bs (= home)
};

struct BsShare {
  int bs = 0;
  double lambda_bits = 0.0;  // lambda_{m,n}
  double gamma_edge = 0.0;   // gamma_{m,n}
};

struct UeSplit {
  std::vector<BsShare> shares;  // ascending bs
  double gamma_cloud = 0.0;     // gamma_{m,0}
};

struct RoutingPlan {
  int num_services = 0;
  std::vector<Route> routes;  // [ue * K + k]
  std::vector<UeSplit> split;  // [ue]

  const Route& at(int ue, int service) const { return routes[static_cast<std::size_t>(ue) * num_services + service]; }
};

RoutingPlan route(const Instance& instance, const CachingConfig& config, const Scope& scope);

// P_m * sum_n lambda_{m,n} / r_{m,n}; throws InfeasibleRouteError on a
// zero-rate link that carries data.
double transmission_cost(const Instance& instance, int ue, const RoutingPlan& plan);

struct ComputationCost {
  std::vector<std::pair<int, double>> edge;  // (bs, c_n * gamma_{m,n})
  double cloud = 0.0;                        // c_0 * gamma_{m,0}
  double total() const;
};

ComputationCost computation_costs(const Instance& instance, int ue, const RoutingPlan& plan);

struct BsCost {
  double tx = 0.0;       // transmission energy of registered UEs
  double edge = 0.0;     // edge compute payments of registered UEs
  double cloud = 0.0;    // cloud payments of registered UEs
  double benefit = 0.0;  // sum of u_m^k over registered UEs
  double total() const { return tx + edge + cloud; }
  double utility() const { return benefit - total(); }
};

struct CostBreakdown {
  std::vector<BsCost> per_bs;
  std::vector<double> edge_workload;   // cycles executed at BS n
  std::vector<double> cloud_workload;  // cycles sent to cloud by UEs registered to n
  double total_cost = 0.0;
  double total_utility = 0.0;
  double total_edge_workload = 0.0;
  double total_cloud_workload = 0.0;
};

// Full breakdown over every BS (scope restricts routing only).
CostBreakdown evaluate(const Instance& instance, const CachingConfig& config, const Scope& scope);

// Cost of UE m's demand (tx + edge + cloud payments); the hot path of every solver.
double ue_cost(const Instance& instance, int ue, const CachingConfig& config, const Scope& scope);
// C_n(a).
double sc_cost(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope);
// U_n(a).
double sc_utility(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope);
double sc_benefit(const Instance& instance, int bs);
// Sum of C_n over the scope's active BSs.
double total_cost(const Instance& instance, const CachingConfig& config, const Scope& scope);
// Sum of C_n over Omega_i intersected with the active BSs.
double neighborhood_cost(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope);

// Columns: bs_id,tx_cost,edge_cost,cloud_cost,total_cost,utility
void write_cost_csv(std::ostream& os, const CostBreakdown& breakdown);

}  // namespace csc
