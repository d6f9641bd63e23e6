#pragma once

// Shared fixtures for the test binaries: hand-built instances and
// independent reference computations (brute force, first-principles costs).

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "csc/scenario.hpp"

namespace csc::testing {

struct UeSpec {
  int home = 0;
  std::vector<int> reachable;  // home is added if missing
  std::vector<double> counts;  // requests per service
  std::optional<Point> position;
};

struct ManualSpec {
  std::vector<Point> bs_positions;
  std::vector<double> unit_costs;
  std::vector<std::pair<int, int>> edges;  // G
  std::vector<UeSpec> ues;
  int num_services = 2;
  int capacity = 1;
  double cloud_unit_cost = 5.0;
  double input_bits = 1e6;
  double cycles = kDefaultRequestCycles;
  double benefit_rate = 10.0;
};

inline Instance manual_instance(const ManualSpec& spec) {
  Deployment d;
  d.area = {1000.0, 1000.0};
  const int N = static_cast<int>(spec.bs_positions.size());
  for (int n = 0; n < N; ++n) d.base_stations.push_back({n, spec.bs_positions[n], spec.capacity, spec.unit_costs[n]});
  for (std::size_t m = 0; m < spec.ues.size(); ++m) {
    const auto& u = spec.ues[m];
    UserEquipment ue;
    ue.id = static_cast<int>(m);
    const Point h = spec.bs_positions[u.home];
    ue.position = u.position.value_or(Point{h.x + 5.0, h.y});
    ue.home_bs = u.home;
    ue.reachable = u.reachable;
    if (std::find(ue.reachable.begin(), ue.reachable.end(), u.home) == ue.reachable.end())
      ue.reachable.push_back(u.home);
    std::sort(ue.reachable.begin(), ue.reachable.end());
    d.user_equipment.push_back(ue);
  }
  const auto catalog = ServiceCatalog::uniform(spec.num_services, spec.input_bits, spec.cycles, spec.benefit_rate);
  DemandMatrix demand(static_cast<int>(spec.ues.size()), spec.num_services);
  for (std::size_t m = 0; m < spec.ues.size(); ++m)
    for (int k = 0; k < spec.num_services && k < static_cast<int>(spec.ues[m].counts.size()); ++k)
      demand.set_requests(static_cast<int>(m), k, spec.ues[m].counts[k], catalog);
  NetworkGraphs graphs = graphs_from_physical(make_adjacency(N, spec.edges));
  return Instance(std::move(d), std::move(graphs), catalog, std::move(demand), ChannelModel{}, spec.cloud_unit_cost);
}

// Seeded random small instance (fixed BS/UE counts in a square area).
inline Instance random_instance(std::uint64_t seed, int num_bs, int num_services, int ues_per_bs = 3,
                                double side = 250.0, int capacity = 1) {
  ScenarioConfig c;
  c.deployment.area = {side, side};
  c.deployment.bs_count = num_bs;
  c.deployment.ue_count = ues_per_bs * num_bs;
  c.deployment.cache_capacity = capacity;
  c.catalog = ServiceCatalog::uniform(num_services, kDefaultRequestBits, kDefaultRequestCycles, 10.0);
  return make_instance(c, seed);
}

inline Instance dense_instance(std::uint64_t seed) {
  ScenarioConfig c;
  return make_instance(c, seed);
}

// ---- first-principles reference cost ----

inline double ref_rate(const Instance& inst, int m, int n) {
  const double p = inst.deployment().user_equipment[m].tx_power_mw;
  const double n0 = std::pow(10.0, inst.channel().noise_dbm / 10.0);
  return inst.channel().bandwidth_hz * std::log2(1.0 + p * inst.gain(m, n) / n0);
}

// Target of (m, k): reachable BSs that are the home or a G-neighbor of it,
// in the home's group, positive rate (home always allowed), caching k; the
// highest gain wins, ties to the lowest id. -1 = cloud via home.
inline int ref_target(const Instance& inst, int m, int k, const CachingConfig& a, const Scope& scope) {
  const int home = inst.home(m);
  const auto& phys = inst.graphs().physical[home];
  int best = -1;
  double best_gain = -1.0;
  for (int n : inst.deployment().user_equipment[m].reachable) {
    const bool near = n == home || std::find(phys.begin(), phys.end(), n) != phys.end();
    if (!near || !scope.same_group(n, home) || !a[n].contains(k)) continue;
    if (n != home && !(ref_rate(inst, m, n) > 0.0)) continue;
    const double g = inst.gain(m, n);
    if (g > best_gain || (g == best_gain && n < best)) {
      best = n;
      best_gain = g;
    }
  }
  return best;
}

inline double ref_ue_cost(const Instance& inst, int m, const CachingConfig& a, const Scope& scope) {
  const double p = inst.deployment().user_equipment[m].tx_power_mw;
  double cost = 0.0;
  for (int k = 0; k < inst.num_services(); ++k) {
    const auto& d = inst.demand().at(m, k);
    const int t = ref_target(inst, m, k, a, scope);
    const int link = t < 0 ? inst.home(m) : t;
    if (d.lambda_bits > 0.0) cost += p * d.lambda_bits / ref_rate(inst, m, link);
    cost += (t < 0 ? inst.cloud_unit_cost() : inst.unit_cost(t)) * d.gamma_cycles;
  }
  return cost;
}

inline double ref_sc_cost(const Instance& inst, int n, const CachingConfig& a, const Scope& scope) {
  double c = 0.0;
  for (int m = 0; m < inst.num_ue(); ++m)
    if (inst.home(m) == n) c += ref_ue_cost(inst, m, a, scope);
  return c;
}

inline double ref_total_cost(const Instance& inst, const CachingConfig& a, const Scope& scope) {
  double c = 0.0;
  for (int n = 0; n < inst.num_bs(); ++n)
    if (scope.active(n)) c += ref_sc_cost(inst, n, a, scope);
  return c;
}

// All size-`capacity` subsets of {0..K-1}, built by bit counting.
inline std::vector<ServiceSet> ref_feasible(int K, int capacity) {
  std::vector<std::pair<std::vector<int>, ServiceSet>> sets;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << K); ++b)
    if (std::popcount(b) == capacity) {
      auto s = ServiceSet::from_bits(b);
      sets.push_back({s.members(), s});
    }
  std::sort(sets.begin(), sets.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<ServiceSet> out;
  for (auto& [v, s] : sets) out.push_back(s);
  return out;
}

// Visits every configuration of the active BSs (inactive ones fixed to `base`).
inline void for_each_config(const Instance& inst, const Scope& scope, CachingConfig base,
                            const std::function<void(const CachingConfig&)>& visit) {
  const auto& members = scope.active_members();
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == members.size()) {
      visit(base);
      return;
    }
    const int n = members[i];
    for (const auto& s : ref_feasible(inst.num_services(), inst.deployment().base_stations[n].cache_capacity)) {
      base[n] = s;
      rec(i + 1);
    }
  };
  rec(0);
}

struct BruteForce {
  CachingConfig config;
  double cost = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

inline BruteForce brute_force(const Instance& inst, const Scope& scope) {
  BruteForce out;
  for_each_config(inst, scope, ncol_config(inst), [&](const CachingConfig& a) {
    const double c = ref_total_cost(inst, a, scope);
    if (c < out.cost) {
      out.second = out.cost;
      out.cost = c;
      out.config = a;
    } else if (c < out.second) {
      out.second = c;
    }
  });
  return out;
}

inline bool close_rel(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Two-SC overlapping scenario: BS0 and BS1 are G-neighbors, each has UEs in
// the overlap. BS0's UEs mostly want service 0, BS1's mostly service 0 too,
// with a minority demand for service 1 on both sides.
inline ManualSpec overlap_pair_spec() {
  ManualSpec s;
  s.bs_positions = {{0.0, 0.0}, {100.0, 0.0}};
  s.unit_costs = {2.0, 2.0};
  s.edges = {{0, 1}};
  s.num_services = 2;
  s.ues = {
      {0, {0, 1}, {6.0, 2.0}, Point{40.0, 0.0}},
      {0, {0, 1}, {6.0, 2.0}, Point{45.0, 0.0}},
      {1, {0, 1}, {6.0, 2.0}, Point{60.0, 0.0}},
      {1, {0, 1}, {6.0, 2.0}, Point{55.0, 0.0}},
  };
  return s;
}

}  // namespace csc::testing
