#include <doctest.h>

#include <random>
#include <sstream>

#include "csc/cost_model.hpp"
#include "csc/error.hpp"
#include "csc/rng.hpp"
#include "support.hpp"

using namespace csc;
using namespace csc::testing;

namespace {

ManualSpec single_ue(std::vector<double> counts, double unit_cost = 2.0) {
  ManualSpec s;
  s.bs_positions = {{0, 0}};
  s.unit_costs = {unit_cost};
  s.num_services = 2;
  s.cycles = 1.0;
  s.ues = {{0, {0}, std::move(counts)}};
  return s;
}

CachingConfig random_config(const Instance& inst, Rng& rng) {
  CachingConfig a(inst.num_bs());
  for (int n = 0; n < inst.num_bs(); ++n) {
    const auto& f = inst.feasible_sets(n);
    a[n] = f[std::uniform_int_distribution<std::size_t>(0, f.size() - 1)(rng)];
  }
  return a;
}

}  // namespace

TEST_CASE("service sets") {
  const auto s = ServiceSet::of({4, 1});
  CHECK(s.size() == 2);
  CHECK(s.contains(1));
  CHECK_FALSE(s.contains(2));
  CHECK(s.to_string() == "1;4");
  CHECK(s.members() == std::vector<int>{1, 4});
  CHECK(ServiceSet::of({63}).contains(63));
}

TEST_CASE("feasible sets: binomial count, lexicographic order") {
  for (int K = 1; K <= 8; ++K)
    for (int c = 1; c <= K; ++c) CHECK(enumerate_feasible_sets(K, c) == ref_feasible(K, c));
  CHECK(enumerate_feasible_sets(10, 1).size() == 10);
  CHECK(enumerate_feasible_sets(10, 3).size() == 120);
  const auto f = enumerate_feasible_sets(4, 2);
  CHECK(f.front() == ServiceSet::of({0, 1}));
  CHECK(f.back() == ServiceSet::of({2, 3}));
}

TEST_CASE("instance validation") {
  auto s = single_ue({1, 0});
  s.unit_costs = {5.0};  // c_n must be below c_0
  CHECK_THROWS_AS(manual_instance(s), ConfigError);
  s.unit_costs = {1.0};
  s.capacity = 3;  // more than K
  CHECK_THROWS_AS(manual_instance(s), ConfigError);
}

TEST_CASE("no cacher: home link plus cloud") {
  const auto inst = manual_instance(single_ue({10, 0}));
  const CachingConfig a = {ServiceSet::of({1})};
  const auto plan = route(inst, a, Scope::all(1));
  CHECK(plan.at(0, 0).target_bs == 0);
  CHECK(plan.at(0, 0).cloud);
  CHECK(plan.split[0].gamma_cloud == 10.0);
  REQUIRE(plan.split[0].shares.size() == 1);
  CHECK(plan.split[0].shares[0].gamma_edge == 0.0);
  CHECK(plan.split[0].shares[0].lambda_bits == 10e6);
}

TEST_CASE("highest gain cacher wins") {
  ManualSpec s;
  s.bs_positions = {{0, 0}, {100, 0}, {0, 100}};
  s.unit_costs = {1.0, 2.0, 3.0};
  s.edges = {{0, 1}, {0, 2}};
  s.num_services = 2;
  s.ues = {{0, {0, 1, 2}, {5, 0}}};
  auto inst = manual_instance(s);
  inst.override_gain(0, 1, 0.5);
  inst.override_gain(0, 2, 0.7);
  const CachingConfig a = {ServiceSet::of({1}), ServiceSet::of({0}), ServiceSet::of({0})};
  CHECK(route(inst, a, Scope::all(3)).at(0, 0).target_bs == 2);
  // Equal gains: lowest id.
  inst.override_gain(0, 2, 0.5);
  CHECK(route(inst, a, Scope::all(3)).at(0, 0).target_bs == 1);
  // Scope excludes BS1 and BS2 from BS0's group: cloud.
  const auto iso = Scope::partition(3, {{0}, {1}, {2}});
  CHECK(route(inst, a, iso).at(0, 0).cloud);
  // A caching home loses to a neighbor with a higher gain, wins otherwise.
  const CachingConfig b = {ServiceSet::of({0}), ServiceSet::of({0}), ServiceSet::of({1})};
  CHECK(route(inst, b, Scope::all(3)).at(0, 0).target_bs == 1);
  inst.override_gain(0, 0, 0.9);
  CHECK(route(inst, b, Scope::all(3)).at(0, 0).target_bs == 0);
}

TEST_CASE("reachable BS outside the home's G-neighborhood is not a target") {
  ManualSpec s;
  s.bs_positions = {{0, 0}, {100, 0}};
  s.unit_costs = {1.0, 1.0};
  s.num_services = 2;
  s.ues = {{0, {0, 1}, {3, 0}}};
  const auto inst = manual_instance(s);  // no G edge
  const CachingConfig a = {ServiceSet::of({1}), ServiceSet::of({0})};
  CHECK(route(inst, a, Scope::all(2)).at(0, 0).cloud);
}

TEST_CASE("transmission cost: lambda = r gives P times one second") {
  auto s = single_ue({1, 0});
  s.input_bits = 20e6;
  auto inst = manual_instance(s);
  inst.override_gain(0, 0, 1e-10 / 10.0);  // P H / N0 = 1
  CHECK(inst.rate(0, 0) == doctest::Approx(20e6).epsilon(1e-12));
  const CachingConfig a = {ServiceSet::of({0})};
  const auto plan = route(inst, a, Scope::all(1));
  CHECK(transmission_cost(inst, 0, plan) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ue_cost(inst, 0, a, Scope::all(1)) == doctest::Approx(10.0 + 2.0).epsilon(1e-12));
}

TEST_CASE("zero-rate link carrying data is infeasible") {
  auto inst = manual_instance(single_ue({1, 0}));
  inst.override_gain(0, 0, 0.0);
  const CachingConfig a = {ServiceSet::of({0})};
  CHECK_THROWS_AS(transmission_cost(inst, 0, route(inst, a, Scope::all(1))), InfeasibleRouteError);
  CHECK_THROWS_AS(ue_cost(inst, 0, a, Scope::all(1)), InfeasibleRouteError);
}

TEST_CASE("computation costs") {
  const auto inst = manual_instance(single_ue({10, 0}, 2.0));
  const CachingConfig edge = {ServiceSet::of({0})};
  const auto ce = computation_costs(inst, 0, route(inst, edge, Scope::all(1)));
  REQUIRE(ce.edge.size() == 1);
  CHECK(ce.edge[0].second == doctest::Approx(20.0));
  CHECK(ce.cloud == 0.0);
  const CachingConfig cloud = {ServiceSet::of({1})};
  const auto cc = computation_costs(inst, 0, route(inst, cloud, Scope::all(1)));
  CHECK(cc.edge.empty());
  CHECK(cc.cloud == doctest::Approx(50.0));
  CHECK(cc.total() == doctest::Approx(50.0));
}

TEST_CASE("costs agree with the first-principles reference") {
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = random_instance(seed, 2 + static_cast<int>(seed % 5), 2 + static_cast<int>(seed % 4),
                                      3, 250.0, 1 + static_cast<int>(seed % 2));
    const auto a = random_config(inst, rng);
    for (const Scope& scope : {Scope::all(inst.num_bs()), Scope::of(inst.num_bs(), {0})}) {
      CHECK(close_rel(total_cost(inst, a, scope), ref_total_cost(inst, a, scope)));
      for (int n = 0; n < inst.num_bs(); ++n) CHECK(close_rel(sc_cost(inst, n, a, scope), ref_sc_cost(inst, n, a, scope)));
    }
    const auto b = evaluate(inst, a, Scope::all(inst.num_bs()));
    double edge = 0.0, cloud = 0.0, demand = 0.0, utility = 0.0;
    for (int n = 0; n < inst.num_bs(); ++n) {
      CHECK(close_rel(b.per_bs[n].total(), ref_sc_cost(inst, n, a, Scope::all(inst.num_bs()))));
      // U_n + C_n = benefit of registered UEs.
      CHECK(close_rel(b.per_bs[n].utility() + b.per_bs[n].total(), sc_benefit(inst, n)));
      CHECK(close_rel(sc_utility(inst, n, a, Scope::all(inst.num_bs())), b.per_bs[n].utility()));
      edge += b.edge_workload[n];
      cloud += b.cloud_workload[n];
      utility += b.per_bs[n].utility();
    }
    for (int m = 0; m < inst.num_ue(); ++m) demand += inst.demand().total_cycles(m);
    CHECK(close_rel(edge + cloud, demand));
    CHECK(close_rel(b.total_edge_workload, edge));
    CHECK(close_rel(b.total_utility, utility));
  }
}

TEST_CASE("benefits cancel: min total cost and max total utility pick the same config") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto inst = random_instance(seed, 3, 3);
    const auto scope = Scope::all(3);
    CachingConfig by_cost, by_utility;
    double best_cost = 1e300, best_utility = -1e300;
    for_each_config(inst, scope, ncol_config(inst), [&](const CachingConfig& a) {
      const double c = total_cost(inst, a, scope);
      double u = 0.0;
      for (int n = 0; n < 3; ++n) u += sc_utility(inst, n, a, scope);
      if (c < best_cost) {
        best_cost = c;
        by_cost = a;
      }
      if (u > best_utility) {
        best_utility = u;
        by_utility = a;
      }
    });
    // Equal up to rounding: utilities are benefits minus the same costs.
    CHECK(close_rel(total_cost(inst, by_utility, scope), best_cost, 1e-12));
    double u = 0.0;
    for (int n = 0; n < 3; ++n) u += sc_utility(inst, n, by_cost, scope);
    CHECK(close_rel(u, best_utility, 1e-12));
  }
}

TEST_CASE("C_n depends only on decisions inside the closed one-hop neighborhood") {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = random_instance(seed + 200, 7, 4, 3, 400.0);
    const auto scope = Scope::all(7);
    const auto a = random_config(inst, rng);
    for (int n = 0; n < 7; ++n) {
      const auto& omega = inst.graphs().one_hop[n];
      auto b = random_config(inst, rng);
      for (int j : omega) b[j] = a[j];
      CHECK(sc_cost(inst, n, a, scope) == sc_cost(inst, n, b, scope));
    }
  }
}

TEST_CASE("neighborhood cost sums C_n over the closed neighborhood") {
  const auto inst = random_instance(31, 5, 3);
  Rng rng(2);
  const auto a = random_config(inst, rng);
  const auto scope = Scope::all(5);
  for (int i = 0; i < 5; ++i) {
    double expect = 0.0;
    for (int n : inst.graphs().one_hop[i]) expect += sc_cost(inst, n, a, scope);
    CHECK(neighborhood_cost(inst, i, a, scope) == doctest::Approx(expect));
  }
}

TEST_CASE("shrinking the collaboration scope never lowers the optimal cost") {
  int strict = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto inst = random_instance(seed + 300, 4, 3);
    const double full = brute_force(inst, Scope::all(4)).cost;
    const double halves = brute_force(inst, Scope::partition(4, {{0, 1}, {2, 3}})).cost;
    const double alone = brute_force(inst, Scope::partition(4, {{0}, {1}, {2}, {3}})).cost;
    CHECK(full <= halves + 1e-9 * std::abs(halves));
    CHECK(halves <= alone + 1e-9 * std::abs(alone));
    strict += full < alone - 1e-9 ? 1 : 0;
  }
  CHECK(strict > 0);
}

TEST_CASE("cost CSV schema") {
  const auto inst = random_instance(1, 3, 3);
  std::ostringstream os;
  write_cost_csv(os, evaluate(inst, ncol_config(inst), Scope::all(3)));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "bs_id,tx_cost,edge_cost,cloud_cost,total_cost,utility");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
