#include <doctest.h>

#include <cmath>
#include <queue>

#include <nlohmann/json.hpp>

#include "csc/error.hpp"
#include "csc/rng.hpp"
#include "csc/topology.hpp"
#include "support.hpp"

using namespace csc;

namespace {

Deployment points(std::vector<Point> bs, std::vector<Point> ue) {
  Deployment d;
  d.area = {1000.0, 1000.0};
  for (std::size_t i = 0; i < bs.size(); ++i) d.base_stations.push_back({static_cast<int>(i), bs[i], 1, 1.0});
  for (std::size_t i = 0; i < ue.size(); ++i) {
    UserEquipment u;
    u.id = static_cast<int>(i);
    u.position = ue[i];
    d.user_equipment.push_back(u);
  }
  return d;
}

// BFS distances, used as the reference for the graph square.
std::vector<int> hops_from(const Adjacency& g, int src) {
  std::vector<int> dist(g.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

Adjacency random_graph(std::uint64_t seed, int n, double p) {
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return make_adjacency(n, edges);
}

}  // namespace

TEST_CASE("deployment is deterministic per seed and differs across seeds") {
  DeploymentParams p;
  const auto a = generate_deployment(p, 42);
  const auto b = generate_deployment(p, 42);
  const auto c = generate_deployment(p, 43);
  CHECK(nlohmann::json(a).dump() == nlohmann::json(b).dump());
  CHECK(nlohmann::json(a).dump() != nlohmann::json(c).dump());
  for (const auto& bs : a.base_stations) {
    CHECK(a.area.contains(bs.position));
    CHECK(bs.unit_cost >= p.unit_cost_min);
    CHECK(bs.unit_cost <= p.unit_cost_max);
  }
  for (const auto& ue : a.user_equipment) CHECK(ue.tx_power_mw == doctest::Approx(10.0));
}

TEST_CASE("PPP counts average to density times area") {
  DeploymentParams p;
  const double expect_bs = p.density_bs * p.area.size() / kDensityTileArea;
  const double expect_ue = p.density_ue * p.area.size() / kDensityTileArea;
  CHECK(expect_bs == doctest::Approx(13.0));
  CHECK(expect_ue == doctest::Approx(72.0));
  double sum_bs = 0.0, sum_ue = 0.0;
  const int runs = 2000;
  for (int s = 0; s < runs; ++s) {
    const auto d = generate_deployment(p, 1000 + s);
    sum_bs += d.num_bs();
    sum_ue += d.num_ue();
  }
  // Standard error of the mean: sqrt(13/2000) ~ 0.08, sqrt(72/2000) ~ 0.19.
  CHECK(std::abs(sum_bs / runs - expect_bs) < 0.4);
  CHECK(std::abs(sum_ue / runs - expect_ue) < 1.0);
}

TEST_CASE("empty BS draw raises, regeneration recovers") {
  DeploymentParams p;
  p.bs_count = 0;
  CHECK_THROWS_AS(generate_deployment(p, 1), EmptyDeploymentError);
  DeploymentParams q;
  q.density_bs = 1e-4;  // expected 0.0025 BS in the area
  CHECK_THROWS_AS(generate_deployment(q, 3), EmptyDeploymentError);
  q.density_bs = 0.02;  // expected 0.5 BS: some draws are empty, regeneration finds one
  q.regenerate_on_empty = true;
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(generate_deployment(q, s).num_bs() > 0);
  DeploymentParams bad;
  bad.density_bs = -1.0;
  CHECK_THROWS_AS(generate_deployment(bad, 1), ConfigError);
}

TEST_CASE("home is the nearest BS, ties to the lowest id") {
  auto d = points({{0, 0}, {100, 0}, {200, 0}}, {{50, 0}, {160, 0}, {10, 0}});
  const auto r = assign_home_and_reachability(d, 150.0);
  CHECK(r.home[0] == 0);  // equidistant from 0 and 1
  CHECK(r.home[1] == 2);
  CHECK(r.home[2] == 0);
}

TEST_CASE("reachability radius threshold and home membership") {
  auto d = points({{0, 0}, {160, 0}, {140, 0}}, {{0, 0}, {600, 600}});
  const auto r = assign_home_and_reachability(d, 150.0);
  CHECK(r.reachable[0] == std::vector<int>{0, 2});  // 160 m excluded, 140 m included
  // A UE beyond every radius still reaches its home.
  CHECK(r.reachable[1] == std::vector<int>{r.home[1]});
  apply_reachability(d, r);
  CHECK(d.has_reachability());
}

TEST_CASE("radius neighbor rule and shared-UE rule") {
  auto d = points({{0, 0}, {140, 0}, {300, 0}}, {{70, 0}, {220, 0}});
  apply_reachability(d, assign_home_and_reachability(d, 150.0));
  const auto radius = build_graphs(d, {NeighborRule::kRadius, 150.0});
  CHECK(radius.physical[0] == std::vector<int>{1});
  CHECK(radius.physical[1] == std::vector<int>{0});
  CHECK(radius.physical[2].empty());
  const auto shared = build_graphs(d, {NeighborRule::kSharedUe, 0.0});
  // UE0 reaches 0 and 1; UE1 at 220 reaches 1 (80 m) and 2 (80 m).
  CHECK(shared.physical[1] == std::vector<int>{0, 2});
}

TEST_CASE("path a-b-c: blankets and one-hop neighborhoods") {
  const auto g = graphs_from_physical(make_adjacency(3, {{0, 1}, {1, 2}}));
  CHECK(g.blanket(0) == std::vector<int>{1, 2});
  CHECK(g.blanket(1) == std::vector<int>{0, 2});
  CHECK(g.blanket(2) == std::vector<int>{0, 1});
  CHECK(g.one_hop[0] == std::vector<int>{0, 1});
  CHECK(g.one_hop[1] == std::vector<int>{0, 1, 2});
  CHECK(g.coloring.num_colors() == 3);
}

TEST_CASE("graph square matches BFS distance <= 2") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto g = random_graph(s, 12, 0.2);
    const auto sq = graph_square(g);
    for (int i = 0; i < 12; ++i) {
      const auto dist = hops_from(g, i);
      std::vector<int> expect;
      for (int j = 0; j < 12; ++j)
        if (j != i && dist[j] > 0 && dist[j] <= 2) expect.push_back(j);
      CHECK(sq[i] == expect);
    }
  }
}

TEST_CASE("coloring: clique, edgeless, circle") {
  std::vector<std::pair<int, int>> clique;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) clique.emplace_back(i, j);
  CHECK(color_mrf(make_adjacency(4, clique)).num_colors() == 4);
  const auto edgeless = color_mrf(make_adjacency(5, {}));
  CHECK(edgeless.num_colors() == 1);
  CHECK(edgeless.colorsets[0] == std::vector<int>{0, 1, 2, 3, 4});

  const auto circle = graphs_from_physical(make_adjacency(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}));
  CHECK(circle.coloring.num_colors() == 3);
  CHECK(is_proper_coloring(circle.mrf, circle.coloring));
  // Chromatic number of C6 squared is 3, so DSATUR is optimal here.
  for (const auto& set : circle.coloring.colorsets) CHECK(set.size() == 2);
}

TEST_CASE("random G(10, 0.3) squares are properly colored within max degree + 1") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = graphs_from_physical(random_graph(s + 7, 10, 0.3));
    REQUIRE(is_proper_coloring(g.mrf, g.coloring));
    CHECK(g.coloring.num_colors() <= max_degree(g.mrf) + 1);
    // Independent edge scan; colorsets partition the vertices.
    int covered = 0;
    for (int c = 0; c < g.coloring.num_colors(); ++c) {
      const auto& set = g.coloring.colorsets[c];
      CHECK(!set.empty());
      CHECK(std::is_sorted(set.begin(), set.end()));
      covered += static_cast<int>(set.size());
      for (int u : set) {
        CHECK(g.coloring.color[u] == c);
        for (int v : g.mrf[u]) CHECK(g.coloring.color[v] != c);
      }
    }
    CHECK(covered == 10);
  }
}

TEST_CASE("improper coloring is detected") {
  const auto g = make_adjacency(2, {{0, 1}});
  Coloring bad;
  bad.color = {0, 0};
  bad.colorsets = {{0, 1}};
  CHECK_FALSE(is_proper_coloring(g, bad));
}

TEST_CASE("uplink rate") {
  ChannelModel ch;
  // P H / N0 = 1 gives r = W.
  const double n0 = std::pow(10.0, ch.noise_dbm / 10.0);
  CHECK(shannon_rate(1.0, n0, ch) == doctest::Approx(ch.bandwidth_hz).epsilon(1e-12));
  CHECK(shannon_rate(10.0, 0.0, ch) == 0.0);
  CHECK(dbm_to_mw(10.0) == doctest::Approx(10.0));
  CHECK(dbm_to_mw(-100.0) == doctest::Approx(1e-10));

  // 10 dBm at 50 m, evaluated by hand.
  const double pl_db = 20.0 * std::log10(50.0) + 32.44;
  CHECK(ch.pathloss_db(50.0) == doctest::Approx(pl_db).epsilon(1e-12));
  const double h = std::pow(10.0, -pl_db / 10.0);
  const double r = 20e6 * std::log2(1.0 + 10.0 * h / 1e-10);
  UserEquipment ue;
  ue.position = {50.0, 0.0};
  ue.tx_power_mw = 10.0;
  BaseStation bs;
  CHECK(uplink_rate(ue, bs, ch) == doctest::Approx(r).epsilon(1e-12));
  CHECK(r == doctest::Approx(2.8955e8).epsilon(1e-3));

  // Clamp below the minimum distance.
  CHECK(ch.gain(0.2) == ch.gain(1.0));
  CHECK(ch.gain(10.0) > ch.gain(20.0));
}

TEST_CASE("deployment JSON round trip and validation") {
  DeploymentParams p;
  auto d = generate_deployment(p, 9);
  apply_reachability(d, assign_home_and_reachability(d, 150.0));
  const nlohmann::json j = d;
  const Deployment back = j.get<Deployment>();
  CHECK(nlohmann::json(back).dump() == j.dump());
  nlohmann::json broken = j;
  broken["base_stations"][0]["x"] = -5.0;
  CHECK_THROWS(broken.get<Deployment>());
}

TEST_CASE("enlarging the collaboration range never removes edges") {
  DeploymentParams p;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto d = generate_deployment(p, 300 + s);
    apply_reachability(d, assign_home_and_reachability(d, 150.0));
    Adjacency prev;
    for (double range : {50.0, 100.0, 150.0, 200.0, 300.0}) {
      const auto g = build_graphs(d, {NeighborRule::kRadius, range});
      if (!prev.empty())
        for (std::size_t i = 0; i < prev.size(); ++i)
          for (int j : prev[i]) CHECK(std::binary_search(g.physical[i].begin(), g.physical[i].end(), j));
      prev = g.physical;
    }
  }
}
