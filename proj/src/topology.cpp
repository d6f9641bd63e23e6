#include "csc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "csc/error.hpp"
#include "csc/rng.hpp"

namespace csc {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Area::contains(Point p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

bool Deployment::has_reachability() const {
  return std::all_of(user_equipment.begin(), user_equipment.end(),
                     [](const UserEquipment& ue) { return ue.home_bs >= 0 && !ue.reachable.empty(); });
}

namespace {

void check_params(const DeploymentParams& p) {
  if (!(p.area.width > 0.0) || !(p.area.height > 0.0)) throw ConfigError("area", "must be nonempty");
  if (!p.bs_count && !(p.density_bs > 0.0)) throw ConfigError("density_bs", "must be > 0");
  if (!p.ue_count && !(p.density_ue > 0.0)) throw ConfigError("density_ue", "must be > 0");
  if (p.bs_count && *p.bs_count < 0) throw ConfigError("bs_count", "must be >= 0");
  if (p.ue_count && *p.ue_count < 0) throw ConfigError("ue_count", "must be >= 0");
  if (p.cache_capacity < 1) throw ConfigError("cache_capacity", "must be >= 1");
  if (!(p.unit_cost_min > 0.0) || p.unit_cost_max < p.unit_cost_min)
    throw ConfigError("unit_cost", "need 0 < unit_cost_min <= unit_cost_max");
}

Deployment draw_once(const DeploymentParams& p, std::uint64_t seed) {
  Deployment d;
  d.area = p.area;
  d.seed = seed;

  Rng bs_rng(derive_seed(seed, "bs"));
  Rng ue_rng(derive_seed(seed, "ue"));
  const double tiles = p.area.size() / kDensityTileArea;

  auto draw_count = [&](Rng& rng, std::optional<int> fixed, double density) {
    if (fixed) return *fixed;
    std::poisson_distribution<int> count(density * tiles);
    return count(rng);
  };
  std::uniform_real_distribution<double> ux(0.0, p.area.width);
  std::uniform_real_distribution<double> uy(0.0, p.area.height);
  std::uniform_real_distribution<double> ucost(p.unit_cost_min, p.unit_cost_max);

  const int n_bs = draw_count(bs_rng, p.bs_count, p.density_bs);
  d.base_stations.reserve(n_bs);
  for (int i = 0; i < n_bs; ++i) {
    BaseStation bs;
    bs.id = i;
    bs.position.x = ux(bs_rng);
    bs.position.y = uy(bs_rng);
    bs.cache_capacity = p.cache_capacity;
    bs.unit_cost = ucost(bs_rng);
    d.base_stations.push_back(bs);
  }

  const int n_ue = draw_count(ue_rng, p.ue_count, p.density_ue);
  const double power = dbm_to_mw(p.tx_power_dbm);
  d.user_equipment.reserve(n_ue);
  for (int m = 0; m < n_ue; ++m) {
    UserEquipment ue;
    ue.id = m;
    ue.position.x = ux(ue_rng);
    ue.position.y = uy(ue_rng);
    ue.tx_power_mw = power;
    d.user_equipment.push_back(std::move(ue));
  }
  return d;
}

}  // namespace

Deployment generate_deployment(const DeploymentParams& params, std::uint64_t seed) {
  check_params(params);
  Deployment d = draw_once(params, seed);
  if (d.num_bs() > 0) return d;
  if (params.regenerate_on_empty) {
    for (int attempt = 1; attempt <= params.max_regenerate_attempts; ++attempt) {
      d = draw_once(params, derive_seed(seed, static_cast<std::uint64_t>(attempt)));
      if (d.num_bs() > 0) return d;
    }
  }
  throw EmptyDeploymentError("PPP draw produced zero base stations (seed " + std::to_string(seed) + ")");
}

Reachability assign_home_and_reachability(const Deployment& deployment, double radio_radius) {
  if (deployment.num_bs() == 0) throw EmptyDeploymentError("no base stations to associate with");
  Reachability reach;
  reach.home.resize(deployment.num_ue());
  reach.reachable.resize(deployment.num_ue());
  for (const auto& ue : deployment.user_equipment) {
    int home = 0;
    double best = std::numeric_limits<double>::infinity();
    auto& set = reach.reachable[ue.id];
    for (const auto& bs : deployment.base_stations) {
      const double dist = distance(ue.position, bs.position);
      if (dist < best) {
        best = dist;
        home = bs.id;
      }
      if (dist <= radio_radius) set.push_back(bs.id);
    }
    reach.home[ue.id] = home;
    if (!std::binary_search(set.begin(), set.end(), home)) set.insert(std::lower_bound(set.begin(), set.end(), home), home);
  }
  return reach;
}

void apply_reachability(Deployment& deployment, const Reachability& reach) {
  for (auto& ue : deployment.user_equipment) {
    ue.home_bs = reach.home.at(ue.id);
    ue.reachable = reach.reachable.at(ue.id);
  }
}

bool NetworkGraphs::adjacent(int i, int j) const {
  return std::binary_search(physical[i].begin(), physical[i].end(), j);
}

Adjacency make_adjacency(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::set<int>> sets(n);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    sets.at(a).insert(b);
    sets.at(b).insert(a);
  }
  Adjacency adj(n);
  for (int i = 0; i < n; ++i) adj[i].assign(sets[i].begin(), sets[i].end());
  return adj;
}

Adjacency graph_square(const Adjacency& g) {
  const int n = static_cast<int>(g.size());
  Adjacency sq(n);
  for (int i = 0; i < n; ++i) {
    std::set<int> reach(g[i].begin(), g[i].end());
    for (int j : g[i]) reach.insert(g[j].begin(), g[j].end());
    reach.erase(i);
    sq[i].assign(reach.begin(), reach.end());
  }
  return sq;
}

int max_degree(const Adjacency& g) {
  std::size_t d = 0;
  for (const auto& nb : g) d = std::max(d, nb.size());
  return static_cast<int>(d);
}

NetworkGraphs graphs_from_physical(Adjacency physical) {
  NetworkGraphs graphs;
  graphs.physical = std::move(physical);
  const int n = graphs.num_bs();
  graphs.one_hop.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& omega = graphs.one_hop[i];
    omega = graphs.physical[i];
    omega.insert(std::lower_bound(omega.begin(), omega.end(), i), i);
  }
  graphs.mrf = graph_square(graphs.physical);
  graphs.coloring = color_mrf(graphs.mrf);
  return graphs;
}

NetworkGraphs build_graphs(const Deployment& deployment, const NeighborParams& params) {
  const int n = deployment.num_bs();
  std::vector<std::pair<int, int>> edges;
  if (params.rule == NeighborRule::kRadius) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (distance(deployment.base_stations[i].position, deployment.base_stations[j].position) <=
            params.collaboration_range)
          edges.emplace_back(i, j);
  } else {
    if (!deployment.has_reachability()) throw Error("shared-UE neighbor rule needs reachability");
    for (const auto& ue : deployment.user_equipment)
      for (std::size_t a = 0; a < ue.reachable.size(); ++a)
        for (std::size_t b = a + 1; b < ue.reachable.size(); ++b) edges.emplace_back(ue.reachable[a], ue.reachable[b]);
  }
  return graphs_from_physical(make_adjacency(n, edges));
}

Coloring color_mrf(const Adjacency& mrf) {
  const int n = static_cast<int>(mrf.size());
  Coloring out;
  out.color.assign(n, -1);
  if (n == 0) return out;

  std::vector<std::set<int>> neighbor_colors(n);
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = static_cast<int>(mrf[i].size());

  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if (out.color[v] >= 0) continue;
      if (pick < 0) {
        pick = v;
        continue;
      }
      const auto sv = neighbor_colors[v].size();
      const auto sp = neighbor_colors[pick].size();
      if (sv > sp || (sv == sp && degree[v] > degree[pick])) pick = v;
    }
    int c = 0;
    while (neighbor_colors[pick].count(c)) ++c;
    out.color[pick] = c;
    for (int nb : mrf[pick]) {
      if (out.color[nb] >= 0) continue;
      neighbor_colors[nb].insert(c);
      --degree[nb];
    }
  }

  const int colors = *std::max_element(out.color.begin(), out.color.end()) + 1;
  out.colorsets.assign(colors, {});
  for (int v = 0; v < n; ++v) out.colorsets[out.color[v]].push_back(v);
  return out;
}

bool is_proper_coloring(const Adjacency& g, const Coloring& coloring) {
  if (coloring.color.size() != g.size()) return false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (coloring.color[i] < 0) return false;
    for (int j : g[i])
      if (coloring.color[i] == coloring.color[j]) return false;
  }
  return true;
}

double ChannelModel::pathloss_db(double distance_m) const {
  return 20.0 * std::log10(std::max(distance_m, min_distance_m)) + 32.44;
}

double ChannelModel::gain(double distance_m) const { return std::pow(10.0, -pathloss_db(distance_m) / 10.0); }

double ChannelModel::noise_mw() const { return dbm_to_mw(noise_dbm); }

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double shannon_rate(double tx_power_mw, double gain, const ChannelModel& channel) {
  return channel.bandwidth_hz * std::log2(1.0 + tx_power_mw * gain / channel.noise_mw());
}

double uplink_rate(const UserEquipment& ue, const BaseStation& bs, const ChannelModel& channel) {
  return shannon_rate(ue.tx_power_mw, channel.gain(distance(ue.position, bs.position)), channel);
}

void to_json(nlohmann::json& j, const Deployment& d) {
  j = nlohmann::json::object();
  j["area"] = {{"width", d.area.width}, {"height", d.area.height}};
  j["seed"] = d.seed;
  auto& bss = j["base_stations"] = nlohmann::json::array();
  for (const auto& bs : d.base_stations)
    bss.push_back({{"id", bs.id},
                   {"x", bs.position.x},
                   {"y", bs.position.y},
                   {"cache_capacity", bs.cache_capacity},
                   {"unit_cost", bs.unit_cost}});
  auto& ues = j["user_equipment"] = nlohmann::json::array();
  for (const auto& ue : d.user_equipment) {
    nlohmann::json u = {{"id", ue.id}, {"x", ue.position.x}, {"y", ue.position.y}, {"tx_power_mw", ue.tx_power_mw}};
    if (ue.home_bs >= 0) {
      u["home_bs"] = ue.home_bs;
      u["reachable"] = ue.reachable;
    }
    ues.push_back(std::move(u));
  }
}

void from_json(const nlohmann::json& j, Deployment& d) {
  d = Deployment{};
  d.area.width = j.at("area").at("width").get<double>();
  d.area.height = j.at("area").at("height").get<double>();
  d.seed = j.value("seed", std::uint64_t{0});
  for (const auto& b : j.at("base_stations")) {
    BaseStation bs;
    bs.id = b.at("id").get<int>();
    bs.position = {b.at("x").get<double>(), b.at("y").get<double>()};
    bs.cache_capacity = b.value("cache_capacity", 1);
    bs.unit_cost = b.value("unit_cost", 1.0);
    d.base_stations.push_back(bs);
  }
  for (const auto& u : j.at("user_equipment")) {
    UserEquipment ue;
    ue.id = u.at("id").get<int>();
    ue.position = {u.at("x").get<double>(), u.at("y").get<double>()};
    ue.tx_power_mw = u.value("tx_power_mw", 10.0);
    ue.home_bs = u.value("home_bs", -1);
    if (u.contains("reachable")) ue.reachable = u.at("reachable").get<std::vector<int>>();
    d.user_equipment.push_back(std::move(ue));
  }
  for (int i = 0; i < d.num_bs(); ++i)
    if (d.base_stations[i].id != i) throw ConfigError("base_stations", "ids must be contiguous from 0");
  for (int m = 0; m < d.num_ue(); ++m)
    if (d.user_equipment[m].id != m) throw ConfigError("user_equipment", "ids must be contiguous from 0");
  for (const auto& bs : d.base_stations)
    if (!d.area.contains(bs.position)) throw ConfigError("base_stations", "position outside area");
  for (const auto& ue : d.user_equipment)
    if (!d.area.contains(ue.position)) throw ConfigError("user_equipment", "position outside area");
}

}  // namespace csc
