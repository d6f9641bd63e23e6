#pragma once

// Physical deployment of base stations (BS) and user equipment (UE), the
// derived BS graphs (neighbor graph, two-hop MRF, coloring) and the uplink
// channel.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace csc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

// Axis-aligned rectangle [0, width] x [0, height], meters.
struct Area {
  double width = 500.0;
  double height = 500.0;

  double size() const { return width * height; }
  bool contains(Point p) const;
};

struct BaseStation {
  int id = 0;
  Point position;
  int cache_capacity = 1;   // services cached simultaneously
  double unit_cost = 1.0;   // c_n, cost per cycle
};

struct UserEquipment {
  int id = 0;
  Point position;
  double tx_power_mw = 10.0;
  int home_bs = -1;          // filled by assign_home_and_reachability
  std::vector<int> reachable;  // N_m, sorted, contains home_bs
};

struct Deployment {
  Area area;
  std::vector<BaseStation> base_stations;
  std::vector<UserEquipment> user_equipment;
  std::uint64_t seed = 0;

  int num_bs() const { return static_cast<int>(base_stations.size()); }
  int num_ue() const { return static_cast<int>(user_equipment.size()); }
  bool has_reachability() const;
};

// Densities are expected counts per 100 m x 100 m tile.
inline constexpr double kDensityTileArea = 100.0 * 100.0;

struct DeploymentParams {
  Area area;
  double density_bs = 0.52;
  double density_ue = 2.88;
  // Fixed counts replace the Poisson draw (binomial point process).
  std::optional<int> bs_count;
  std::optional<int> ue_count;
  int cache_capacity = 1;
  double unit_cost_min = 1.0;
  double unit_cost_max = 4.0;
  double tx_power_dbm = 10.0;
  // Redraw with a derived seed instead of failing when no BS is generated.
  bool regenerate_on_empty = false;
  int max_regenerate_attempts = 64;
};

// Homogeneous PPP placement; deterministic given `seed`.
// Throws EmptyDeploymentError when no BS is drawn (unless regeneration is on).
Deployment generate_deployment(const DeploymentParams& params, std::uint64_t seed);

struct Reachability {
  std::vector<int> home;                    // n_m
  std::vector<std::vector<int>> reachable;  // N_m, sorted
};

// Home = nearest BS (ties to lowest id); N_m = BSs within radio_radius plus home.
Reachability assign_home_and_reachability(const Deployment& deployment, double radio_radius);
void apply_reachability(Deployment& deployment, const Reachability& reach);

// Sorted neighbor lists, symmetric, loop-free.
using Adjacency = std::vector<std::vector<int>>;

enum class NeighborRule { kRadius, kSharedUe };

struct NeighborParams {
  NeighborRule rule = NeighborRule::kRadius;
  double collaboration_range = 150.0;
};

struct Coloring {
  std::vector<int> color;                 // per BS, 0-based
  std::vector<std::vector<int>> colorsets;  // l_0 .. l_{L-1}, ascending ids
  int num_colors() const { return static_cast<int>(colorsets.size()); }
};

struct NetworkGraphs {
  Adjacency physical;                  // G
  std::vector<std::vector<int>> one_hop;  // Omega_i: i plus its G-neighbors
  Adjacency mrf;                       // square of G
  Coloring coloring;

  int num_bs() const { return static_cast<int>(physical.size()); }
  // Markov blanket: BSs within two hops of i on G, excluding i.
  const std::vector<int>& blanket(int i) const { return mrf[i]; }
  bool adjacent(int i, int j) const;
};

// Requires reachability to be applied to the deployment.
NetworkGraphs build_graphs(const Deployment& deployment, const NeighborParams& params);
// Same derivation from an explicit physical graph.
NetworkGraphs graphs_from_physical(Adjacency physical);

Adjacency make_adjacency(int n, const std::vector<std::pair<int, int>>& edges);
Adjacency graph_square(const Adjacency& g);
int max_degree(const Adjacency& g);

// DSATUR: highest saturation first, ties by uncolored degree then lowest id.
Coloring color_mrf(const Adjacency& mrf);
bool is_proper_coloring(const Adjacency& g, const Coloring& coloring);

// Free-space pathloss 20 log10(D) + 32.44 dB with D in meters, D clamped.
struct ChannelModel {
  double bandwidth_hz = 20e6;
  double noise_dbm = -100.0;
  double min_distance_m = 1.0;

  double pathloss_db(double distance_m) const;
  double gain(double distance_m) const;  // linear, in (0, 1]
  double noise_mw() const;
};

double dbm_to_mw(double dbm);

// W log2(1 + P H / N0).
double shannon_rate(double tx_power_mw, double gain, const ChannelModel& channel);
double uplink_rate(const UserEquipment& ue, const BaseStation& bs, const ChannelModel& channel);

void to_json(nlohmann::json& j, const Deployment& d);
void from_json(const nlohmann::json& j, Deployment& d);

}  // namespace csc
