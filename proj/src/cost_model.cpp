#include "csc/cost_model.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <ostream>

#include "csc/error.hpp"
#include "csc/format.hpp"

namespace csc {

ServiceSet ServiceSet::of(std::initializer_list<int> services) {
  ServiceSet s;
  for (int k : services) s.insert(k);
  return s;
}

int ServiceSet::size() const { return std::popcount(bits_); }

std::vector<int> ServiceSet::members() const {
  std::vector<int> out;
  for (int k = 0; k < 64; ++k)
    if (contains(k)) out.push_back(k);
  return out;
}

std::string ServiceSet::to_string() const {
  std::string s;
  for (int k : members()) {
    if (!s.empty()) s += ';';
    s += std::to_string(k);
  }
  return s;
}

Scope Scope::all(int num_bs) {
  Scope s;
  s.group_.assign(num_bs, 0);
  s.active_.assign(num_bs, 1);
  s.members_.resize(num_bs);
  for (int i = 0; i < num_bs; ++i) s.members_[i] = i;
  return s;
}

Scope Scope::of(int num_bs, const std::vector<int>& members) {
  if (members.empty()) throw Error("scope must be nonempty");
  Scope s;
  s.group_.resize(num_bs);
  for (int i = 0; i < num_bs; ++i) s.group_[i] = i + 1;
  s.active_.assign(num_bs, 0);
  for (int n : members) {
    s.group_.at(n) = 0;
    s.active_[n] = 1;
  }
  for (int i = 0; i < num_bs; ++i)
    if (s.active_[i]) s.members_.push_back(i);
  return s;
}

Scope Scope::partition(int num_bs, const std::vector<std::vector<int>>& coalitions) {
  Scope s;
  s.group_.assign(num_bs, -1);
  s.active_.assign(num_bs, 1);
  for (std::size_t g = 0; g < coalitions.size(); ++g)
    for (int n : coalitions[g]) {
      if (s.group_.at(n) >= 0) throw Error("coalitions overlap at BS " + std::to_string(n));
      s.group_[n] = static_cast<int>(g);
    }
  for (int i = 0; i < num_bs; ++i) {
    if (s.group_[i] < 0) throw Error("partition does not cover BS " + std::to_string(i));
    s.members_.push_back(i);
  }
  return s;
}

std::vector<ServiceSet> enumerate_feasible_sets(int num_services, int capacity) {
  std::vector<ServiceSet> out;
  if (capacity < 1 || capacity > num_services) return out;
  std::vector<int> idx(capacity);
  for (int i = 0; i < capacity; ++i) idx[i] = i;
  while (true) {
    ServiceSet s;
    for (int k : idx) s.insert(k);
    out.push_back(s);
    int pos = capacity - 1;
    while (pos >= 0 && idx[pos] == num_services - capacity + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < capacity; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Instance::Instance(Deployment deployment, NetworkGraphs graphs, ServiceCatalog catalog, DemandMatrix demand,
                   ChannelModel channel, double cloud_unit_cost)
    : deployment_(std::move(deployment)),
      graphs_(std::move(graphs)),
      catalog_(std::move(catalog)),
      demand_(std::move(demand)),
      channel_(channel),
      cloud_unit_cost_(cloud_unit_cost) {
  const int N = num_bs();
  const int M = num_ue();
  const int K = num_services();
  if (N == 0) throw EmptyDeploymentError("instance has no base stations");
  if (graphs_.num_bs() != N) throw Error("graphs and deployment disagree on BS count");
  if (demand_.num_ue() != M || demand_.num_services() != K) throw Error("demand matrix shape mismatch");
  if (!deployment_.has_reachability()) throw Error("deployment has no home/reachability assignment");
  catalog_.validate(cloud_unit_cost_);
  for (const auto& bs : deployment_.base_stations) {
    if (!(bs.unit_cost > 0.0) || !(bs.unit_cost < cloud_unit_cost_))
      throw ConfigError("unit_cost", "need 0 < c_n < c_0 for BS " + std::to_string(bs.id));
    if (bs.cache_capacity < 1 || bs.cache_capacity > K)
      throw ConfigError("cache_capacity", "need 1 <= capacity <= K for BS " + std::to_string(bs.id));
  }

  registered_.assign(N, {});
  for (const auto& ue : deployment_.user_equipment) {
    if (!std::binary_search(ue.reachable.begin(), ue.reachable.end(), ue.home_bs))
      throw Error("UE " + std::to_string(ue.id) + " cannot reach its home BS");
    registered_.at(ue.home_bs).push_back(ue.id);
  }

  gain_.assign(M, std::vector<double>(N, 0.0));
  for (const auto& ue : deployment_.user_equipment)
    for (const auto& bs : deployment_.base_stations)
      gain_[ue.id][bs.id] = channel_.gain(distance(ue.position, bs.position));

  candidates_.resize(M);
  for (int m = 0; m < M; ++m) rebuild_candidates(m);

  feasible_.resize(N);
  std::map<int, std::vector<ServiceSet>> by_capacity;
  for (const auto& bs : deployment_.base_stations) {
    auto& sets = by_capacity[bs.cache_capacity];
    if (sets.empty()) sets = enumerate_feasible_sets(K, bs.cache_capacity);
    feasible_[bs.id] = sets;
  }
}

void Instance::rebuild_candidates(int m) {
  const auto& ue = deployment_.user_equipment[m];
  const auto& omega = graphs_.one_hop[ue.home_bs];
  auto& cands = candidates_[m];
  cands.clear();
  for (int n : ue.reachable) {
    if (!std::binary_search(omega.begin(), omega.end(), n)) continue;
    const double r = shannon_rate(ue.tx_power_mw, gain_[m][n], channel_);
    if (r <= 0.0 && n != ue.home_bs) continue;
    cands.push_back({n, gain_[m][n], r});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.bs < b.bs;
  });
}

int Instance::feasible_index(int bs, ServiceSet set) const {
  const auto& f = feasible_[bs];
  auto it = std::find(f.begin(), f.end(), set);
  return it == f.end() ? -1 : static_cast<int>(it - f.begin());
}

double Instance::gain(int ue, int bs) const { return gain_.at(ue).at(bs); }

double Instance::rate(int ue, int bs) const {
  return shannon_rate(deployment_.user_equipment.at(ue).tx_power_mw, gain(ue, bs), channel_);
}

void Instance::override_gain(int ue, int bs, double gain) {
  gain_.at(ue).at(bs) = gain;
  rebuild_candidates(ue);
}

bool is_feasible(const Instance& instance, const CachingConfig& config) {
  if (static_cast<int>(config.size()) != instance.num_bs()) return false;
  for (int n = 0; n < instance.num_bs(); ++n)
    if (instance.feasible_index(n, config[n]) < 0) return false;
  return true;
}

namespace {

// First candidate (best gain) caching `service` inside the home BS's group.
const Candidate* pick_target(const Instance& instance, int ue, int home, int service, const CachingConfig& config,
                             const Scope& scope) {
  for (const auto& c : instance.candidates(ue))
    if (scope.same_group(c.bs, home) && config[c.bs].contains(service)) return &c;
  return nullptr;
}

void check_config(const Instance& instance, const CachingConfig& config) {
  if (static_cast<int>(config.size()) != instance.num_bs()) throw Error("config size differs from BS count");
}

}  // namespace

RoutingPlan route(const Instance& instance, const CachingConfig& config, const Scope& scope) {
  check_config(instance, config);
  const int K = instance.num_services();
  RoutingPlan plan;
  plan.num_services = K;
  plan.routes.resize(static_cast<std::size_t>(instance.num_ue()) * K);
  plan.split.resize(instance.num_ue());
  for (int m = 0; m < instance.num_ue(); ++m) {
    const int home = instance.home(m);
    std::map<int, BsShare> shares;
    auto& split = plan.split[m];
    for (int k = 0; k < K; ++k) {
      const auto& d = instance.demand().at(m, k);
      auto& r = plan.routes[static_cast<std::size_t>(m) * K + k];
      if (const Candidate* c = pick_target(instance, m, home, k, config, scope)) {
        r = {c->bs, false};
        auto& s = shares[c->bs];
        s.bs = c->bs;
        s.lambda_bits += d.lambda_bits;
        s.gamma_edge += d.gamma_cycles;
      } else {
        r = {home, true};
        auto& s = shares[home];
        s.bs = home;
        s.lambda_bits += d.lambda_bits;
        split.gamma_cloud += d.gamma_cycles;
      }
    }
    for (auto& [bs, s] : shares) split.shares.push_back(s);
  }
  return plan;
}

double transmission_cost(const Instance& instance, int ue, const RoutingPlan& plan) {
  double sum = 0.0;
  for (const auto& s : plan.split.at(ue).shares) {
    if (s.lambda_bits == 0.0) continue;
    const double r = instance.rate(ue, s.bs);
    if (!(r > 0.0))
      throw InfeasibleRouteError("UE " + std::to_string(ue) + " sends data to BS " + std::to_string(s.bs) +
                                 " over a zero-rate link");
    sum += s.lambda_bits / r;
  }
  return instance.deployment().user_equipment[ue].tx_power_mw * sum;
}

double ComputationCost::total() const {
  double t = cloud;
  for (const auto& [bs, c] : edge) t += c;
  return t;
}

ComputationCost computation_costs(const Instance& instance, int ue, const RoutingPlan& plan) {
  ComputationCost out;
  const auto& split = plan.split.at(ue);
  for (const auto& s : split.shares)
    if (s.gamma_edge > 0.0) out.edge.emplace_back(s.bs, instance.unit_cost(s.bs) * s.gamma_edge);
  out.cloud = instance.cloud_unit_cost() * split.gamma_cloud;
  return out;
}

CostBreakdown evaluate(const Instance& instance, const CachingConfig& config, const Scope& scope) {
  const RoutingPlan plan = route(instance, config, scope);
  const int N = instance.num_bs();
  CostBreakdown out;
  out.per_bs.resize(N);
  out.edge_workload.assign(N, 0.0);
  out.cloud_workload.assign(N, 0.0);
  for (int m = 0; m < instance.num_ue(); ++m) {
    const int home = instance.home(m);
    auto& c = out.per_bs[home];
    c.tx += transmission_cost(instance, m, plan);
    const auto comp = computation_costs(instance, m, plan);
    for (const auto& [bs, cost] : comp.edge) c.edge += cost;
    c.cloud += comp.cloud;
    c.benefit += instance.demand().total_benefit(m);
    for (const auto& s : plan.split[m].shares) out.edge_workload[s.bs] += s.gamma_edge;
    out.cloud_workload[home] += plan.split[m].gamma_cloud;
  }
  for (int n = 0; n < N; ++n) {
    out.total_cost += out.per_bs[n].total();
    out.total_utility += out.per_bs[n].utility();
    out.total_edge_workload += out.edge_workload[n];
    out.total_cloud_workload += out.cloud_workload[n];
  }
  return out;
}

double ue_cost(const Instance& instance, int ue, const CachingConfig& config, const Scope& scope) {
  const int home = instance.home(ue);
  const auto& cands = instance.candidates(ue);
  const auto& home_cand = *std::find_if(cands.begin(), cands.end(), [home](const Candidate& c) { return c.bs == home; });
  double tx = 0.0;
  double compute = 0.0;
  for (int k = 0; k < instance.num_services(); ++k) {
    const auto& d = instance.demand().at(ue, k);
    if (d.lambda_bits == 0.0 && d.gamma_cycles == 0.0) continue;
    const Candidate* target = pick_target(instance, ue, home, k, config, scope);
    const Candidate& link = target ? *target : home_cand;
    if (d.lambda_bits > 0.0) {
      if (!(link.rate > 0.0))
        throw InfeasibleRouteError("UE " + std::to_string(ue) + " sends data to BS " + std::to_string(link.bs) +
                                   " over a zero-rate link");
      tx += d.lambda_bits / link.rate;
    }
    compute += (target ? instance.unit_cost(target->bs) : instance.cloud_unit_cost()) * d.gamma_cycles;
  }
  return instance.deployment().user_equipment[ue].tx_power_mw * tx + compute;
}

double sc_cost(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope) {
  double c = 0.0;
  for (int m : instance.registered(bs)) c += ue_cost(instance, m, config, scope);
  return c;
}

double sc_benefit(const Instance& instance, int bs) {
  double b = 0.0;
  for (int m : instance.registered(bs)) b += instance.demand().total_benefit(m);
  return b;
}

double sc_utility(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope) {
  return sc_benefit(instance, bs) - sc_cost(instance, bs, config, scope);
}

double total_cost(const Instance& instance, const CachingConfig& config, const Scope& scope) {
  check_config(instance, config);
  double c = 0.0;
  for (int n : scope.active_members()) c += sc_cost(instance, n, config, scope);
  return c;
}

double neighborhood_cost(const Instance& instance, int bs, const CachingConfig& config, const Scope& scope) {
  double c = 0.0;
  for (int n : instance.graphs().one_hop[bs])
    if (scope.active(n)) c += sc_cost(instance, n, config, scope);
  return c;
}

void write_cost_csv(std::ostream& os, const CostBreakdown& breakdown) {
  os << "bs_id,tx_cost,edge_cost,cloud_cost,total_cost,utility\n";
  for (std::size_t n = 0; n < breakdown.per_bs.size(); ++n) {
    const auto& c = breakdown.per_bs[n];
    os << n << ',' << fmt_double(c.tx) << ',' << fmt_double(c.edge) << ',' << fmt_double(c.cloud) << ','
       << fmt_double(c.total()) << ',' << fmt_double(c.utility()) << '\n';
  }
}

}  // namespace csc
