#include "csc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <ostream>

#include "csc/error.hpp"
#include "csc/format.hpp"
#include "csc/rng.hpp"

namespace csc {

ServiceSet solve_ncol(const Instance& instance, int bs) {
  const int K = instance.num_services();
  std::vector<double> popularity(K, 0.0);
  for (int m : instance.registered(bs))
    for (int k = 0; k < K; ++k) popularity[k] += instance.demand().at(m, k).gamma_cycles;
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return popularity[a] > popularity[b]; });
  ServiceSet set;
  const int capacity = instance.deployment().base_stations[bs].cache_capacity;
  for (int i = 0; i < capacity; ++i) set.insert(order[i]);
  return set;
}

CachingConfig ncol_config(const Instance& instance) {
  CachingConfig config(instance.num_bs());
  for (int n = 0; n < instance.num_bs(); ++n) config[n] = solve_ncol(instance, n);
  return config;
}

std::vector<double> boltzmann(std::span<const double> costs, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature", "must be > 0");
  std::vector<double> p(costs.size());
  if (costs.empty()) return p;
  const double lowest = *std::min_element(costs.begin(), costs.end());
  double z = 0.0;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    p[j] = std::exp(-(costs[j] - lowest) / tau);
    z += p[j];
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> gibbs_conditional(const Instance& instance, int bs, const CachingConfig& config, double tau,
                                      const Scope& scope) {
  const auto& options = instance.feasible_sets(bs);
  CachingConfig local = config;
  std::vector<double> costs(options.size());
  for (std::size_t j = 0; j < options.size(); ++j) {
    local[bs] = options[j];
    costs[j] = neighborhood_cost(instance, bs, local, scope);
  }
  return boltzmann(costs, tau);
}

double SamplerParams::temperature_at(int sweep) const {
  if (!annealing) return temperature;
  return std::max(annealing->tau_min, annealing->tau_start * std::pow(annealing->decay, sweep));
}

bool SamplerParams::at_final_temperature(int sweep) const {
  return !annealing || temperature_at(sweep) <= annealing->tau_min;
}

void SamplerParams::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("sampler.temperature", "must be > 0");
  if (annealing) {
    if (!(annealing->tau_min > 0.0)) throw ConfigError("sampler.annealing.tau_min", "must be > 0");
    if (!(annealing->decay > 0.0) || annealing->decay > 1.0)
      throw ConfigError("sampler.annealing.decay", "must be in (0, 1]");
    if (!(annealing->tau_start > 0.0)) throw ConfigError("sampler.annealing.tau_start", "must be > 0");
  }
  if (max_sweeps < 1) throw ConfigError("sampler.max_sweeps", "must be >= 1");
  if (window < 1) throw ConfigError("sampler.window", "must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("sampler.tolerance", "must be > 0");
  if (restarts < 1) throw ConfigError("sampler.restarts", "must be >= 1");
}

namespace {

using Schedule = std::vector<std::vector<int>>;

int draw(Rng& rng, const std::vector<double>& p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    if (x < p[j]) return static_cast<int>(j);
    x -= p[j];
  }
  return static_cast<int>(p.size()) - 1;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

std::vector<int> indices_of(const Instance& instance, const CachingConfig& config) {
  std::vector<int> idx(config.size());
  for (std::size_t n = 0; n < config.size(); ++n) idx[n] = instance.feasible_index(static_cast<int>(n), config[n]);
  return idx;
}

SamplerResult run_chain(const Instance& instance, const SamplerParams& params, const Scope& scope,
                        const Schedule& schedule) {
  params.validate();
  const int N = instance.num_bs();
  if (scope.num_bs() != N) throw Error("scope size differs from BS count");

  CachingConfig config = params.initial ? *params.initial : ncol_config(instance);
  if (!is_feasible(instance, config)) throw Error("initial configuration is infeasible");

  std::vector<Rng> streams;
  streams.reserve(N);
  for (int n = 0; n < N; ++n) streams.emplace_back(derive_seed(params.seed, static_cast<std::uint64_t>(n)));

  SamplerResult result;
  auto& trace = result.trace;
  trace.rounds_per_sweep = static_cast<int>(schedule.size());
  trace.initial_cost = total_cost(instance, config, scope);

  CachingConfig best = config;
  double best_cost = trace.initial_cost;
  std::vector<std::vector<double>> previous(N), current(N);
  int stable_sweeps = 0;
  long long rounds = 0;

  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    const double tau = params.temperature_at(sweep);
    for (const auto& step : schedule) {
      // Every member reads the same snapshot; writes land after the step.
      std::vector<std::vector<double>> dists(step.size());
      if (params.parallel && step.size() > 1) {
        std::vector<std::future<std::vector<double>>> jobs;
        jobs.reserve(step.size());
        for (int bs : step)
          jobs.push_back(std::async(std::launch::async, [&, bs] {
            return gibbs_conditional(instance, bs, config, tau, scope);
          }));
        for (std::size_t s = 0; s < step.size(); ++s) dists[s] = jobs[s].get();
      } else {
        for (std::size_t s = 0; s < step.size(); ++s) dists[s] = gibbs_conditional(instance, step[s], config, tau, scope);
      }
      for (std::size_t s = 0; s < step.size(); ++s) {
        const int bs = step[s];
        config[bs] = instance.feasible_sets(bs)[draw(streams[bs], dists[s])];
        current[bs] = std::move(dists[s]);
      }
      ++rounds;
    }

    const double cost = total_cost(instance, config, scope);
    if (cost < best_cost) {
      best_cost = cost;
      best = config;
    }
    trace.sweeps.push_back({sweep, tau, rounds, cost, best_cost});
    if (params.record_conditionals) trace.conditionals.push_back(current);
    if (params.record_visits) ++trace.visits[indices_of(instance, config)];

    if (sweep > 0) {
      double change = 0.0;
      for (int bs : scope.active_members()) change = std::max(change, l1_distance(current[bs], previous[bs]));
      stable_sweeps = change < params.tolerance ? stable_sweeps + 1 : 0;
    }
    previous = current;
    if (params.stop_on_convergence && stable_sweeps >= params.window && params.at_final_temperature(sweep)) {
      trace.converged = true;
      trace.converged_at = sweep;
      break;
    }
  }
  trace.not_converged_warning = params.stop_on_convergence && !trace.converged;

  if (params.return_mode == ReturnMode::kBestSeen) {
    result.config = std::move(best);
    result.cost = best_cost;
  } else {
    result.config = std::move(config);
    result.cost = total_cost(instance, result.config, scope);
  }
  return result;
}

SamplerResult run_chains(const Instance& instance, const SamplerParams& params, const Scope& scope,
                         const Schedule& schedule) {
  SamplerResult best = run_chain(instance, params, scope, schedule);
  for (int r = 1; r < params.restarts; ++r) {
    SamplerParams p = params;
    p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(r));
    SamplerResult next = run_chain(instance, p, scope, schedule);
    if (next.cost < best.cost) best = std::move(next);
  }
  return best;
}

}  // namespace

SamplerResult run_cpgs(const Instance& instance, const SamplerParams& params, const Scope& scope) {
  Schedule schedule;
  for (const auto& colorset : instance.graphs().coloring.colorsets) {
    std::vector<int> members;
    for (int bs : colorset)
      if (scope.active(bs)) members.push_back(bs);
    if (!members.empty()) schedule.push_back(std::move(members));
  }
  return run_chains(instance, params, scope, schedule);
}

SamplerResult run_sequential_gs(const Instance& instance, const SamplerParams& params, const Scope& scope) {
  Schedule schedule;
  for (int bs : scope.active_members()) schedule.push_back({bs});
  return run_chains(instance, params, scope, schedule);
}

std::uint64_t configuration_space_size(const Instance& instance, const Scope& scope) {
  std::uint64_t size = 1;
  for (int bs : scope.active_members()) {
    const std::uint64_t f = instance.feasible_sets(bs).size();
    if (f != 0 && size > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    size *= f;
  }
  return size;
}

ExhaustiveResult solve_exhaustive(const Instance& instance, const Scope& scope, std::uint64_t cap) {
  const std::uint64_t space = configuration_space_size(instance, scope);
  if (space > cap)
    throw EnumerationCapError("configuration space " + std::to_string(space) + " exceeds enumeration cap " +
                              std::to_string(cap) + "; use the CPGS solver");
  const auto& members = scope.active_members();
  CachingConfig config = ncol_config(instance);
  std::vector<int> idx(members.size(), 0);
  for (std::size_t s = 0; s < members.size(); ++s) config[members[s]] = instance.feasible_sets(members[s])[0];

  ExhaustiveResult result;
  result.cost = std::numeric_limits<double>::infinity();
  while (true) {
    const double cost = total_cost(instance, config, scope);
    ++result.evaluated;
    if (cost < result.cost) {
      result.cost = cost;
      result.config = config;
    }
    // Odometer with the last member fastest: lexicographic order.
    int pos = static_cast<int>(members.size()) - 1;
    while (pos >= 0) {
      const int bs = members[pos];
      const auto& options = instance.feasible_sets(bs);
      if (++idx[pos] < static_cast<int>(options.size())) {
        config[bs] = options[idx[pos]];
        break;
      }
      idx[pos] = 0;
      config[bs] = options[0];
      --pos;
    }
    if (pos < 0) break;
  }
  return result;
}

std::string config_key(const std::vector<int>& indices) {
  std::string s;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(indices[i]);
  }
  return s;
}

void write_trace_csv(std::ostream& os, const SamplerTrace& trace) {
  os << "sweep,total_cost,best_cost\n";
  for (const auto& r : trace.sweeps)
    os << r.sweep << ',' << fmt_double(r.total_cost) << ',' << fmt_double(r.best_cost) << '\n';
}

void write_visits_csv(std::ostream& os, const SamplerTrace& trace) {
  os << "config,count\n";
  for (const auto& [key, count] : trace.visits) os << config_key(key) << ',' << count << '\n';
}

}  // namespace csc
