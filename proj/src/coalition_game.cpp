#include "csc/coalition_game.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "csc/error.hpp"
#include "csc/format.hpp"
#include "csc/rng.hpp"

namespace csc {

std::string to_string(Scheme scheme) { return scheme == Scheme::kPlain ? "PC" : "IC"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "PC" || s == "pc" || s == "plain") return Scheme::kPlain;
  if (s == "IC" || s == "ic" || s == "incentivized") return Scheme::kIncentivized;
  throw ConfigError("scheme", "expected PC or IC, got '" + s + "'");
}

SamplerParams CoalitionOptions::default_sampler() {
  SamplerParams p;
  p.annealing = Annealing{10.0, 0.95, 0.05};
  p.max_sweeps = 500;
  p.return_mode = ReturnMode::kBestSeen;
  return p;
}

Division incentivized_utilities(double coalition_value, const std::vector<double>& singleton_values,
                                const std::vector<double>& realized_utilities) {
  const std::size_t n = singleton_values.size();
  if (n == 0 || realized_utilities.size() != n) throw Error("division needs one singleton value per member");
  Division d;
  double sum = 0.0;
  for (double v : singleton_values) sum += v;
  d.equal_weight_fallback =
      std::any_of(singleton_values.begin(), singleton_values.end(), [](double v) { return !(v > 0.0); });
  d.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d.weights[i] = d.equal_weight_fallback ? 1.0 / static_cast<double>(n) : singleton_values[i] / sum;
  const double surplus = coalition_value - sum;
  d.modified.resize(n);
  d.payments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.modified[i] = d.weights[i] * surplus + singleton_values[i];
    d.payments[i] = d.modified[i] - realized_utilities[i];
  }
  return d;
}

bool pareto_dominates(const std::map<int, double>& a, const std::map<int, double>& b, double tolerance) {
  if (a.size() != b.size()) throw Error("Pareto comparison over different SC sets");
  double scale = 1.0;
  for (const auto& [bs, u] : a) scale = std::max(scale, std::abs(u));
  for (const auto& [bs, u] : b) scale = std::max(scale, std::abs(u));
  const double eps = tolerance * scale;
  bool strict = false;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw Error("Pareto comparison over different SC sets");
    if (ia->second < ib->second - eps) return false;
    if (ia->second > ib->second + eps) strict = true;
  }
  return strict;
}

Coalition coalition_value(const Instance& instance, const Members& members, const CoalitionOptions& options) {
  if (members.empty()) throw Error("coalition must be nonempty");
  const Scope scope = Scope::of(instance.num_bs(), members);
  Coalition c;
  c.members = members;
  CachingConfig config;
  if (configuration_space_size(instance, scope) <= options.enumeration_cap) {
    config = solve_exhaustive(instance, scope, options.enumeration_cap).config;
  } else {
    SamplerParams params = options.sampler;
    std::uint64_t seed = options.seed;
    for (int n : members) seed = derive_seed(seed, static_cast<std::uint64_t>(n));
    params.seed = seed;
    config = run_cpgs(instance, params, scope).config;
    c.exact = false;
  }
  for (int n : members) {
    c.config.push_back(config[n]);
    c.utilities.push_back(sc_utility(instance, n, config, scope));
    c.value += c.utilities.back();
  }
  return c;
}

CoalitionGame::CoalitionGame(const Instance& instance, Scheme scheme, CoalitionOptions options)
    : instance_(instance), scheme_(scheme), options_(std::move(options)) {}

const Coalition& CoalitionGame::value(const Members& members) {
  auto it = cache_.find(members);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(members, coalition_value(instance_, members, options_)).first->second;
}

double CoalitionGame::singleton_value(int bs) { return value(Members{bs}).value; }

std::map<int, double> CoalitionGame::payoffs(const Members& members) {
  const Coalition& c = value(members);
  std::map<int, double> out;
  if (scheme_ == Scheme::kPlain) {
    for (std::size_t i = 0; i < members.size(); ++i) out[members[i]] = c.utilities[i];
    return out;
  }
  std::vector<double> singles;
  singles.reserve(members.size());
  for (int n : members) singles.push_back(singleton_value(n));
  const Division d = incentivized_utilities(c.value, singles, c.utilities);
  for (std::size_t i = 0; i < members.size(); ++i) out[members[i]] = d.modified[i];
  return out;
}

std::map<int, double> CoalitionGame::payoffs(const Partition& collection) {
  std::map<int, double> out;
  for (const auto& s : collection) out.merge(payoffs(s));
  return out;
}

double CoalitionGame::system_payoff(const Partition& partition) {
  double total = 0.0;
  for (const auto& [bs, u] : payoffs(partition)) total += u;
  return total;
}

Partition singletons(int num_bs) {
  Partition p;
  for (int n = 0; n < num_bs; ++n) p.push_back({n});
  return p;
}

Partition normalize(Partition partition) {
  for (auto& s : partition) std::sort(s.begin(), s.end());
  std::erase_if(partition, [](const Members& s) { return s.empty(); });
  std::sort(partition.begin(), partition.end(), [](const Members& a, const Members& b) { return a.front() < b.front(); });
  return partition;
}

bool is_partition_of(const Partition& partition, int num_bs) {
  std::vector<int> seen(num_bs, 0);
  for (const auto& s : partition)
    for (int n : s) {
      if (n < 0 || n >= num_bs || seen[n]++) return false;
    }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

namespace {

Members unite(const Members& a, const Members& b) {
  Members u;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

}  // namespace

MoveResult try_merge(CoalitionGame& game, const Partition& partition) {
  MoveResult out;
  const Partition p = normalize(partition);
  const auto& graph = game.instance().graphs().physical;
  std::vector<int> owner(game.instance().num_bs(), -1);
  for (std::size_t c = 0; c < p.size(); ++c)
    for (int n : p[c]) owner[n] = static_cast<int>(c);

  for (std::size_t ci = 0; ci < p.size(); ++ci) {
    std::set<int> partners;
    for (int n : p[ci])
      for (int nb : graph[n])
        if (owner[nb] > static_cast<int>(ci)) partners.insert(owner[nb]);
    for (int cj : partners) {
      ++out.attempts;
      const Members joined = unite(p[ci], p[cj]);
      const auto after = game.payoffs(joined);
      const auto before = game.payoffs(Partition{p[ci], p[cj]});
      if (!pareto_dominates(after, before, game.options().pareto_tolerance)) continue;
      Partition next;
      for (std::size_t c = 0; c < p.size(); ++c)
        if (c != ci && static_cast<int>(c) != cj) next.push_back(p[c]);
      next.push_back(joined);
      out.partition = normalize(std::move(next));
      out.accepted = true;
      out.operation = {Operation::Kind::kMerge, {p[ci], p[cj]}, {joined}, game.system_payoff(out.partition)};
      return out;
    }
  }
  out.partition = p;
  return out;
}

MoveResult try_split(CoalitionGame& game, const Partition& partition) {
  MoveResult out;
  const Partition p = normalize(partition);
  for (std::size_t ci = 0; ci < p.size(); ++ci) {
    const Members& s = p[ci];
    const int size = static_cast<int>(s.size());
    if (size < 2 || size > game.options().max_split_size) continue;
    const auto before = game.payoffs(s);
    // Bit i selects s[i + 1] for the second part; s[0] stays in the first.
    for (unsigned mask = 1; mask < (1U << (size - 1)); ++mask) {
      ++out.attempts;
      Members first{s[0]}, second;
      for (int i = 1; i < size; ++i) ((mask >> (i - 1)) & 1U ? second : first).push_back(s[i]);
      const auto after = game.payoffs(Partition{first, second});
      if (!pareto_dominates(after, before, game.options().pareto_tolerance)) continue;
      Partition next;
      for (std::size_t c = 0; c < p.size(); ++c)
        if (c != ci) next.push_back(p[c]);
      next.push_back(first);
      next.push_back(second);
      out.partition = normalize(std::move(next));
      out.accepted = true;
      out.operation = {Operation::Kind::kSplit, {s}, normalize({first, second}), game.system_payoff(out.partition)};
      return out;
    }
  }
  out.partition = p;
  return out;
}

bool verify_dhp_stability(CoalitionGame& game, const Partition& partition) {
  return !try_merge(game, partition).accepted && !try_split(game, partition).accepted;
}

PayoffReport payoff_report(CoalitionGame& game, const Partition& partition) {
  const Partition p = normalize(partition);
  PayoffReport report;
  report.scheme = game.scheme();
  report.per_bs.resize(game.instance().num_bs());
  for (std::size_t c = 0; c < p.size(); ++c) {
    const Coalition& coal = game.value(p[c]);
    std::vector<double> singles;
    for (int n : p[c]) singles.push_back(game.singleton_value(n));
    const Division d = incentivized_utilities(coal.value, singles, coal.utilities);
    report.equal_weight_fallback = report.equal_weight_fallback || d.equal_weight_fallback;
    double sum = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < p[c].size(); ++i) {
      auto& e = report.per_bs[p[c][i]];
      e.bs = p[c][i];
      e.coalition = static_cast<int>(c);
      e.singleton_value = singles[i];
      e.weight = d.weights[i];
      e.realized_utility = coal.utilities[i];
      if (game.scheme() == Scheme::kIncentivized) {
        e.modified_utility = d.modified[i];
        e.payment = d.payments[i];
      } else {
        e.modified_utility = coal.utilities[i];
        e.payment = 0.0;
      }
      sum += e.payment;
      abs_sum += std::abs(e.payment);
    }
    report.coalition_payments.push_back(sum);
    report.coalition_abs_payments.push_back(abs_sum);
  }
  return report;
}

FormationResult form_coalitions(CoalitionGame& game) {
  const int N = game.instance().num_bs();
  FormationResult result;
  auto& stability = result.stability;
  stability.operation_cap = game.options().operation_cap_factor * N;

  Partition p = singletons(N);
  result.payoff_history.push_back(game.system_payoff(p));
  while (static_cast<int>(stability.accepted.size()) < stability.operation_cap) {
    MoveResult merge = try_merge(game, p);
    stability.merge_attempts += merge.attempts;
    if (merge.accepted) {
      p = merge.partition;
      stability.accepted.push_back(merge.operation);
      result.payoff_history.push_back(merge.operation.system_payoff);
    }
    MoveResult split = try_split(game, p);
    stability.split_attempts += split.attempts;
    if (split.accepted) {
      p = split.partition;
      stability.accepted.push_back(split.operation);
      result.payoff_history.push_back(split.operation.system_payoff);
    }
    if (!merge.accepted && !split.accepted) {
      stability.terminated = true;
      break;
    }
  }
  stability.dhp_stable = stability.terminated && verify_dhp_stability(game, p);
  stability.dc_stable_if_exists = stability.dhp_stable;

  result.partition = p;
  result.config = ncol_config(game.instance());
  for (const auto& s : p) {
    const Coalition& c = game.value(s);
    for (std::size_t i = 0; i < s.size(); ++i) result.config[s[i]] = c.config[i];
  }
  result.payoffs = payoff_report(game, p);
  return result;
}

FormationResult form_coalitions(const Instance& instance, Scheme scheme, const CoalitionOptions& options) {
  CoalitionGame game(instance, scheme, options);
  return form_coalitions(game);
}

std::string to_string(const Partition& partition) {
  std::string s;
  for (const auto& c : partition) {
    s += '{';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(c[i]);
    }
    s += '}';
  }
  return s;
}

nlohmann::json partition_json(CoalitionGame& game, const FormationResult& result) {
  using nlohmann::json;
  json j;
  j["scheme"] = to_string(game.scheme());
  j["terminated"] = result.stability.terminated;
  j["dhp_stable"] = result.stability.dhp_stable;
  j["coalitions"] = json::array();
  for (std::size_t c = 0; c < result.partition.size(); ++c) {
    const auto& s = result.partition[c];
    const Coalition& coal = game.value(s);
    json cfg = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) cfg.push_back({{"bs", s[i]}, {"services", coal.config[i].members()}});
    j["coalitions"].push_back({{"id", c},
                               {"members", s},
                               {"value", coal.value},
                               {"exact", coal.exact},
                               {"config", cfg},
                               {"payment_sum", result.payoffs.coalition_payments[c]}});
  }
  j["bs"] = json::array();
  for (const auto& e : result.payoffs.per_bs)
    j["bs"].push_back({{"id", e.bs},
                       {"coalition", e.coalition},
                       {"singleton_value", e.singleton_value},
                       {"weight", e.weight},
                       {"realized_utility", e.realized_utility},
                       {"modified_utility", e.modified_utility},
                       {"payment", e.payment}});
  j["operations"] = json::array();
  for (const auto& op : result.stability.accepted)
    j["operations"].push_back({{"kind", op.kind == Operation::Kind::kMerge ? "merge" : "split"},
                               {"before", op.before},
                               {"after", op.after},
                               {"system_payoff", op.system_payoff}});
  return j;
}

void write_payments_csv(std::ostream& os, const PayoffReport& report) {
  os << "bs_id,coalition,singleton_value,weight,realized_utility,modified_utility,payment\n";
  for (const auto& e : report.per_bs)
    os << e.bs << ',' << e.coalition << ',' << fmt_double(e.singleton_value) << ',' << fmt_double(e.weight) << ','
       << fmt_double(e.realized_utility) << ',' << fmt_double(e.modified_utility) << ',' << fmt_double(e.payment)
       << '\n';
}

}  // namespace csc
