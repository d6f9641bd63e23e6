#include "csc/scenario.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "csc/error.hpp"
#include "csc/format.hpp"
#include "csc/rng.hpp"

namespace csc {

using nlohmann::json;

namespace {

// Walks one JSON object, consuming known keys and rejecting the rest.
class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) { return j_.at(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  Reader child(const std::string& key) { return Reader(j_.at(key), field(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

std::pair<double, double> read_range(Reader& r, const std::string& key, std::pair<double, double> def) {
  std::vector<double> v;
  r.get(key, v);
  if (!r.has(key)) return def;
  if (v.size() != 2) throw ConfigError(r.field(key), "expected [lo, hi]");
  return {v[0], v[1]};
}

std::vector<double> read_per_service(Reader& r, const std::string& key, int num_services, double def) {
  if (!r.has(key)) return std::vector<double>(num_services, def);
  const json& v = r.raw(key);
  if (v.is_number()) return std::vector<double>(num_services, v.get<double>());
  if (!v.is_array()) throw ConfigError(r.field(key), "expected a number or an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(r.field(key), "array entries must be numbers");
    out.push_back(x.get<double>());
  }
  if (static_cast<int>(out.size()) != num_services) throw ConfigError(r.field(key), "length must equal num_services");
  return out;
}

ReturnMode return_mode_from_string(const std::string& s) {
  if (s == "best_seen") return ReturnMode::kBestSeen;
  if (s == "last_sampled") return ReturnMode::kLastSampled;
  throw ConfigError("sampler.return_mode", "expected best_seen or last_sampled");
}

void read_sampler(Reader r, SamplerParams& p) {
  r.get("temperature", p.temperature);
  if (r.has("annealing")) {
    Reader a = r.child("annealing");
    Annealing ann;
    a.get("tau_start", ann.tau_start);
    a.get("decay", ann.decay);
    a.get("tau_min", ann.tau_min);
    a.finish();
    p.annealing = ann;
  }
  r.get("max_sweeps", p.max_sweeps);
  r.get("window", p.window);
  r.get("tolerance", p.tolerance);
  r.get("stop_on_convergence", p.stop_on_convergence);
  std::string mode;
  r.get("return_mode", mode);
  if (!mode.empty()) p.return_mode = return_mode_from_string(mode);
  r.get("parallel", p.parallel);
  r.get("restarts", p.restarts);
  r.finish();
}

json sampler_json(const SamplerParams& p) {
  json j = {{"temperature", p.temperature},
            {"max_sweeps", p.max_sweeps},
            {"window", p.window},
            {"tolerance", p.tolerance},
            {"stop_on_convergence", p.stop_on_convergence},
            {"return_mode", p.return_mode == ReturnMode::kBestSeen ? "best_seen" : "last_sampled"},
            {"parallel", p.parallel},
            {"restarts", p.restarts}};
  if (p.annealing)
    j["annealing"] = {{"tau_start", p.annealing->tau_start}, {"decay", p.annealing->decay}, {"tau_min", p.annealing->tau_min}};
  else
    j["annealing"] = nullptr;
  return j;
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto& d = deployment;
  if (!(d.area.width > 0.0) || !(d.area.height > 0.0)) throw ConfigError("area", "width and height must be > 0");
  if (!d.bs_count && !(d.density_bs > 0.0)) throw ConfigError("density_bs", "must be > 0");
  if (!d.ue_count && !(d.density_ue > 0.0)) throw ConfigError("density_ue", "must be > 0");
  if (d.bs_count && *d.bs_count < 1) throw ConfigError("bs_count", "must be >= 1");
  if (d.ue_count && *d.ue_count < 0) throw ConfigError("ue_count", "must be >= 0");
  if (!(d.unit_cost_min > 0.0) || d.unit_cost_max < d.unit_cost_min)
    throw ConfigError("unit_cost_range", "need 0 < lo <= hi");
  if (!(cloud_unit_cost > d.unit_cost_max)) throw ConfigError("cloud_unit_cost", "must exceed every c_n (c_0 > max c_n)");
  catalog.validate(cloud_unit_cost);
  if (d.cache_capacity < 1 || d.cache_capacity > catalog.size())
    throw ConfigError("cache_capacity", "must be in [1, num_services]");
  if (!(radio_radius > 0.0)) throw ConfigError("radio_radius", "must be > 0");
  if (neighbors.collaboration_range < 0.0) throw ConfigError("collaboration_range", "must be >= 0");
  if (!(channel.bandwidth_hz > 0.0)) throw ConfigError("channel.bandwidth_hz", "must be > 0");
  if (!(channel.min_distance_m > 0.0)) throw ConfigError("channel.min_distance_m", "must be > 0");
  if (rate_range.lo < 0.0 || rate_range.hi < rate_range.lo) throw ConfigError("rate_range", "need 0 <= lo <= hi");
  sampler.validate();
  coalition.sampler.validate();
  if (coalition.enumeration_cap < 1) throw ConfigError("coalition.enumeration_cap", "must be >= 1");
  if (coalition.max_split_size < 2) throw ConfigError("coalition.max_split_size", "must be >= 2");
  if (coalition.max_split_size > 20) throw ConfigError("coalition.max_split_size", "must be <= 20");
  if (!(coalition.pareto_tolerance >= 0.0)) throw ConfigError("coalition.pareto_tolerance", "must be >= 0");
  if (coalition.operation_cap_factor < 1) throw ConfigError("coalition.operation_cap_factor", "must be >= 1");
}

ScenarioConfig load_config(const json& j) {
  ScenarioConfig c;
  if (j.is_null()) return c;
  Reader r(j, "");
  r.get("seed", c.seed);
  if (r.has("area")) {
    Reader a = r.child("area");
    a.get("width", c.deployment.area.width);
    a.get("height", c.deployment.area.height);
    a.finish();
  }
  r.get("density_bs", c.deployment.density_bs);
  r.get("density_ue", c.deployment.density_ue);
  if (r.has("bs_count")) {
    int n = 0;
    r.get("bs_count", n);
    c.deployment.bs_count = n;
  }
  if (r.has("ue_count")) {
    int n = 0;
    r.get("ue_count", n);
    c.deployment.ue_count = n;
  }
  r.get("regenerate_on_empty", c.deployment.regenerate_on_empty);
  r.get("cache_capacity", c.deployment.cache_capacity);
  r.get("tx_power_dbm", c.deployment.tx_power_dbm);
  std::tie(c.deployment.unit_cost_min, c.deployment.unit_cost_max) =
      read_range(r, "unit_cost_range", {c.deployment.unit_cost_min, c.deployment.unit_cost_max});
  r.get("cloud_unit_cost", c.cloud_unit_cost);
  r.get("radio_radius", c.radio_radius);
  r.get("collaboration_range", c.neighbors.collaboration_range);
  std::string rule;
  r.get("neighbor_rule", rule);
  if (rule == "shared_ue")
    c.neighbors.rule = NeighborRule::kSharedUe;
  else if (!rule.empty() && rule != "radius")
    throw ConfigError("neighbor_rule", "expected radius or shared_ue");
  if (r.has("channel")) {
    Reader ch = r.child("channel");
    ch.get("bandwidth_hz", c.channel.bandwidth_hz);
    ch.get("noise_dbm", c.channel.noise_dbm);
    ch.get("min_distance_m", c.channel.min_distance_m);
    ch.finish();
  }
  if (r.has("catalog")) {
    Reader cat = r.child("catalog");
    int k = c.catalog.size();
    cat.get("num_services", k);
    if (k < 1 || k > 64) throw ConfigError("catalog.num_services", "must be in [1, 64]");
    c.catalog.input_bits = read_per_service(cat, "input_bits", k, kDefaultRequestBits);
    c.catalog.cycles = read_per_service(cat, "cycles", k, kDefaultRequestCycles);
    cat.get("benefit_rate", c.catalog.benefit_rate);
    cat.finish();
  }
  std::tie(c.rate_range.lo, c.rate_range.hi) = read_range(r, "rate_range", {c.rate_range.lo, c.rate_range.hi});
  if (r.has("sampler")) read_sampler(r.child("sampler"), c.sampler);
  if (r.has("coalition")) {
    Reader co = r.child("coalition");
    co.get("enumeration_cap", c.coalition.enumeration_cap);
    co.get("max_split_size", c.coalition.max_split_size);
    co.get("pareto_tolerance", c.coalition.pareto_tolerance);
    co.get("operation_cap_factor", c.coalition.operation_cap_factor);
    if (co.has("sampler")) read_sampler(co.child("sampler"), c.coalition.sampler);
    co.finish();
  }
  std::string scheme;
  r.get("scheme", scheme);
  if (!scheme.empty()) c.scheme = scheme_from_string(scheme);
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return load_config(json());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return load_config(j);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["area"] = {{"width", c.deployment.area.width}, {"height", c.deployment.area.height}};
  j["density_bs"] = c.deployment.density_bs;
  j["density_ue"] = c.deployment.density_ue;
  j["bs_count"] = c.deployment.bs_count ? json(*c.deployment.bs_count) : json();
  j["ue_count"] = c.deployment.ue_count ? json(*c.deployment.ue_count) : json();
  j["regenerate_on_empty"] = c.deployment.regenerate_on_empty;
  j["cache_capacity"] = c.deployment.cache_capacity;
  j["tx_power_dbm"] = c.deployment.tx_power_dbm;
  j["unit_cost_range"] = {c.deployment.unit_cost_min, c.deployment.unit_cost_max};
  j["cloud_unit_cost"] = c.cloud_unit_cost;
  j["radio_radius"] = c.radio_radius;
  j["collaboration_range"] = c.neighbors.collaboration_range;
  j["neighbor_rule"] = c.neighbors.rule == NeighborRule::kRadius ? "radius" : "shared_ue";
  j["channel"] = {{"bandwidth_hz", c.channel.bandwidth_hz},
                  {"noise_dbm", c.channel.noise_dbm},
                  {"min_distance_m", c.channel.min_distance_m}};
  j["catalog"] = {{"num_services", c.catalog.size()},
                  {"input_bits", c.catalog.input_bits},
                  {"cycles", c.catalog.cycles},
                  {"benefit_rate", c.catalog.benefit_rate}};
  j["rate_range"] = {c.rate_range.lo, c.rate_range.hi};
  j["sampler"] = sampler_json(c.sampler);
  j["coalition"] = {{"enumeration_cap", c.coalition.enumeration_cap},
                    {"max_split_size", c.coalition.max_split_size},
                    {"pareto_tolerance", c.coalition.pareto_tolerance},
                    {"operation_cap_factor", c.coalition.operation_cap_factor},
                    {"sampler", sampler_json(c.coalition.sampler)}};
  j["scheme"] = to_string(c.scheme);
  return j;
}

Instance make_instance(const ScenarioConfig& config, const Deployment& deployment, std::uint64_t seed) {
  Deployment d = deployment;
  for (auto& bs : d.base_stations) bs.cache_capacity = config.deployment.cache_capacity;
  apply_reachability(d, assign_home_and_reachability(d, config.radio_radius));
  NetworkGraphs graphs = build_graphs(d, config.neighbors);
  DemandMatrix demand = generate_demand(d, config.catalog, config.rate_range, derive_seed(seed, "demand"));
  return Instance(std::move(d), std::move(graphs), config.catalog, std::move(demand), config.channel,
                  config.cloud_unit_cost);
}

Instance make_instance(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  return make_instance(config, generate_deployment(config.deployment, derive_seed(seed, "deployment")), seed);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kNcol: return "NCOL";
    case Strategy::kCscO: return "CSC-O";
    case Strategy::kCscSPc: return "CSC-S-PC";
    case Strategy::kCscSIc: return "CSC-S-IC";
    case Strategy::kOracle: return "ORACLE";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  for (Strategy st : {Strategy::kNcol, Strategy::kCscO, Strategy::kCscSPc, Strategy::kCscSIc, Strategy::kOracle})
    if (to_string(st) == s) return st;
  throw ConfigError("strategy", "expected one of NCOL, CSC-O, CSC-S-PC, CSC-S-IC, ORACLE; got '" + s + "'");
}

RunResult run_scenario(const Instance& instance, const ScenarioConfig& config, Strategy strategy,
                       std::uint64_t seed) {
  const int N = instance.num_bs();
  RunResult r;
  r.strategy = strategy;
  Scope scope = Scope::all(N);
  switch (strategy) {
    case Strategy::kNcol:
      r.config = ncol_config(instance);
      scope = Scope::partition(N, singletons(N));
      break;
    case Strategy::kCscO: {
      SamplerParams p = config.sampler;
      p.seed = derive_seed(seed, "sampler");
      r.sampler = run_cpgs(instance, p, scope);
      r.config = r.sampler->config;
      break;
    }
    case Strategy::kOracle:
      r.config = solve_exhaustive(instance, scope, config.coalition.enumeration_cap).config;
      break;
    case Strategy::kCscSPc:
    case Strategy::kCscSIc: {
      CoalitionOptions opts = config.coalition;
      opts.seed = derive_seed(seed, "coalition");
      CoalitionGame game(instance, strategy == Strategy::kCscSPc ? Scheme::kPlain : Scheme::kIncentivized, opts);
      r.formation = form_coalitions(game);
      r.partition = partition_json(game, *r.formation);
      r.config = r.formation->config;
      scope = Scope::partition(N, r.formation->partition);
      break;
    }
  }
  r.breakdown = evaluate(instance, r.config, scope);
  r.system_utility = r.breakdown.total_utility;
  r.bs_payoffs.resize(N);
  for (int n = 0; n < N; ++n)
    r.bs_payoffs[n] = r.formation ? r.formation->payoffs.per_bs[n].modified_utility : r.breakdown.per_bs[n].utility();
  return r;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "demand_profile", "utility_compare",     "per_bs_utility",   "workload_split",    "convergence",
      "gibbs_distributions", "caching_decisions", "coalition_structure", "utility_evolution", "payments"};
  return names;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

const std::vector<Strategy>& compared_strategies() {
  static const std::vector<Strategy> s = {Strategy::kNcol, Strategy::kCscO, Strategy::kCscSPc, Strategy::kCscSIc};
  return s;
}

std::vector<RunResult> run_all(const Instance& instance, const ScenarioConfig& config, std::uint64_t seed) {
  std::vector<RunResult> out;
  for (Strategy s : compared_strategies()) out.push_back(run_scenario(instance, config, s, seed));
  return out;
}

std::string members_string(const Members& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(m[i]);
  }
  return s;
}

}  // namespace

std::vector<std::filesystem::path> write_run(const RunResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  {
    files.push_back(out_dir / "costs.csv");
    auto out = open_out(files.back());
    write_cost_csv(out, result.breakdown);
  }
  {
    files.push_back(out_dir / "caching.csv");
    auto out = open_out(files.back());
    out << "bs_id,services,edge_workload,cloud_workload,payoff\n";
    for (std::size_t n = 0; n < result.config.size(); ++n)
      out << n << ',' << result.config[n].to_string() << ',' << fmt_double(result.breakdown.edge_workload[n]) << ','
          << fmt_double(result.breakdown.cloud_workload[n]) << ',' << fmt_double(result.bs_payoffs[n]) << '\n';
  }
  if (result.sampler) {
    files.push_back(out_dir / "trace.csv");
    auto out = open_out(files.back());
    write_trace_csv(out, result.sampler->trace);
  }
  if (result.formation) {
    files.push_back(out_dir / "partition.json");
    auto out = open_out(files.back());
    out << result.partition->dump(2) << '\n';
    files.push_back(out_dir / "payments.csv");
    auto pay = open_out(files.back());
    write_payments_csv(pay, result.formation->payoffs);
  }
  return files;
}

std::vector<std::filesystem::path> run_preset(const std::string& name, const ScenarioConfig& config,
                                              std::uint64_t seed, const std::filesystem::path& out_dir) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("preset", "unknown preset '" + name + "'");
  std::filesystem::create_directories(out_dir);
  const Instance instance = make_instance(config, seed);
  const int N = instance.num_bs();
  std::vector<std::filesystem::path> files;
  auto file = [&](const std::string& fname) {
    files.push_back(out_dir / fname);
    return open_out(files.back());
  };

  if (name == "demand_profile") {
    {
      auto out = file("deployment.json");
      out << json(instance.deployment()).dump(2) << '\n';
    }
    {
      auto out = file("bs.csv");
      out << "bs_id,x,y,unit_cost,registered_ues\n";
      for (const auto& bs : instance.deployment().base_stations)
        out << bs.id << ',' << fmt_double(bs.position.x) << ',' << fmt_double(bs.position.y) << ','
            << fmt_double(bs.unit_cost) << ',' << instance.registered(bs.id).size() << '\n';
    }
    {
      auto out = file("ue.csv");
      out << "ue_id,x,y,home_bs\n";
      for (const auto& ue : instance.deployment().user_equipment)
        out << ue.id << ',' << fmt_double(ue.position.x) << ',' << fmt_double(ue.position.y) << ',' << ue.home_bs
            << '\n';
    }
    {
      auto out = file("demand.csv");
      write_demand_csv(out, instance.demand());
    }
    std::vector<int> home(instance.num_ue());
    for (int m = 0; m < instance.num_ue(); ++m) home[m] = instance.home(m);
    const auto agg = aggregate_bs_demand(instance.demand(), home, N);
    auto out = file("demand_profile.csv");
    out << "bs_id,service_id,gamma_cycles\n";
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < instance.num_services(); ++k) out << n << ',' << k << ',' << fmt_double(agg[n][k]) << '\n';
  } else if (name == "utility_compare") {
    const auto runs = run_all(instance, config, seed);
    const double base = runs.front().system_utility;
    auto out = file("utility_compare.csv");
    out << "strategy,system_utility,total_cost,gain_vs_ncol\n";
    for (const auto& r : runs)
      out << to_string(r.strategy) << ',' << fmt_double(r.system_utility) << ',' << fmt_double(r.breakdown.total_cost)
          << ',' << fmt_double(base != 0.0 ? (r.system_utility - base) / std::abs(base) : 0.0) << '\n';
  } else if (name == "per_bs_utility") {
    const auto runs = run_all(instance, config, seed);
    auto out = file("per_bs_utility.csv");
    out << "strategy,bs_id,utility,ncol_utility\n";
    for (const auto& r : runs)
      for (int n = 0; n < N; ++n)
        out << to_string(r.strategy) << ',' << n << ',' << fmt_double(r.bs_payoffs[n]) << ','
            << fmt_double(runs.front().bs_payoffs[n]) << '\n';
  } else if (name == "workload_split") {
    const auto runs = run_all(instance, config, seed);
    auto out = file("workload_split.csv");
    out << "strategy,bs_id,edge_workload,cloud_workload\n";
    for (const auto& r : runs)
      for (int n = 0; n < N; ++n)
        out << to_string(r.strategy) << ',' << n << ',' << fmt_double(r.breakdown.edge_workload[n]) << ','
            << fmt_double(r.breakdown.cloud_workload[n]) << '\n';
  } else if (name == "convergence") {
    SamplerParams p = config.sampler;
    p.seed = derive_seed(seed, "sampler");
    const Scope scope = Scope::all(N);
    const SamplerResult cpgs = run_cpgs(instance, p, scope);
    const SamplerResult seq = run_sequential_gs(instance, p, scope);
    auto out = file("convergence.csv");
    out << "sampler,sweep,update_rounds,temperature,total_cost,best_cost\n";
    auto emit = [&](const char* tag, const SamplerResult& r) {
      out << tag << ",-1,0," << fmt_double(p.temperature_at(0)) << ',' << fmt_double(r.trace.initial_cost) << ','
          << fmt_double(r.trace.initial_cost) << '\n';
      for (const auto& s : r.trace.sweeps)
        out << tag << ',' << s.sweep << ',' << s.update_rounds << ',' << fmt_double(s.temperature) << ','
            << fmt_double(s.total_cost) << ',' << fmt_double(s.best_cost) << '\n';
    };
    emit("CPGS", cpgs);
    emit("SEQUENTIAL", seq);
  } else if (name == "gibbs_distributions") {
    // Hot start so the early window explores; cold floor so the late window concentrates.
    SamplerParams p = config.sampler;
    p.seed = derive_seed(seed, "sampler");
    p.annealing = Annealing{1000.0, 0.95, 0.05};
    p.record_conditionals = true;
    const SamplerResult r = run_cpgs(instance, p, Scope::all(N));
    const auto& cond = r.trace.conditionals;
    const int window = std::min<int>(10, static_cast<int>(cond.size()));
    auto out = file("gibbs_distributions.csv");
    out << "window,bs_id,option,services,probability\n";
    auto emit = [&](const char* tag, int begin) {
      for (int n = 0; n < N; ++n) {
        const auto& options = instance.feasible_sets(n);
        for (std::size_t j = 0; j < options.size(); ++j) {
          double avg = 0.0;
          for (int s = begin; s < begin + window; ++s) avg += cond[s][n][j];
          out << tag << ',' << n << ',' << j << ',' << options[j].to_string() << ',' << fmt_double(avg / window)
              << '\n';
        }
      }
    };
    emit("early", 0);
    emit("late", static_cast<int>(cond.size()) - window);
  } else if (name == "caching_decisions") {
    const auto runs = run_all(instance, config, seed);
    auto out = file("caching_decisions.csv");
    out << "strategy,bs_id,services\n";
    for (const auto& r : runs)
      for (int n = 0; n < N; ++n) out << to_string(r.strategy) << ',' << n << ',' << r.config[n].to_string() << '\n';
  } else if (name == "coalition_structure" || name == "utility_evolution" || name == "payments") {
    std::vector<RunResult> runs = {run_scenario(instance, config, Strategy::kCscSIc, seed),
                                   run_scenario(instance, config, Strategy::kCscSPc, seed)};
    if (name == "coalition_structure") {
      for (const auto& r : runs) {
        auto out = file("coalition_structure_" + to_string(r.formation->payoffs.scheme) + ".json");
        out << r.partition->dump(2) << '\n';
      }
      auto out = file("coalition_structure.csv");
      out << "scheme,bs_id,coalition,x,y,services\n";
      for (const auto& r : runs)
        for (const auto& e : r.formation->payoffs.per_bs) {
          const auto& pos = instance.deployment().base_stations[e.bs].position;
          out << to_string(r.formation->payoffs.scheme) << ',' << e.bs << ',' << e.coalition << ','
              << fmt_double(pos.x) << ',' << fmt_double(pos.y) << ',' << r.config[e.bs].to_string() << '\n';
        }
    } else if (name == "utility_evolution") {
      auto out = file("utility_evolution.csv");
      out << "scheme,step,operation,system_payoff,partition\n";
      for (const auto& r : runs) {
        const auto scheme = to_string(r.formation->payoffs.scheme);
        Partition p = singletons(N);
        out << scheme << ",0,start," << fmt_double(r.formation->payoff_history.front()) << ',' << to_string(p) << '\n';
        int step = 0;
        for (const auto& op : r.formation->stability.accepted) {
          Partition next;
          for (const auto& c : p)
            if (std::find(op.before.begin(), op.before.end(), c) == op.before.end()) next.push_back(c);
          next.insert(next.end(), op.after.begin(), op.after.end());
          p = normalize(std::move(next));
          out << scheme << ',' << ++step << ',' << (op.kind == Operation::Kind::kMerge ? "merge" : "split") << ','
              << fmt_double(op.system_payoff) << ',' << to_string(p) << '\n';
        }
      }
    } else {
      {
        auto out = file("payments.csv");
        out << "scheme,bs_id,coalition,singleton_value,weight,realized_utility,modified_utility,payment\n";
        for (const auto& r : runs)
          for (const auto& e : r.formation->payoffs.per_bs)
            out << to_string(r.formation->payoffs.scheme) << ',' << e.bs << ',' << e.coalition << ','
                << fmt_double(e.singleton_value) << ',' << fmt_double(e.weight) << ','
                << fmt_double(e.realized_utility) << ',' << fmt_double(e.modified_utility) << ','
                << fmt_double(e.payment) << '\n';
      }
      auto out = file("payments_clearing.csv");
      out << "scheme,coalition,members,payment_sum,abs_payment_sum\n";
      for (const auto& r : runs) {
        const auto& f = *r.formation;
        for (std::size_t c = 0; c < f.partition.size(); ++c)
          out << to_string(f.payoffs.scheme) << ',' << c << ',' << members_string(f.partition[c]) << ','
              << fmt_double(f.payoffs.coalition_payments[c]) << ',' << fmt_double(f.payoffs.coalition_abs_payments[c])
              << '\n';
      }
    }
  }
  return files;
}

OracleCheckSummary oracle_check(int instances, int max_n, int max_k, double relative_tolerance,
                                std::uint64_t seed) {
  if (max_n < 1) throw ConfigError("max_n", "must be >= 1");
  if (max_k < 1 || max_k > 64) throw ConfigError("max_k", "must be in [1, 64]");
  const auto start = std::chrono::steady_clock::now();
  OracleCheckSummary summary;
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(s);
    const int n = std::uniform_int_distribution<int>(std::min(2, max_n), max_n)(rng);
    const int k = std::uniform_int_distribution<int>(std::min(2, max_k), max_k)(rng);
    ScenarioConfig config;
    config.deployment.area = {250.0, 250.0};
    config.deployment.bs_count = n;
    config.deployment.ue_count = 3 * n;
    config.catalog = ServiceCatalog::uniform(k, kDefaultRequestBits, kDefaultRequestCycles, 10.0);
    const Instance instance = make_instance(config, s);
    const Scope scope = Scope::all(n);
    const auto oracle = solve_exhaustive(instance, scope, std::numeric_limits<std::uint64_t>::max());
    SamplerParams p;
    p.annealing = Annealing{10.0, 0.95, 0.05};
    p.max_sweeps = 500;
    p.seed = derive_seed(s, "sampler");
    const auto cpgs = run_cpgs(instance, p, scope);
    OracleCheckRow row{s, n, k, oracle.cost, cpgs.cost, false};
    row.within_tolerance = cpgs.cost <= oracle.cost + relative_tolerance * std::abs(oracle.cost);
    summary.passed += row.within_tolerance ? 1 : 0;
    summary.rows.push_back(row);
  }
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace csc
