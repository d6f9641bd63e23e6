// Python bindings. Configs cross the boundary as JSON text; results come back
// as plain dicts/lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csc/error.hpp"
#include "csc/scenario.hpp"

namespace py = pybind11;
using namespace csc;

namespace {

ScenarioConfig parse(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return ScenarioConfig{};
  return load_config(nlohmann::json::parse(text));
}

std::vector<std::vector<int>> services_of(const CachingConfig& config) {
  std::vector<std::vector<int>> out;
  for (const auto& s : config) out.push_back(s.members());
  return out;
}

py::dict instance_summary(const std::string& config_json, std::optional<std::uint64_t> seed) {
  const ScenarioConfig config = parse(config_json);
  const Instance inst = make_instance(config, seed.value_or(config.seed));
  py::dict d;
  d["num_bs"] = inst.num_bs();
  d["num_ue"] = inst.num_ue();
  d["num_services"] = inst.num_services();
  d["num_colors"] = inst.graphs().coloring.num_colors();
  d["physical"] = inst.graphs().physical;
  d["mrf"] = inst.graphs().mrf;
  d["color"] = inst.graphs().coloring.color;
  d["deployment"] = nlohmann::json(inst.deployment()).dump();
  std::vector<int> home;
  for (int m = 0; m < inst.num_ue(); ++m) home.push_back(inst.home(m));
  d["home"] = home;
  return d;
}

py::dict solve(const std::string& strategy, const std::string& config_json, std::optional<std::uint64_t> seed_opt) {
  const ScenarioConfig config = parse(config_json);
  const std::uint64_t seed = seed_opt.value_or(config.seed);
  const Instance inst = make_instance(config, seed);
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run_scenario(inst, config, strategy_from_string(strategy), seed);
  }
  py::dict d;
  d["strategy"] = to_string(r.strategy);
  d["system_utility"] = r.system_utility;
  d["total_cost"] = r.breakdown.total_cost;
  d["cloud_workload"] = r.breakdown.total_cloud_workload;
  d["edge_workload"] = r.breakdown.total_edge_workload;
  d["services"] = services_of(r.config);
  d["bs_payoffs"] = r.bs_payoffs;
  if (r.formation) d["partition"] = r.formation->partition;
  if (r.partition) d["partition_json"] = r.partition->dump();
  if (r.sampler) {
    d["sweeps"] = static_cast<int>(r.sampler->trace.sweeps.size());
    d["converged"] = r.sampler->trace.converged;
  }
  return d;
}

std::vector<std::string> run_preset_py(const std::string& name, const std::string& config_json,
                                       std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const ScenarioConfig config = parse(config_json);
  std::vector<std::filesystem::path> files;
  {
    py::gil_scoped_release release;
    files = run_preset(name, config, seed.value_or(config.seed), out_dir);
  }
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(f.string());
  return out;
}

py::dict oracle_check_py(int instances, int max_n, int max_k, double tolerance, std::uint64_t seed) {
  OracleCheckSummary s;
  {
    py::gil_scoped_release release;
    s = oracle_check(instances, max_n, max_k, tolerance, seed);
  }
  py::list rows;
  for (const auto& r : s.rows) {
    py::dict row;
    row["seed"] = r.seed;
    row["num_bs"] = r.num_bs;
    row["num_services"] = r.num_services;
    row["oracle_cost"] = r.oracle_cost;
    row["cpgs_cost"] = r.cpgs_cost;
    row["within_tolerance"] = r.within_tolerance;
    rows.append(row);
  }
  py::dict d;
  d["passed"] = s.passed;
  d["instances"] = instances;
  d["seconds"] = s.seconds;
  d["rows"] = rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Collaborative edge caching simulator core";
  // Translators are tried newest first: register the base class first.
  py::register_exception<Error>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_config", [] { return to_json(ScenarioConfig{}).dump(); },
        "Default scenario config as JSON text.");
  m.def("normalize_config", [](const std::string& text) { return to_json(parse(text)).dump(); },
        py::arg("config_json"), "Validate a config and return it with every default filled in.");
  m.def("make_instance", &instance_summary, py::arg("config_json") = "", py::arg("seed") = py::none(),
        "Generate a deployment and its graphs; returns a summary dict.");
  m.def("solve", &solve, py::arg("strategy"), py::arg("config_json") = "", py::arg("seed") = py::none(),
        "Run one strategy (NCOL, CSC-O, CSC-S-PC, CSC-S-IC, ORACLE).");
  m.def("preset_names", &preset_names);
  m.def("run_preset", &run_preset_py, py::arg("name"), py::arg("config_json") = "", py::arg("seed") = py::none(),
        py::arg("out_dir") = "out", "Write a preset's CSV/JSON files; returns their paths.");
  m.def("oracle_check", &oracle_check_py, py::arg("instances") = 100, py::arg("max_n") = 5, py::arg("max_k") = 4,
        py::arg("tolerance") = 0.005, py::arg("seed") = 1);
}
