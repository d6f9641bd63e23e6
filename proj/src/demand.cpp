#include "csc/demand.hpp"

#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "csc/error.hpp"
#include "csc/format.hpp"
#include "csc/rng.hpp"

namespace csc {

ServiceCatalog ServiceCatalog::uniform(int num_services, double input_bits, double cycles, double benefit_rate) {
  ServiceCatalog c;
  c.input_bits.assign(num_services, input_bits);
  c.cycles.assign(num_services, cycles);
  c.benefit_rate = benefit_rate;
  return c;
}

void ServiceCatalog::validate(double cloud_unit_cost) const {
  if (cycles.empty()) throw ConfigError("catalog.num_services", "must be >= 1");
  if (cycles.size() > 64) throw ConfigError("catalog.num_services", "at most 64 services are supported");
  if (input_bits.size() != cycles.size()) throw ConfigError("catalog.input_bits", "length must equal num_services");
  for (double s : input_bits)
    if (!(s > 0.0)) throw ConfigError("catalog.input_bits", "must be > 0");
  for (double w : cycles)
    if (!(w > 0.0)) throw ConfigError("catalog.cycles", "must be > 0");
  if (!(benefit_rate > cloud_unit_cost)) throw ConfigError("catalog.benefit_rate", "must exceed the cloud unit cost");
}

DemandMatrix::DemandMatrix(int num_ue, int num_services)
    : num_ue_(num_ue), num_services_(num_services), entries_(static_cast<std::size_t>(num_ue) * num_services) {}

void DemandMatrix::set_requests(int ue, int service, double count, const ServiceCatalog& catalog) {
  auto& e = at(ue, service);
  e.lambda_bits = count * catalog.input_bits.at(service);
  e.gamma_cycles = count * catalog.cycles.at(service);
  e.benefit = catalog.benefit_rate * e.gamma_cycles;
}

double DemandMatrix::total_cycles(int ue) const {
  double s = 0.0;
  for (int k = 0; k < num_services_; ++k) s += at(ue, k).gamma_cycles;
  return s;
}

double DemandMatrix::total_benefit(int ue) const {
  double s = 0.0;
  for (int k = 0; k < num_services_; ++k) s += at(ue, k).benefit;
  return s;
}

DemandMatrix generate_demand(const Deployment& deployment, const ServiceCatalog& catalog, RateRange rate_range,
                             std::uint64_t seed) {
  if (rate_range.lo < 0.0 || rate_range.hi < rate_range.lo)
    throw ConfigError("rate_range", "need 0 <= lo <= hi");
  const int K = catalog.size();
  DemandMatrix demand(deployment.num_ue(), K);
  for (int m = 0; m < deployment.num_ue(); ++m) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
    std::uniform_real_distribution<double> rate(rate_range.lo, rate_range.hi);
    const double rho = rate_range.hi > rate_range.lo ? rate(rng) : rate_range.lo;
    if (rho <= 0.0) continue;
    std::poisson_distribution<int> requests(rho / K);
    for (int k = 0; k < K; ++k) demand.set_requests(m, k, requests(rng), catalog);
  }
  return demand;
}

std::vector<std::vector<double>> aggregate_bs_demand(const DemandMatrix& demand, std::span<const int> home,
                                                     int num_bs) {
  std::vector<std::vector<double>> agg(num_bs, std::vector<double>(demand.num_services(), 0.0));
  for (int m = 0; m < demand.num_ue(); ++m)
    for (int k = 0; k < demand.num_services(); ++k) agg.at(home[m])[k] += demand.at(m, k).gamma_cycles;
  return agg;
}

void write_demand_csv(std::ostream& os, const DemandMatrix& demand) {
  os << "ue_id,service_id,lambda_bits,gamma_cycles\n";
  for (int m = 0; m < demand.num_ue(); ++m)
    for (int k = 0; k < demand.num_services(); ++k) {
      const auto& e = demand.at(m, k);
      if (e.lambda_bits == 0.0 && e.gamma_cycles == 0.0) continue;
      os << m << ',' << k << ',' << fmt_double(e.lambda_bits) << ',' << fmt_double(e.gamma_cycles) << '\n';
    }
}

DemandMatrix read_demand_csv(std::istream& is, const ServiceCatalog& catalog, int num_ue) {
  DemandMatrix demand(num_ue, catalog.size());
  std::string line;
  if (!std::getline(is, line) || line.rfind("ue_id,service_id,lambda_bits,gamma_cycles", 0) != 0)
    throw ConfigError("demand_csv", "missing header ue_id,service_id,lambda_bits,gamma_cycles");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int m = 0, k = 0;
    double lambda = 0.0, gamma = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> m >> c1 >> k >> c2 >> lambda >> c3 >> gamma) || c1 != ',' || c2 != ',' || c3 != ',')
      throw ConfigError("demand_csv", "malformed row " + std::to_string(row));
    if (m < 0 || m >= num_ue || k < 0 || k >= catalog.size())
      throw ConfigError("demand_csv", "id out of range on row " + std::to_string(row));
    if (lambda < 0.0 || gamma < 0.0) throw ConfigError("demand_csv", "negative entry on row " + std::to_string(row));
    auto& e = demand.at(m, k);
    e.lambda_bits = lambda;
    e.gamma_cycles = gamma;
    e.benefit = catalog.benefit_rate * gamma;
  }
  return demand;
}

}  // namespace csc
