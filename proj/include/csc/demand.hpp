#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "csc/topology.hpp"

namespace csc {

// Per-service request constants. A request for service k carries
// input_bits[k] bits and needs cycles[k] processor cycles; each completed
// cycle is worth benefit_rate to the UE.
struct ServiceCatalog {
  std::vector<double> input_bits;
  std::vector<double> cycles;
  double benefit_rate = 10.0;

  int size() const { return static_cast<int>(cycles.size()); }
  static ServiceCatalog uniform(int num_services, double input_bits, double cycles, double benefit_rate = 10.0);
  // Throws ConfigError unless s_k > 0, w_k > 0 and benefit_rate > cloud_unit_cost.
  void validate(double cloud_unit_cost) const;
};

struct DemandEntry {
  double lambda_bits = 0.0;   // input data
  double gamma_cycles = 0.0;  // workload
  double benefit = 0.0;       // benefit_rate * gamma
};

class DemandMatrix {
 public:
  DemandMatrix() = default;
  DemandMatrix(int num_ue, int num_services);

  int num_ue() const { return num_ue_; }
  int num_services() const { return num_services_; }

  DemandEntry& at(int ue, int service) { return entries_.at(index(ue, service)); }
  const DemandEntry& at(int ue, int service) const { return entries_.at(index(ue, service)); }

  // Sets lambda/gamma/benefit from a request count.
  void set_requests(int ue, int service, double count, const ServiceCatalog& catalog);

  double total_cycles(int ue) const;
  double total_benefit(int ue) const;

 private:
  std::size_t index(int ue, int service) const {
    return static_cast<std::size_t>(ue) * num_services_ + service;
  }

  int num_ue_ = 0;
  int num_services_ = 0;
  std::vector<DemandEntry> entries_;
};

struct RateRange {
  double lo = 0.0;
  double hi = 20.0;
};

// rho_m ~ U(rate_range); count(m, k) ~ Poisson(rho_m / K).
DemandMatrix generate_demand(const Deployment& deployment, const ServiceCatalog& catalog, RateRange rate_range,
                             std::uint64_t seed);

// Row n, column k: sum of gamma over UEs registered to n.
std::vector<std::vector<double>> aggregate_bs_demand(const DemandMatrix& demand, std::span<const int> home,
                                                     int num_bs);

// Columns: ue_id,service_id,lambda_bits,gamma_cycles (zero rows omitted).
void write_demand_csv(std::ostream& os, const DemandMatrix& demand);
DemandMatrix read_demand_csv(std::istream& is, const ServiceCatalog& catalog, int num_ue);

}  // namespace csc
