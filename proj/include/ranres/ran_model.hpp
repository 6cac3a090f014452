#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "ranres/topology.hpp"

namespace ranres {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RadioConfig {
  double bandwidth_hz = 100e6;
  int antenna_ports = 32;
  int mimo_layers = 8;
  int modulation_bits = 8;  // 256-QAM
  double coding_overhead = 0.14;
};

// peak downlink rate of one cell: layers * bits/symbol * usable information
// symbol rate * (1 - overhead); 30 kHz numerology, guard-adjusted PRB grid
double peak_cell_capacity(const RadioConfig& cfg);

struct RadioUnit {
  int id = 0;                                  // equals its site index
  std::vector<std::uint64_t> user_rates_bps;   // per-user demand
};

struct CloudSite {
  int id = 0;
  double compute_capacity = 6.0;  // abstract units
};

// per-RU chain requirements: compute loads, segment bandwidth, latency budgets
struct RuDemand {
  double cu_load = 1.0;
  double du_load = 2.0;
  std::uint64_t bh_bps = 0;   // core <-> CU
  std::uint64_t mh_bps = 0;   // CU <-> DU
  std::uint64_t fh_bps = 0;   // DU <-> RU
  double bh_lat_s = 10e-3;
  double mh_lat_s = 1.5e-3;
  double fh_lat_s = 0.25e-3;
};

struct DemandParams {
  double cu_load = 1.0;
  double du_load = 2.0;
  double midhaul_scale = 1.02;           // midhaul carries framing overhead
  std::uint64_t fronthaul_bps = 22'000'000'000ull;  // fixed-rate eCPRI-style
  double bh_lat_s = 10e-3;
  double mh_lat_s = 1.5e-3;
  double fh_lat_s = 0.25e-3;
};

struct SystemInstance {
  Topology topology;
  RadioConfig radio;
  std::vector<RadioUnit> rus;       // index == RU id == site index
  std::vector<CloudSite> clouds;    // index == cloud id == site index
  std::vector<RuDemand> demand;     // index == RU id

  int n_rus() const { return static_cast<int>(rus.size()); }
  std::uint64_t ru_demand_bps(int r) const;
};

// instance skeleton with one RU per site and default-capacity clouds
SystemInstance make_instance(Topology topology, const RadioConfig& radio = {},
                             double cloud_capacity = 6.0);

// draws users uniformly in [band_lo, band_hi], then rescales each RU so its
// aggregate equals load_factor * peak_cell_capacity (rounded to whole bps)
void populate_users(SystemInstance& inst, int users_per_ru, double band_lo_bps,
                    double band_hi_bps, double load_factor,
                    std::uint64_t seed);

void apply_demand_profile(SystemInstance& inst, const DemandParams& p = {});

void validate_instance(const SystemInstance& inst);

enum class RuStatus { Operational, Disrupted };

struct ChainRoutes {
  Path backhaul;   // core -> CU cloud
  Path midhaul;    // CU cloud -> DU cloud (empty when co-located)
  Path fronthaul;  // DU cloud -> RU site
  bool operator==(const ChainRoutes&) const = default;
};

struct NetworkState {
  std::vector<std::optional<int>> cu_cloud;  // per RU
  std::vector<std::optional<int>> du_cloud;
  std::vector<std::optional<ChainRoutes>> routes;
  std::vector<RuStatus> ru_status;
  std::vector<bool> cloud_up;
  std::vector<double> cloud_residual;          // compute units left
  std::vector<std::uint64_t> link_residual;    // bps left per link index
  bool operator==(const NetworkState&) const = default;
};

// Greedy first fit: for each RU ascending, the DU goes to the nearest cloud
// (fronthaul latency) with compute and a feasible fronthaul, then the CU to
// the nearest cloud by midhaul latency with feasible midhaul and backhaul.
// Throws InfeasibleError naming the first RU that cannot be placed.
NetworkState initial_placement(const SystemInstance& inst);

// total delivered demand over operational RUs, exact in bits/second
std::uint64_t compute_utility(const NetworkState& state,
                              const SystemInstance& inst);

// compute units in use across clouds that are up
double used_compute(const NetworkState& state, const SystemInstance& inst);

}  // namespace ranres
