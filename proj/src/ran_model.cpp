#include "ranres/ran_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranres/rng.hpp"

namespace ranres {

namespace {
constexpr double kSubcarrierSpacingHz = 30e3;
constexpr double kSpectralUtilization = 0.9828;  // 273 PRB in 100 MHz
constexpr double kSymbolsPerSlot = 14.0;
constexpr double kSlotsPerSecond = 2000.0;  // 0.5 ms slots at 30 kHz
constexpr double kMaxCodeRate = 948.0 / 1024.0;
constexpr std::uint64_t kUserStream = 11;
}  // namespace

double peak_cell_capacity(const RadioConfig& cfg) {
  if (cfg.bandwidth_hz <= 0) throw std::invalid_argument("bandwidth_hz <= 0");
  if (cfg.mimo_layers <= 0) throw std::invalid_argument("mimo_layers <= 0");
  if (cfg.antenna_ports <= 0) throw std::invalid_argument("antenna_ports <= 0");
  if (cfg.mimo_layers > cfg.antenna_ports)
    throw std::invalid_argument("mimo_layers exceed antenna_ports");
  if (cfg.modulation_bits != 2 && cfg.modulation_bits != 4 &&
      cfg.modulation_bits != 6 && cfg.modulation_bits != 8)
    throw std::invalid_argument("modulation_bits must be one of 2/4/6/8");
  if (cfg.coding_overhead < 0 || cfg.coding_overhead >= 1)
    throw std::invalid_argument("coding_overhead must be in [0,1)");
  double prb = std::floor(cfg.bandwidth_hz * kSpectralUtilization /
                              (kSubcarrierSpacingHz * 12.0) +
                          1e-6);
  double symbol_rate = prb * 12.0 * kSymbolsPerSlot * kSlotsPerSecond;
  double usable = symbol_rate * kMaxCodeRate;
  return cfg.mimo_layers * cfg.modulation_bits * usable *
         (1.0 - cfg.coding_overhead);
}

std::uint64_t SystemInstance::ru_demand_bps(int r) const {
  const auto& users = rus.at(r).user_rates_bps;
  std::uint64_t sum = 0;
  for (auto u : users) sum += u;
  return sum;
}

SystemInstance make_instance(Topology topology, const RadioConfig& radio,
                             double cloud_capacity) {
  if (cloud_capacity <= 0)
    throw std::invalid_argument("cloud capacity must be positive");
  SystemInstance inst;
  inst.topology = std::move(topology);
  inst.radio = radio;
  int n = inst.topology.n_sites();
  for (int i = 0; i < n; ++i) {
    inst.rus.push_back({i, {}});
    inst.clouds.push_back({i, cloud_capacity});
    inst.demand.push_back({});
  }
  return inst;
}

void populate_users(SystemInstance& inst, int users_per_ru, double band_lo_bps,
                    double band_hi_bps, double load_factor,
                    std::uint64_t seed) {
  if (users_per_ru < 0) throw std::invalid_argument("users_per_ru < 0");
  if (band_lo_bps <= 0 || band_hi_bps < band_lo_bps)
    throw std::invalid_argument("bad user rate band");
  if (load_factor < 0 || load_factor > 1)
    throw std::invalid_argument("load_factor must be in [0,1]");
  double target = load_factor * peak_cell_capacity(inst.radio);
  for (auto& ru : inst.rus) {
    ru.user_rates_bps.clear();
    if (users_per_ru == 0) continue;
    Rng rng(derive_seed(seed, kUserStream, static_cast<std::uint64_t>(ru.id)));
    std::vector<double> draws(users_per_ru);
    double sum = 0;
    for (auto& d : draws) {
      d = rng.uniform(band_lo_bps, band_hi_bps);
      sum += d;
    }
    double scale = sum > 0 ? target / sum : 0.0;
    for (double d : draws)
      ru.user_rates_bps.push_back(
          static_cast<std::uint64_t>(std::llround(d * scale)));
  }
}

void apply_demand_profile(SystemInstance& inst, const DemandParams& p) {
  if (p.cu_load <= 0 || p.du_load <= 0)
    throw std::invalid_argument("compute loads must be positive");
  if (!(p.fh_lat_s <= p.mh_lat_s && p.mh_lat_s <= p.bh_lat_s))
    throw std::invalid_argument(
        "latency budgets must tighten toward the radio: fh <= mh <= bh");
  for (int r = 0; r < inst.n_rus(); ++r) {
    RuDemand d;
    d.cu_load = p.cu_load;
    d.du_load = p.du_load;
    d.bh_bps = inst.ru_demand_bps(r);
    d.mh_bps = static_cast<std::uint64_t>(
        std::llround(p.midhaul_scale * static_cast<double>(d.bh_bps)));
    d.fh_bps = p.fronthaul_bps;
    d.bh_lat_s = p.bh_lat_s;
    d.mh_lat_s = p.mh_lat_s;
    d.fh_lat_s = p.fh_lat_s;
    inst.demand[r] = d;
  }
}

void validate_instance(const SystemInstance& inst) {
  validate_topology(inst.topology);
  int n = inst.topology.n_sites();
  if (static_cast<int>(inst.rus.size()) != n ||
      static_cast<int>(inst.clouds.size()) != n ||
      static_cast<int>(inst.demand.size()) != n)
    throw ValidationError("instance arrays must cover every site");
  for (int i = 0; i < n; ++i) {
    if (inst.rus[i].id != i || inst.clouds[i].id != i)
      throw ValidationError("RU/cloud ids must match their site index");
    if (inst.clouds[i].compute_capacity <= 0)
      throw ValidationError("cloud capacity must be positive");
    const auto& d = inst.demand[i];
    if (!(d.fh_lat_s <= d.mh_lat_s && d.mh_lat_s <= d.bh_lat_s))
      throw ValidationError("latency budgets must satisfy fh <= mh <= bh");
  }
}

namespace {

// first catalog path within the latency budget and link residuals; catalog
// order is latency ascending so the earliest fit is the preferred route
const Path* pick_path(const Topology& topo,
                      const std::vector<std::uint64_t>& link_residual,
                      const NodeId& from, const NodeId& to, double budget_s,
                      std::uint64_t flow_bps) {
  for (const Path& p : topo.paths_between(from, to)) {
    if (p.latency_s > budget_s) break;  // sorted; later ones are slower
    bool fits = true;
    for (int li : p.links)
      if (link_residual[li] < flow_bps) {
        fits = false;
        break;
      }
    if (fits) return &p;
  }
  return nullptr;
}

void debit_path(std::vector<std::uint64_t>& link_residual, const Path& p,
                std::uint64_t flow_bps) {
  for (int li : p.links) link_residual[li] -= flow_bps;
}

}  // namespace

NetworkState initial_placement(const SystemInstance& inst) {
  validate_instance(inst);
  const Topology& topo = inst.topology;
  int n = inst.n_rus();
  NetworkState st;
  st.cu_cloud.assign(n, std::nullopt);
  st.du_cloud.assign(n, std::nullopt);
  st.routes.assign(n, std::nullopt);
  st.ru_status.assign(n, RuStatus::Operational);
  st.cloud_up.assign(n, true);
  st.cloud_residual.resize(n);
  for (int c = 0; c < n; ++c)
    st.cloud_residual[c] = inst.clouds[c].compute_capacity;
  st.link_residual.resize(topo.links.size());
  for (std::size_t li = 0; li < topo.links.size(); ++li)
    st.link_residual[li] = topo.links[li].capacity_bps;

  for (int r = 0; r < n; ++r) {
    const RuDemand& dem = inst.demand[r];

    // nearest-first DU candidates by fronthaul latency, site index on ties
    std::vector<std::pair<double, int>> du_order;
    for (int c = 0; c < n; ++c) {
      const auto& ps = topo.paths_between(cloud_node(c), ru_node(r));
      if (!ps.empty()) du_order.push_back({ps.front().latency_s, c});
    }
    std::sort(du_order.begin(), du_order.end());

    int du = -1;
    const Path* fh = nullptr;
    for (auto [lat, c] : du_order) {
      if (st.cloud_residual[c] < dem.du_load) continue;
      fh = pick_path(topo, st.link_residual, cloud_node(c), ru_node(r),
                     dem.fh_lat_s, dem.fh_bps);
      if (fh) {
        du = c;
        break;
      }
    }
    if (du < 0)
      throw InfeasibleError("initial placement infeasible at RU " +
                            std::to_string(r) + ": no DU host");

    // CU candidates by midhaul latency from the chosen DU cloud
    std::vector<std::pair<double, int>> cu_order;
    for (int c = 0; c < n; ++c) {
      const auto& ps = topo.paths_between(cloud_node(c), cloud_node(du));
      if (!ps.empty()) cu_order.push_back({ps.front().latency_s, c});
    }
    std::sort(cu_order.begin(), cu_order.end());

    int cu = -1;
    const Path* mh = nullptr;
    const Path* bh = nullptr;
    double du_residual_after = st.cloud_residual[du] - dem.du_load;
    for (auto [lat, c] : cu_order) {
      double avail = (c == du) ? du_residual_after : st.cloud_residual[c];
      if (avail < dem.cu_load) continue;
      mh = pick_path(topo, st.link_residual, cloud_node(c), cloud_node(du),
                     dem.mh_lat_s, dem.mh_bps);
      if (!mh) continue;
      bh = pick_path(topo, st.link_residual, core_node(), cloud_node(c),
                     dem.bh_lat_s, dem.bh_bps);
      if (bh) {
        cu = c;
        break;
      }
    }
    if (cu < 0)
      throw InfeasibleError("initial placement infeasible at RU " +
                            std::to_string(r) + ": no CU host");

    st.du_cloud[r] = du;
    st.cu_cloud[r] = cu;
    st.cloud_residual[du] -= dem.du_load;
    st.cloud_residual[cu] -= dem.cu_load;
    debit_path(st.link_residual, *fh, dem.fh_bps);
    if (!mh->links.empty()) debit_path(st.link_residual, *mh, dem.mh_bps);
    debit_path(st.link_residual, *bh, dem.bh_bps);
    st.routes[r] = ChainRoutes{*bh, *mh, *fh};
  }
  return st;
}

std::uint64_t compute_utility(const NetworkState& state,
                              const SystemInstance& inst) {
  std::uint64_t mu = 0;
  for (int r = 0; r < inst.n_rus(); ++r)
    if (state.ru_status[r] == RuStatus::Operational) mu += inst.ru_demand_bps(r);
  return mu;
}

double used_compute(const NetworkState& state, const SystemInstance& inst) {
  double used = 0;
  for (std::size_t c = 0; c < inst.clouds.size(); ++c)
    if (state.cloud_up[c])
      used += inst.clouds[c].compute_capacity - state.cloud_residual[c];
  return used;
}

}  // namespace ranres
