#pragma once
#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "ranres/failure.hpp"
#include "ranres/ran_model.hpp"
#include "ranres/topology.hpp"

namespace thelp {

inline ranres::SystemInstance ring_instance(int n_sites, int users_per_ru = 10,
                                            std::uint64_t seed = 1,
                                            double cloud_capacity = 6.0,
                                            int paths_k = 3) {
  auto topo = ranres::build_ring_topology(
      n_sites, ranres::TopologyParams{.paths_k = paths_k});
  auto inst = ranres::make_instance(std::move(topo), ranres::RadioConfig{},
                                    cloud_capacity);
  ranres::populate_users(inst, users_per_ru, 50e6, 500e6, 0.7, seed);
  ranres::apply_demand_profile(inst);
  return inst;
}

inline ranres::FailureScenario manual_scenario(std::vector<int> clouds) {
  ranres::FailureScenario sc;
  std::sort(clouds.begin(), clouds.end());
  sc.failed_clouds = std::move(clouds);
  return sc;
}

inline ranres::NetworkState empty_state(const ranres::SystemInstance& inst) {
  ranres::NetworkState st;
  const int n = inst.n_rus();
  st.cu_cloud.assign(n, std::nullopt);
  st.du_cloud.assign(n, std::nullopt);
  st.routes.assign(n, std::nullopt);
  st.ru_status.assign(n, ranres::RuStatus::Disrupted);
  st.cloud_up.assign(inst.clouds.size(), true);
  for (const auto& c : inst.clouds)
    st.cloud_residual.push_back(c.compute_capacity);
  for (const auto& l : inst.topology.links)
    st.link_residual.push_back(l.capacity_bps);
  return st;
}

// hand placement through the first catalog paths, throwing when the state
// would stop being physical
inline void place(ranres::NetworkState& st, const ranres::SystemInstance& inst,
                  int r, int cu, int du) {
  using namespace ranres;
  const auto first_path = [&](NodeId a, NodeId b) -> const Path& {
    const auto& ps = inst.topology.paths_between(a, b);
    if (ps.empty()) throw std::runtime_error("helper place: no catalog path");
    return ps.front();
  };
  const auto debit = [&](const Path& p, std::uint64_t bps) {
    for (int li : p.links) {
      if (st.link_residual[li] < bps)
        throw std::runtime_error("helper place: link overcommitted");
      st.link_residual[li] -= bps;
    }
  };
  ChainRoutes cr;
  cr.backhaul = first_path(core_node(), cloud_node(cu));
  cr.midhaul = first_path(cloud_node(cu), cloud_node(du));
  cr.fronthaul = first_path(cloud_node(du), ru_node(r));
  debit(cr.backhaul, inst.demand[r].bh_bps);
  debit(cr.midhaul, inst.demand[r].mh_bps);
  debit(cr.fronthaul, inst.demand[r].fh_bps);
  st.cu_cloud[r] = cu;
  st.du_cloud[r] = du;
  st.cloud_residual[cu] -= inst.demand[r].cu_load;
  st.cloud_residual[du] -= inst.demand[r].du_load;
  if (st.cloud_residual[cu] < 0.0 || st.cloud_residual[du] < 0.0)
    throw std::runtime_error("helper place: compute overcommitted");
  st.routes[r] = cr;
  st.ru_status[r] = ranres::RuStatus::Operational;
}

// recomputes per-link usage from the routes recorded in a state and checks it
// against the residual bookkeeping; returns false on any mismatch
inline bool reconcile_links(const ranres::NetworkState& st,
                            const ranres::SystemInstance& inst) {
  std::vector<std::uint64_t> used(inst.topology.links.size(), 0);
  for (int r = 0; r < inst.n_rus(); ++r) {
    if (!st.routes[r]) continue;
    const auto& rt = *st.routes[r];
    const auto& d = inst.demand[r];
    for (int li : rt.backhaul.links) used[li] += d.bh_bps;
    for (int li : rt.midhaul.links) used[li] += d.mh_bps;
    for (int li : rt.fronthaul.links) used[li] += d.fh_bps;
  }
  for (std::size_t li = 0; li < used.size(); ++li) {
    std::uint64_t cap = inst.topology.links[li].capacity_bps;
    if (ranres::link_is_dead(inst.topology.links[li], st.cloud_up)) {
      // dead links sit at zero until their cloud returns
      if (st.link_residual[li] != 0 || used[li] != 0) return false;
    } else if (st.link_residual[li] + used[li] != cap) {
      return false;
    }
  }
  return true;
}

}  // namespace thelp
