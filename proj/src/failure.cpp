#include "ranres/failure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ranres/rng.hpp"

namespace ranres {

namespace {
constexpr std::uint64_t kFailureStream = 23;
}

FailureScenario sample_failure(const SystemInstance& inst, double severity,
                               std::uint64_t seed) {
  if (!(severity >= 0.0 && severity <= 1.0))
    throw std::invalid_argument("severity must lie in [0, 1]");
  const int n = static_cast<int>(inst.clouds.size());
  const int k = static_cast<int>(std::llround(severity * n));

  FailureScenario sc;
  sc.severity = severity;
  sc.seed = seed;

  // partial Fisher-Yates over cloud indexes
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  Rng rng(derive_seed(seed, kFailureStream));
  for (int i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.bounded(static_cast<std::uint64_t>(n - i));
    std::swap(pool[i], pool[j]);
    sc.failed_clouds.push_back(pool[i]);
  }
  std::sort(sc.failed_clouds.begin(), sc.failed_clouds.end());
  return sc;
}

bool DisruptionReport::is_disrupted(int ru) const {
  return std::binary_search(disrupted_rus.begin(), disrupted_rus.end(), ru);
}

bool link_is_dead(const Link& link, const std::vector<bool>& cloud_up) {
  const auto touches_down = [&](const NodeId& n) {
    return n.kind == NodeKind::Cloud && !cloud_up[n.index];
  };
  return touches_down(link.from) || touches_down(link.to);
}

bool path_operational(const Topology& topo, const Path& p,
                      const std::vector<bool>& cloud_up) {
  const auto down = [&](const NodeId& n) {
    return n.kind == NodeKind::Cloud && !cloud_up[n.index];
  };
  if (down(p.from) || down(p.to)) return false;
  for (int li : p.links) {
    if (link_is_dead(topo.links.at(li), cloud_up)) return false;
  }
  return true;
}

DisruptionReport propagate_cascade(const NetworkState& state_t0,
                                   const FailureScenario& scenario,
                                   const SystemInstance& inst) {
  const int n_clouds = static_cast<int>(inst.clouds.size());
  const int n_rus = static_cast<int>(inst.rus.size());

  std::vector<bool> up(n_clouds, true);
  for (int c : scenario.failed_clouds) {
    if (c < 0 || c >= n_clouds)
      throw std::invalid_argument("failed cloud index out of range");
    up[c] = false;
  }

  DisruptionReport rep;
  for (int c = 0; c < n_clouds; ++c)
    (up[c] ? rep.clouds_up : rep.clouds_down).push_back(c);

  for (int r = 0; r < n_rus; ++r) {
    if (state_t0.ru_status[r] == RuStatus::Disrupted) {
      rep.disrupted_rus.push_back(r);
      continue;
    }
    const auto& cu = state_t0.cu_cloud[r];
    const auto& du = state_t0.du_cloud[r];
    const bool cu_alive = cu.has_value() && up[*cu];
    const bool du_alive = du.has_value() && up[*du];

    bool routes_alive = true;
    if (state_t0.routes[r]) {
      const ChainRoutes& cr = *state_t0.routes[r];
      routes_alive = path_operational(inst.topology, cr.backhaul, up) &&
                     path_operational(inst.topology, cr.midhaul, up) &&
                     path_operational(inst.topology, cr.fronthaul, up);
    }

    if (cu_alive && du_alive && routes_alive) {
      rep.operational_rus.push_back(r);
    } else {
      rep.disrupted_rus.push_back(r);
      if (cu_alive) rep.surviving_cu[r] = *cu;
      if (du_alive) rep.surviving_du[r] = *du;
    }
  }
  return rep;
}

NetworkState in_failure_state(const NetworkState& state_t0,
                              const DisruptionReport& report,
                              const FailureScenario& scenario,
                              const SystemInstance& inst) {
  NetworkState st = state_t0;
  (void)scenario;

  const auto credit_path = [&](const Path& p, std::uint64_t bps) {
    for (int li : p.links) st.link_residual[li] += bps;
  };

  // disrupted chains stop flowing entirely, even the legs that do not touch a
  // failed cloud; their bandwidth comes back to the pool
  for (int r : report.disrupted_rus) {
    st.ru_status[r] = RuStatus::Disrupted;
    if (st.routes[r]) {
      const ChainRoutes& cr = *st.routes[r];
      const RuDemand& d = inst.demand[r];
      credit_path(cr.backhaul, d.bh_bps);
      credit_path(cr.midhaul, d.mh_bps);
      credit_path(cr.fronthaul, d.fh_bps);
      st.routes[r].reset();
    }
    // a function that died with its cloud loses its placement; a surviving
    // one stays pinned and keeps holding compute
    if (report.surviving_cu.find(r) == report.surviving_cu.end())
      st.cu_cloud[r].reset();
    if (report.surviving_du.find(r) == report.surviving_du.end())
      st.du_cloud[r].reset();
  }

  for (int c : report.clouds_down) {
    st.cloud_up[c] = false;
    st.cloud_residual[c] = 0.0;
  }

  // links touching a failed cloud carry nothing until the cloud is back
  const int n_links = static_cast<int>(inst.topology.links.size());
  for (int li = 0; li < n_links; ++li) {
    if (link_is_dead(inst.topology.links[li], st.cloud_up))
      st.link_residual[li] = 0;
  }
  return st;
}

}  // namespace ranres
