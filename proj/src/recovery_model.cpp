#include <algorithm>
#include <map>

#include "ranres/recovery_model.hpp"

namespace ranres {

namespace {

// catalog paths that meet the latency cap and avoid dead links
std::vector<const Path*> feasible_paths(const Topology& topo, NodeId a, NodeId b,
                                        double latency_cap,
                                        const std::vector<bool>& cloud_up) {
  std::vector<const Path*> out;
  for (const Path& p : topo.paths_between(a, b)) {
    if (p.latency_s > latency_cap + 1e-12) break;  // catalog is latency sorted
    if (!path_operational(topo, p, cloud_up)) continue;
    out.push_back(&p);
  }
  return out;
}

}  // namespace

RecoveryModel build_model(const NetworkState& in_failure,
                          const DisruptionReport& report,
                          const SystemInstance& inst) {
  RecoveryModel m;
  m.cloud_residual = in_failure.cloud_residual;
  m.link_residual = in_failure.link_residual;
  m.cloud_up = in_failure.cloud_up;

  const Topology& topo = inst.topology;
  const NodeId core = core_node();

  for (int r : report.disrupted_rus) {
    RuCandidates rc;
    rc.ru = r;
    rc.demand_bps = inst.ru_demand_bps(r);
    rc.demand = inst.demand[r];

    const RuDemand& d = inst.demand[r];
    const auto cu_pin = report.surviving_cu.find(r);
    const auto du_pin = report.surviving_du.find(r);
    rc.cu_pinned = cu_pin != report.surviving_cu.end();
    rc.du_pinned = du_pin != report.surviving_du.end();

    std::vector<int> cu_hosts, du_hosts;
    if (rc.cu_pinned) {
      cu_hosts.push_back(cu_pin->second);
    } else {
      cu_hosts = report.clouds_up;
    }
    if (rc.du_pinned) {
      du_hosts.push_back(du_pin->second);
    } else {
      du_hosts = report.clouds_up;
    }

    for (int duc : du_hosts) {
      const auto fh = feasible_paths(topo, cloud_node(duc), ru_node(r),
                                     d.fh_lat_s, in_failure.cloud_up);
      if (fh.empty()) continue;
      for (int cuc : cu_hosts) {
        const auto bh = feasible_paths(topo, core, cloud_node(cuc), d.bh_lat_s,
                                       in_failure.cloud_up);
        if (bh.empty()) continue;
        const auto mh = feasible_paths(topo, cloud_node(cuc), cloud_node(duc),
                                       d.mh_lat_s, in_failure.cloud_up);
        if (mh.empty()) continue;

        for (const Path* pb : bh) {
          for (const Path* pm : mh) {
            for (const Path* pf : fh) {
              CandidateOption opt;
              opt.cu_cloud = cuc;
              opt.du_cloud = duc;
              opt.backhaul = *pb;
              opt.midhaul = *pm;
              opt.fronthaul = *pf;
              opt.cu_cost = rc.cu_pinned ? 0.0 : d.cu_load;
              opt.du_cost = rc.du_pinned ? 0.0 : d.du_load;
              opt.total_latency_s =
                  pb->latency_s + pm->latency_s + pf->latency_s;
              rc.options.push_back(std::move(opt));
            }
          }
        }
      }
    }

    std::sort(rc.options.begin(), rc.options.end(),
              [](const CandidateOption& a, const CandidateOption& b) {
                if (a.total_latency_s != b.total_latency_s)
                  return a.total_latency_s < b.total_latency_s;
                if (a.cu_cloud != b.cu_cloud) return a.cu_cloud < b.cu_cloud;
                if (a.du_cloud != b.du_cloud) return a.du_cloud < b.du_cloud;
                if (a.backhaul.links != b.backhaul.links)
                  return a.backhaul.links < b.backhaul.links;
                if (a.midhaul.links != b.midhaul.links)
                  return a.midhaul.links < b.midhaul.links;
                return a.fronthaul.links < b.fronthaul.links;
              });

    m.n_select_vars += static_cast<int>(rc.options.size());
    m.n_abandon_vars += 1;
    m.n_latency_rows += 3 * static_cast<int>(rc.options.size());
    m.rus.push_back(std::move(rc));
  }

  for (bool up : m.cloud_up)
    if (up) ++m.n_compute_rows;
  for (size_t li = 0; li < inst.topology.links.size(); ++li)
    if (!link_is_dead(inst.topology.links[li], m.cloud_up)) ++m.n_link_rows;
  return m;
}

}  // namespace ranres
