#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ranres/recovery_model.hpp"

namespace ranres {

namespace {

constexpr double kComputeSlack = 1e-9;
constexpr double kLatencySlack = 1e-12;

void note(ConstraintReport& rep, const std::string& msg) {
  rep.ok = false;
  rep.violations.push_back(msg);
}

std::string leg_name(int i) {
  return i == 0 ? "backhaul" : (i == 1 ? "midhaul" : "fronthaul");
}

}  // namespace

ConstraintReport verify_plan(const RecoveryPlan& plan,
                             const RecoveryModel& model,
                             const NetworkState& in_failure,
                             const DisruptionReport& report,
                             const SystemInstance& inst) {
  ConstraintReport rep;
  const Topology& topo = inst.topology;

  if (plan.choice.size() != model.rus.size()) {
    note(rep, "plan length does not match the model");
    return rep;
  }

  std::set<int> seen_rus;
  std::map<int, double> compute_need;
  std::map<int, std::uint64_t> link_need;
  std::uint64_t recovered = 0;

  for (size_t p = 0; p < model.rus.size(); ++p) {
    const RuCandidates& rc = model.rus[p];
    const int r = rc.ru;
    std::ostringstream tag;
    tag << "RU " << r << ": ";

    if (!seen_rus.insert(r).second) {
      note(rep, tag.str() + "appears twice in the model");
      continue;
    }
    const int ch = plan.choice[p];
    if (ch < 0) continue;  // left unrecovered
    if (ch >= static_cast<int>(rc.options.size())) {
      note(rep, tag.str() + "choice index out of range");
      continue;
    }
    if (!report.is_disrupted(r)) {
      note(rep, tag.str() + "is not disrupted, nothing to recover");
      continue;
    }
    const CandidateOption& opt = rc.options[ch];
    recovered += rc.demand_bps;

    // pinned survivors must stay where they are
    const auto cu_pin = report.surviving_cu.find(r);
    if (cu_pin != report.surviving_cu.end() && opt.cu_cloud != cu_pin->second)
      note(rep, tag.str() + "moves a pinned CU");
    const auto du_pin = report.surviving_du.find(r);
    if (du_pin != report.surviving_du.end() && opt.du_cloud != du_pin->second)
      note(rep, tag.str() + "moves a pinned DU");

    const auto live_cloud = [&](int c) {
      return c >= 0 && c < static_cast<int>(in_failure.cloud_up.size()) &&
             in_failure.cloud_up[c];
    };
    if (!live_cloud(opt.cu_cloud)) note(rep, tag.str() + "CU host is down");
    if (!live_cloud(opt.du_cloud)) note(rep, tag.str() + "DU host is down");

    // compute demanded from each host; pinned functions already hold theirs
    if (cu_pin == report.surviving_cu.end())
      compute_need[opt.cu_cloud] += rc.demand.cu_load;
    if (du_pin == report.surviving_du.end())
      compute_need[opt.du_cloud] += rc.demand.du_load;

    const Path* legs[3] = {&opt.backhaul, &opt.midhaul, &opt.fronthaul};
    const NodeId ends[3][2] = {
        {core_node(), cloud_node(opt.cu_cloud)},
        {cloud_node(opt.cu_cloud), cloud_node(opt.du_cloud)},
        {cloud_node(opt.du_cloud), ru_node(r)}};
    const std::uint64_t flows[3] = {rc.demand.bh_bps, rc.demand.mh_bps,
                                    rc.demand.fh_bps};
    const double caps[3] = {rc.demand.bh_lat_s, rc.demand.mh_lat_s,
                            rc.demand.fh_lat_s};

    for (int leg = 0; leg < 3; ++leg) {
      const Path& path = *legs[leg];
      if (!(path.from == ends[leg][0]) || !(path.to == ends[leg][1])) {
        note(rep, tag.str() + leg_name(leg) + " endpoints do not match hosts");
        continue;
      }
      if (path.links.empty()) {
        if (!(path.from == path.to))
          note(rep, tag.str() + leg_name(leg) + " is empty but spans nodes");
        continue;
      }
      // walk the chain link by link against raw topology data
      bool broken = false;
      NodeId at = path.from;
      double lat = 0.0;
      for (int li : path.links) {
        if (li < 0 || li >= static_cast<int>(topo.links.size())) {
          note(rep, tag.str() + leg_name(leg) + " uses an unknown link");
          broken = true;
          break;
        }
        const Link& l = topo.links[li];
        if (!(l.from == at)) {
          note(rep, tag.str() + leg_name(leg) + " is not contiguous");
          broken = true;
          break;
        }
        if (link_is_dead(l, in_failure.cloud_up)) {
          note(rep, tag.str() + leg_name(leg) + " crosses a failed cloud");
          broken = true;
          break;
        }
        lat += l.latency_s;
        at = l.to;
        link_need[li] += flows[leg];
      }
      if (broken) continue;
      if (!(at == path.to))
        note(rep, tag.str() + leg_name(leg) + " does not reach its endpoint");
      if (lat > caps[leg] + kLatencySlack) {
        std::ostringstream os;
        os << tag.str() << leg_name(leg) << " latency " << lat
           << " exceeds cap " << caps[leg];
        note(rep, os.str());
      }
    }
  }

  for (const auto& [c, need] : compute_need) {
    if (need > in_failure.cloud_residual[c] + kComputeSlack) {
      std::ostringstream os;
      os << "cloud " << c << ": compute " << need << " exceeds residual "
         << in_failure.cloud_residual[c];
      note(rep, os.str());
    }
  }
  for (const auto& [li, need] : link_need) {
    if (need > in_failure.link_residual[li]) {
      std::ostringstream os;
      os << "link " << li << ": flow " << need << " bps exceeds residual "
         << in_failure.link_residual[li];
      note(rep, os.str());
    }
  }
  if (recovered != plan.recovered_bps) {
    std::ostringstream os;
    os << "recovered total " << plan.recovered_bps
       << " bps does not match the chosen set (" << recovered << ")";
    note(rep, os.str());
  }
  return rep;
}

NetworkState apply_plan(const RecoveryPlan& plan, const RecoveryModel& model,
                        const NetworkState& in_failure,
                        const DisruptionReport& report,
                        const SystemInstance& inst) {
  const ConstraintReport rep =
      verify_plan(plan, model, in_failure, report, inst);
  if (!rep.ok)
    throw InfeasibleError("recovery plan rejected: " + rep.violations.front());

  NetworkState st = in_failure;
  for (size_t p = 0; p < model.rus.size(); ++p) {
    const int ch = plan.choice[p];
    if (ch < 0) continue;
    const RuCandidates& rc = model.rus[p];
    const CandidateOption& opt = rc.options[ch];
    const int r = rc.ru;

    st.cu_cloud[r] = opt.cu_cloud;
    st.du_cloud[r] = opt.du_cloud;
    if (opt.cu_cost > 0.0) st.cloud_residual[opt.cu_cloud] -= opt.cu_cost;
    if (opt.du_cost > 0.0) st.cloud_residual[opt.du_cloud] -= opt.du_cost;

    for (int li : opt.backhaul.links) st.link_residual[li] -= rc.demand.bh_bps;
    for (int li : opt.midhaul.links) st.link_residual[li] -= rc.demand.mh_bps;
    for (int li : opt.fronthaul.links)
      st.link_residual[li] -= rc.demand.fh_bps;

    ChainRoutes cr;
    cr.backhaul = opt.backhaul;
    cr.midhaul = opt.midhaul;
    cr.fronthaul = opt.fronthaul;
    st.routes[r] = cr;
    st.ru_status[r] = RuStatus::Operational;
  }
  return st;
}

}  // namespace ranres
