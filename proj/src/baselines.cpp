#include "ranres/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ranres {

RecoveryOutcome no_recovery(const NetworkState& in_failure,
                            const SystemInstance& inst) {
  RecoveryOutcome out;
  out.strategy = "no_recovery";
  out.state = in_failure;
  out.recovered_bps_per_ru.assign(inst.n_rus(), 0);
  out.recovered_bps = 0;
  return out;
}

RecoveryOutcome coverage_expansion(const NetworkState& in_failure,
                                   const DisruptionReport& report,
                                   const SystemInstance& inst,
                                   const CoverageParams& params) {
  if (params.neighbor_hops < 1)
    throw std::invalid_argument("neighbor_hops must be at least 1");
  if (!(params.rate_penalty >= 0.0 && params.rate_penalty <= 1.0))
    throw std::invalid_argument("rate_penalty must lie in [0, 1]");
  if (params.headroom_fraction < 0.0)
    throw std::invalid_argument("headroom_fraction must not be negative");

  RecoveryOutcome out;
  out.strategy = "coverage_expansion";
  out.state = in_failure;
  out.recovered_bps_per_ru.assign(inst.n_rus(), 0);

  const double budget_each =
      params.headroom_fraction * peak_cell_capacity(inst.radio);
  std::vector<double> budget_used(inst.n_rus(), 0.0);

  for (int r : report.disrupted_rus) {
    // operational cells close enough to stretch their coverage over r,
    // nearest first and lowest id within the same distance
    std::vector<std::pair<int, int>> absorbers;  // (distance, ru)
    for (int a : report.operational_rus) {
      const int d = inst.topology.hop_distance(ru_node(a), ru_node(r));
      if (d >= 1 && d <= params.neighbor_hops) absorbers.push_back({d, a});
    }
    std::sort(absorbers.begin(), absorbers.end());
    if (absorbers.empty()) continue;

    // biggest rates first; equal rates keep their user order
    std::vector<int> users(inst.rus[r].user_rates_bps.size());
    for (size_t u = 0; u < users.size(); ++u) users[u] = static_cast<int>(u);
    std::stable_sort(users.begin(), users.end(), [&](int a, int b) {
      return inst.rus[r].user_rates_bps[a] > inst.rus[r].user_rates_bps[b];
    });

    for (int u : users) {
      const std::uint64_t offered = inst.rus[r].user_rates_bps[u];
      for (const auto& [dist, a] : absorbers) {
        (void)dist;
        if (budget_used[a] + static_cast<double>(offered) >
            budget_each + 1e-6)
          continue;
        budget_used[a] += static_cast<double>(offered);
        const std::uint64_t delivered = static_cast<std::uint64_t>(
            std::floor(params.rate_penalty * static_cast<double>(offered)));
        out.recovered_bps_per_ru[r] += delivered;
        out.recovered_bps += delivered;
        break;
      }
    }
  }
  return out;
}

}  // namespace ranres
