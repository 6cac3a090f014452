#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ranres/baselines.hpp"
#include "ranres/failure.hpp"
#include "ranres/ran_model.hpp"
#include "ranres/recovery_model.hpp"

namespace ranres {

enum class Strategy { Optimizer, CoverageExpansion, NoRecovery };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Event instants of one failure epoch, all in seconds:
// t0 pre-failure, td failure hits, tu recovery triggers after the detection
// wait, ts the plan is in hand, tr the last re-instantiated chain is back.
struct Timeline {
  double t0_s = 0.0;
  double td_s = 0.0;
  double tu_s = 0.0;
  double ts_s = 0.0;
  double tr_s = 0.0;
};

struct TimingParams {
  double t0_s = 0.0;
  double td_s = 0.1;                      // when the clouds go down
  double detection_wait_s = 0.04;         // static wait before acting
  double reinstantiation_window_s = 1.0;  // chains come back within this
  double tail_s = 0.1;                    // flat margin sampled past tr
  double tti_s = 1e-3;                    // sample period
  bool operator==(const TimingParams&) const = default;
};

// Aggregate delivered rate sampled once per TTI across the whole epoch.
// Piecewise constant except for the staircase on [ts, tr] where recovered
// chains come online one by one.
struct UtilityTrace {
  double tti_s = 1e-3;
  Timeline timeline;
  std::vector<std::pair<double, std::uint64_t>> samples;  // (time_s, bps)
};

struct MetricsRow {
  std::string strategy;
  int n_rus = 0;
  double severity = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t mu_t0_bps = 0;
  std::uint64_t mu_td_bps = 0;
  std::uint64_t mu_tr_bps = 0;
  double resilience = 1.0;           // mu_tr / mu_t0, 1 when mu_t0 == 0
  double gain_vs_no_recovery = 0.0;  // (mu_tr - mu_td) / mu_td
  double gain_vs_baseline = 0.0;     // against coverage expansion's mu_tr
  double cpu_before = 0.0;           // units in use right after the failure
  double cpu_after = 0.0;            // units in use once the strategy acted
  int n_disrupted = 0;
  int n_recovered = 0;
  std::uint64_t solver_nodes = 0;
  std::uint64_t solver_bound_bps = 0;
  bool solver_proven = false;
  bool plan_verified = true;
  double solve_wall_s = 0.0;  // measured, so kept out of serialized metrics
};

struct RunResult {
  UtilityTrace trace;
  MetricsRow row;
  NetworkState final_state;
};

// One full epoch on one instance: place, fail, run the strategy, ramp the
// recovered chains back in. The solve wall clock is measured and becomes
// ts - tu, so the trace reflects real optimization latency.
RunResult run_instance(const SystemInstance& inst,
                       const FailureScenario& scenario, Strategy strategy,
                       const TimingParams& timing = {},
                       const SolveLimits& limits = {});

struct CpuUtilization {
  double used = 0.0;         // units in use on clouds that are up
  double capacity_up = 0.0;  // total capacity of clouds that are up
  double fraction = 0.0;     // used / capacity_up, 0 when nothing is up
};

CpuUtilization cpu_utilization(const NetworkState& state,
                               const SystemInstance& inst);

// Distribution of resilience and gains per (n_rus, severity, strategy) cell
struct SummaryRow {
  int n_rus = 0;
  double severity = 0.0;
  std::string strategy;
  int n = 0;
  double resilience_mean = 0, resilience_std = 0;
  double resilience_min = 0, resilience_max = 0;
  double gain_nr_mean = 0, gain_nr_std = 0;
  double gain_nr_min = 0, gain_nr_max = 0;
  double gain_cb_mean = 0, gain_cb_std = 0;
  double gain_cb_min = 0, gain_cb_max = 0;
};

// Rows grouped and sorted by (n_rus, severity, strategy); insensitive to the
// input order. Population standard deviation.
std::vector<SummaryRow> aggregate(const std::vector<MetricsRow>& rows);

}  // namespace ranres
