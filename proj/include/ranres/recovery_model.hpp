#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ranres/failure.hpp"
#include "ranres/ran_model.hpp"

namespace ranres {

// One admissible way to bring a disrupted RU back: host clouds for both
// functions plus concrete latency-feasible paths for all three legs. Pinned
// surviving functions restrict the candidate set to their current host.
struct CandidateOption {
  int cu_cloud = -1;
  int du_cloud = -1;
  Path backhaul;
  Path midhaul;
  Path fronthaul;
  double cu_cost = 0.0;  // compute demanded from cu_cloud
  double du_cost = 0.0;
  double total_latency_s = 0.0;
};

struct RuCandidates {
  int ru = -1;
  std::uint64_t demand_bps = 0;
  RuDemand demand;         // per leg bandwidth and latency caps
  bool cu_pinned = false;  // survivor holds its host, costs no new compute
  bool du_pinned = false;
  std::vector<CandidateOption> options;  // sorted by (total latency, hosts)
};

// Decision model for the recovery window. Variable families mirror the
// optimizer formulation: per RU a selection among options plus an abandon
// fallback; rows cover compute budgets, link budgets and latency caps.
struct RecoveryModel {
  std::vector<RuCandidates> rus;        // disrupted RUs, ascending id
  std::vector<double> cloud_residual;   // per cloud, failed clouds at zero
  std::vector<std::uint64_t> link_residual;
  std::vector<bool> cloud_up;
  int n_select_vars = 0;   // sum of option counts
  int n_abandon_vars = 0;  // one per disrupted RU
  int n_compute_rows = 0;  // one per live cloud
  int n_link_rows = 0;     // one per live link
  int n_latency_rows = 0;  // three per option, folded at generation time
};

// Enumerates candidate options against the in-failure state. Latency caps are
// enforced here so the search only ever sees feasible routings.
RecoveryModel build_model(const NetworkState& in_failure,
                          const DisruptionReport& report,
                          const SystemInstance& inst);

// chosen option index per model RU position, -1 meaning left unrecovered
struct RecoveryPlan {
  std::vector<int> choice;
  std::uint64_t recovered_bps = 0;
};

struct SolveStats {
  std::uint64_t nodes_explored = 0;
  std::uint64_t best_bound_bps = 0;
  double wall_time_s = 0.0;
  bool proven_optimal = false;
};

struct SolveLimits {
  std::uint64_t node_cap = 2'000'000;  // deterministic stop
  double time_limit_s = 0.0;           // 0 disables the wall clock check
  bool operator==(const SolveLimits&) const = default;
};

// Exact branch and bound over the candidate model. Deterministic for a fixed
// model and limits; single threaded.
RecoveryPlan solve(const RecoveryModel& model, SolveStats* stats = nullptr,
                   const SolveLimits& limits = {});

// Exhaustive reference search over the full cartesian space. Intended for
// small instances only; throws when the space exceeds max_states.
RecoveryPlan brute_force_oracle(const RecoveryModel& model,
                                std::uint64_t max_states = 200'000'000ULL);

struct ConstraintReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Re-checks a plan against raw instance data, independently of the model's
// own bookkeeping: uniqueness, pinning, compute budgets, route continuity
// over live links, bandwidth budgets and per-leg latency caps.
ConstraintReport verify_plan(const RecoveryPlan& plan,
                             const RecoveryModel& model,
                             const NetworkState& in_failure,
                             const DisruptionReport& report,
                             const SystemInstance& inst);

// Applies a verified plan to the in-failure state and returns the recovered
// state; throws InfeasibleError when verification fails.
NetworkState apply_plan(const RecoveryPlan& plan, const RecoveryModel& model,
                        const NetworkState& in_failure,
                        const DisruptionReport& report,
                        const SystemInstance& inst);

}  // namespace ranres
