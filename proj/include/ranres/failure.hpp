#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "ranres/ran_model.hpp"

namespace ranres {

struct FailureScenario {
  double severity = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> failed_clouds;  // sorted, distinct
};

// samples round(severity * n_clouds) distinct clouds uniformly
FailureScenario sample_failure(const SystemInstance& inst, double severity,
                               std::uint64_t seed);

struct DisruptionReport {
  std::vector<int> disrupted_rus;    // sorted
  std::vector<int> operational_rus;  // sorted
  std::vector<int> clouds_up;        // sorted
  std::vector<int> clouds_down;      // sorted
  // functions of disrupted RUs that sit on surviving clouds keep their
  // placement; recovery must leave them where they are
  std::map<int, int> surviving_cu;  // ru -> cloud
  std::map<int, int> surviving_du;

  bool is_disrupted(int ru) const;
};

// An RU is disrupted when its CU or DU died with its cloud, or any of its
// three routes crosses a failed cloud or a link touching one.
DisruptionReport propagate_cascade(const NetworkState& state_t0,
                                   const FailureScenario& scenario,
                                   const SystemInstance& inst);

// Moves the pre-failure state to the in-failure point: failed clouds lose all
// capacity, disrupted chains stop flowing (their link bandwidth is returned,
// links touching failed clouds are dead), surviving functions keep both their
// placement and their compute allocation.
NetworkState in_failure_state(const NetworkState& state_t0,
                              const DisruptionReport& report,
                              const FailureScenario& scenario,
                              const SystemInstance& inst);

// true when the link touches a failed cloud node
bool link_is_dead(const Link& link, const std::vector<bool>& cloud_up);

// true when every link of the path is alive
bool path_operational(const Topology& topo, const Path& p,
                      const std::vector<bool>& cloud_up);

}  // namespace ranres
