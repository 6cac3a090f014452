#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ranres/failure.hpp"
#include "ranres/ran_model.hpp"

namespace ranres {

// What a strategy gave back, in a shape shared by all of them. For function
// replacement the per RU figure is all or nothing; radio level absorption can
// hand back partial user rates.
struct RecoveryOutcome {
  std::string strategy;
  NetworkState state;  // network state once the strategy has acted
  std::vector<std::uint64_t> recovered_bps_per_ru;
  std::uint64_t recovered_bps = 0;
};

// lower reference: nobody lifts a finger, the outage just persists
RecoveryOutcome no_recovery(const NetworkState& in_failure,
                            const SystemInstance& inst);

struct CoverageParams {
  int neighbor_hops = 1;          // ring distance an absorbing cell may span
  double rate_penalty = 0.5;      // delivered fraction of an absorbed rate
  double headroom_fraction = 0.3; // spare cell capacity, fraction of peak
};

// Radio level stopgap: operational neighbour cells absorb users of darkened
// ones at a penalised rate. Users are offered largest first; each absorber
// admits against a headroom budget priced at the full offered rate, while
// the user only receives the penalised one. No compute or transport moves.
RecoveryOutcome coverage_expansion(const NetworkState& in_failure,
                                   const DisruptionReport& report,
                                   const SystemInstance& inst,
                                   const CoverageParams& params = {});

}  // namespace ranres
