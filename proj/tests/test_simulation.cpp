#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ranres/simulation.hpp"

using namespace ranres;

namespace {

// sample index of the first instant at or past t
std::size_t tick_at(const UtilityTrace& tr, double t) {
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    if (tr.samples[i].first >= t - 1e-12) return i;
  }
  return tr.samples.size();
}

void check_timeline_order(const Timeline& tl) {
  CHECK(tl.t0_s <= tl.td_s);
  CHECK(tl.td_s <= tl.tu_s);
  CHECK(tl.tu_s <= tl.ts_s);
  CHECK(tl.ts_s <= tl.tr_s);
}

}  // namespace

TEST_CASE("zero severity leaves the trace flat at full utility") {
  auto inst = thelp::ring_instance(6);
  FailureScenario sc;
  sc.severity = 0.0;
  sc.seed = 7;

  for (auto strat : {Strategy::Optimizer, Strategy::CoverageExpansion,
                     Strategy::NoRecovery}) {
    auto res = run_instance(inst, sc, strat);
    CHECK(res.row.mu_t0_bps > 0);
    CHECK(res.row.mu_td_bps == res.row.mu_t0_bps);
    CHECK(res.row.mu_tr_bps == res.row.mu_t0_bps);
    CHECK(res.row.resilience == 1.0);
    CHECK(res.row.gain_vs_no_recovery == 0.0);
    CHECK(res.row.gain_vs_baseline == 0.0);
    CHECK(res.row.n_disrupted == 0);
    CHECK(res.row.n_recovered == 0);
    CHECK(res.row.cpu_before == res.row.cpu_after);
    for (const auto& [t, mu] : res.trace.samples) {
      CHECK(mu == res.row.mu_t0_bps);
    }
    check_timeline_order(res.trace.timeline);
  }
}

TEST_CASE("doing nothing never climbs back") {
  auto inst = thelp::ring_instance(8);
  auto sc = thelp::manual_scenario({2, 5});
  sc.severity = 0.25;
  sc.seed = 3;

  auto res = run_instance(inst, sc, Strategy::NoRecovery);
  CHECK(res.row.mu_td_bps < res.row.mu_t0_bps);
  CHECK(res.row.mu_tr_bps == res.row.mu_td_bps);
  CHECK(res.row.n_recovered == 0);
  CHECK(res.row.cpu_after == res.row.cpu_before);
  CHECK(res.row.gain_vs_no_recovery == 0.0);
  CHECK(res.row.gain_vs_baseline <= 0.0);

  const auto drop = tick_at(res.trace, res.trace.timeline.td_s);
  for (std::size_t i = 0; i < drop; ++i) {
    CHECK(res.trace.samples[i].second == res.row.mu_t0_bps);
  }
  for (std::size_t i = drop; i < res.trace.samples.size(); ++i) {
    CHECK(res.trace.samples[i].second == res.row.mu_td_bps);
  }
  CHECK(compute_utility(res.final_state, inst) == res.row.mu_tr_bps);
}

TEST_CASE("optimizer trace keeps the drop, plateau, staircase, plateau shape") {
  auto inst = thelp::ring_instance(10);
  auto sc = thelp::manual_scenario({2, 5});
  sc.severity = 0.2;
  sc.seed = 11;

  auto res = run_instance(inst, sc, Strategy::Optimizer);
  const auto& tr = res.trace;
  const auto& tl = tr.timeline;
  check_timeline_order(tl);
  CHECK(tl.tu_s == doctest::Approx(tl.td_s + 0.04).epsilon(1e-12));
  CHECK(tl.tr_s == doctest::Approx(tl.ts_s + 1.0).epsilon(1e-12));
  CHECK(res.row.plan_verified);
  CHECK(res.row.solver_proven);

  // ample capacity on the default ring: both chains come back
  CHECK(res.row.mu_tr_bps == res.row.mu_t0_bps);
  CHECK(res.row.n_recovered == 2);
  CHECK(res.row.solver_bound_bps == res.row.mu_tr_bps - res.row.mu_td_bps);

  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].first > tr.samples[i - 1].first);
  }

  const auto drop = tick_at(tr, tl.td_s);
  const auto start = tick_at(tr, tl.ts_s);
  const auto done = tick_at(tr, tl.tr_s);
  CHECK(drop > 0);
  CHECK(start > drop);
  CHECK(done > start);
  CHECK(done < tr.samples.size());
  for (std::size_t i = 0; i < drop; ++i) {
    CHECK(tr.samples[i].second == res.row.mu_t0_bps);
  }
  for (std::size_t i = drop; i < start; ++i) {
    CHECK(tr.samples[i].second == res.row.mu_td_bps);
  }
  std::uint64_t jumps_total = 0;
  int jumps = 0;
  for (std::size_t i = start; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].second >= tr.samples[i - 1].second);
    if (tr.samples[i].second > tr.samples[i - 1].second) {
      jumps_total += tr.samples[i].second - tr.samples[i - 1].second;
      ++jumps;
    }
  }
  CHECK(jumps_total == res.row.mu_tr_bps - res.row.mu_td_bps);
  CHECK(jumps <= res.row.n_recovered);
  for (std::size_t i = done; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].second == res.row.mu_tr_bps);
  }

  // endpoint agrees with the state the plan actually produced
  CHECK(tr.samples.back().second == compute_utility(res.final_state, inst));
  CHECK(res.row.cpu_after >= res.row.cpu_before);
  CHECK(res.row.resilience ==
        doctest::Approx(static_cast<double>(res.row.mu_tr_bps) /
                        static_cast<double>(res.row.mu_t0_bps)));
}

TEST_CASE("identical runs agree on everything but the clock") {
  auto inst = thelp::ring_instance(9);
  auto sc = thelp::manual_scenario({1, 4});
  sc.severity = 0.22;
  sc.seed = 5;

  auto a = run_instance(inst, sc, Strategy::Optimizer);
  auto b = run_instance(inst, sc, Strategy::Optimizer);
  CHECK(a.row.mu_t0_bps == b.row.mu_t0_bps);
  CHECK(a.row.mu_td_bps == b.row.mu_td_bps);
  CHECK(a.row.mu_tr_bps == b.row.mu_tr_bps);
  CHECK(a.row.resilience == b.row.resilience);
  CHECK(a.row.gain_vs_no_recovery == b.row.gain_vs_no_recovery);
  CHECK(a.row.gain_vs_baseline == b.row.gain_vs_baseline);
  CHECK(a.row.cpu_before == b.row.cpu_before);
  CHECK(a.row.cpu_after == b.row.cpu_after);
  CHECK(a.row.n_recovered == b.row.n_recovered);
  CHECK(a.row.solver_nodes == b.row.solver_nodes);
  CHECK(a.row.solver_bound_bps == b.row.solver_bound_bps);
  CHECK(a.row.solver_proven == b.row.solver_proven);
  CHECK(a.final_state == b.final_state);
  CHECK(a.trace.samples.back().second == b.trace.samples.back().second);
}

TEST_CASE("coverage expansion ramps absorbed rates without touching state") {
  auto inst = thelp::ring_instance(6);
  auto sc = thelp::manual_scenario({1});
  sc.severity = 0.17;
  sc.seed = 2;

  auto res = run_instance(inst, sc, Strategy::CoverageExpansion);

  auto state0 = initial_placement(inst);
  auto report = propagate_cascade(state0, sc, inst);
  auto fstate = in_failure_state(state0, report, sc, inst);
  auto ce = coverage_expansion(fstate, report, inst);
  CHECK(ce.recovered_bps > 0);

  CHECK(res.row.mu_td_bps == compute_utility(fstate, inst));
  CHECK(res.row.mu_tr_bps == res.row.mu_td_bps + ce.recovered_bps);
  CHECK(res.row.gain_vs_baseline == 0.0);
  CHECK(res.row.gain_vs_no_recovery > 0.0);
  CHECK(res.final_state == fstate);
  CHECK(res.row.cpu_after == res.row.cpu_before);
  CHECK(res.row.n_recovered >= 1);

  const auto start = tick_at(res.trace, res.trace.timeline.ts_s);
  for (std::size_t i = start; i < res.trace.samples.size(); ++i) {
    CHECK(res.trace.samples[i].second >= res.trace.samples[i - 1].second);
  }
  CHECK(res.trace.samples.back().second == res.row.mu_tr_bps);
}

TEST_CASE("optimizer beats the stopgap which beats doing nothing") {
  auto inst = thelp::ring_instance(10);
  auto sc = thelp::manual_scenario({3, 7});
  sc.severity = 0.2;
  sc.seed = 9;

  auto opt = run_instance(inst, sc, Strategy::Optimizer);
  auto ce = run_instance(inst, sc, Strategy::CoverageExpansion);
  auto nr = run_instance(inst, sc, Strategy::NoRecovery);
  CHECK(opt.row.mu_tr_bps >= ce.row.mu_tr_bps);
  CHECK(ce.row.mu_tr_bps >= nr.row.mu_tr_bps);
  CHECK(nr.row.mu_tr_bps == nr.row.mu_td_bps);
  CHECK(opt.row.gain_vs_baseline >= 0.0);

  // sandwich on every strategy
  for (const auto* r : {&opt.row, &ce.row, &nr.row}) {
    CHECK(r->mu_td_bps <= r->mu_tr_bps);
    CHECK(r->mu_tr_bps <= r->mu_t0_bps);
  }
}

TEST_CASE("cpu utilization sums what the up clouds are carrying") {
  auto inst = thelp::ring_instance(10);
  auto state0 = initial_placement(inst);

  // 10 chains at 1 + 2 units apiece on clouds of capacity 6
  auto full = cpu_utilization(state0, inst);
  CHECK(full.used == doctest::Approx(30.0));
  CHECK(full.capacity_up == doctest::Approx(60.0));
  CHECK(full.fraction == doctest::Approx(0.5));

  auto sc = thelp::manual_scenario({2, 5});
  sc.severity = 0.2;
  sc.seed = 4;
  auto report = propagate_cascade(state0, sc, inst);
  auto fstate = in_failure_state(state0, report, sc, inst);
  auto down = cpu_utilization(fstate, inst);
  CHECK(down.used < full.used);
  CHECK(down.capacity_up == doctest::Approx(48.0));
  CHECK(down.used == doctest::Approx(used_compute(fstate, inst)));

  auto res = run_instance(inst, sc, Strategy::Optimizer);
  auto after = cpu_utilization(res.final_state, inst);
  CHECK(after.used >= down.used);
  CHECK(after.capacity_up == down.capacity_up);
}

TEST_CASE("aggregation reduces cells and ignores row order") {
  std::vector<MetricsRow> rows;
  for (int i = 0; i < 30; ++i) {
    MetricsRow r;
    r.strategy = "optimizer";
    r.n_rus = 10;
    r.severity = 0.25;
    r.seed = static_cast<std::uint64_t>(i);
    r.resilience = 0.9;
    r.gain_vs_no_recovery = 0.5;
    r.gain_vs_baseline = 0.25;
    rows.push_back(r);
  }
  auto table = aggregate(rows);
  REQUIRE(table.size() == 1);
  CHECK(table[0].n == 30);
  CHECK(table[0].resilience_mean == doctest::Approx(0.9));
  CHECK(table[0].resilience_std == doctest::Approx(0.0));
  CHECK(table[0].resilience_min == doctest::Approx(0.9));
  CHECK(table[0].resilience_max == doctest::Approx(0.9));
  CHECK(table[0].gain_nr_mean == doctest::Approx(0.5));
  CHECK(table[0].gain_cb_mean == doctest::Approx(0.25));

  // second cell with a spread, plus deterministic cell ordering
  for (int i = 0; i < 4; ++i) {
    MetricsRow r;
    r.strategy = "no_recovery";
    r.n_rus = 5;
    r.severity = 0.5;
    r.resilience = 0.2 + 0.2 * i;  // 0.2 0.4 0.6 0.8
    rows.push_back(r);
  }
  table = aggregate(rows);
  REQUIRE(table.size() == 2);
  CHECK(table[0].n_rus == 5);
  CHECK(table[0].strategy == "no_recovery");
  CHECK(table[0].resilience_mean == doctest::Approx(0.5));
  CHECK(table[0].resilience_std ==
        doctest::Approx(std::sqrt(0.05)));  // population spread of the four
  CHECK(table[0].resilience_min == doctest::Approx(0.2));
  CHECK(table[0].resilience_max == doctest::Approx(0.8));
  CHECK(table[1].n_rus == 10);

  auto shuffled = rows;
  std::mt19937 g(99);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  auto table2 = aggregate(shuffled);
  REQUIRE(table2.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(table2[i].strategy == table[i].strategy);
    CHECK(table2[i].resilience_mean == table[i].resilience_mean);
    CHECK(table2[i].resilience_std == table[i].resilience_std);
    CHECK(table2[i].gain_nr_mean == table[i].gain_nr_mean);
    CHECK(table2[i].gain_cb_mean == table[i].gain_cb_mean);
  }

  CHECK(aggregate({}).empty());
}

TEST_CASE("timing parameters are validated") {
  auto inst = thelp::ring_instance(5);
  FailureScenario sc;
  sc.severity = 0.0;
  sc.seed = 1;
  TimingParams bad;
  bad.tti_s = 0.0;
  CHECK_THROWS_AS(run_instance(inst, sc, Strategy::NoRecovery, bad),
                  std::invalid_argument);
  TimingParams neg;
  neg.detection_wait_s = -0.01;
  CHECK_THROWS_AS(run_instance(inst, sc, Strategy::NoRecovery, neg),
                  std::invalid_argument);
  TimingParams order;
  order.t0_s = 1.0;
  order.td_s = 0.5;
  CHECK_THROWS_AS(run_instance(inst, sc, Strategy::NoRecovery, order),
                  std::invalid_argument);
}
