#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ranres/baselines.hpp"
#include "ranres/config.hpp"
#include "ranres/experiment.hpp"
#include "ranres/failure.hpp"
#include "ranres/ran_model.hpp"
#include "ranres/recovery_model.hpp"
#include "ranres/simulation.hpp"
#include "ranres/topology.hpp"

namespace py = pybind11;
using namespace ranres;

namespace {

SystemInstance make_ring_instance(int n_sites, int users_per_ru,
                                  std::uint64_t seed, double load_factor,
                                  double cloud_capacity, int paths_k,
                                  double band_lo_bps, double band_hi_bps) {
  TopologyParams tp;
  tp.paths_k = paths_k;
  SystemInstance inst = make_instance(build_ring_topology(n_sites, tp),
                                      RadioConfig{}, cloud_capacity);
  populate_users(inst, users_per_ru, band_lo_bps, band_hi_bps, load_factor,
                 seed);
  apply_demand_profile(inst);
  return inst;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "disaggregated RAN failure recovery: instances, failures, exact "
            "recovery optimization, baselines and experiment plumbing";
  m.attr("__version__") = kToolVersion;

  py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                          PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // ---- instance ----
  py::class_<RadioUnit>(m, "RadioUnit")
      .def_readonly("id", &RadioUnit::id)
      .def_readonly("user_rates_bps", &RadioUnit::user_rates_bps);
  py::class_<CloudSite>(m, "CloudSite")
      .def_readonly("id", &CloudSite::id)
      .def_readonly("compute_capacity", &CloudSite::compute_capacity);
  py::class_<Topology>(m, "Topology")
      .def_property_readonly("n_sites", &Topology::n_sites)
      .def_property_readonly(
          "n_links", [](const Topology& t) { return t.links.size(); })
      .def_readonly("paths_k", &Topology::paths_k);
  py::class_<SystemInstance>(m, "SystemInstance")
      .def_property_readonly("n_rus", &SystemInstance::n_rus)
      .def_readonly("topology", &SystemInstance::topology)
      .def_readonly("rus", &SystemInstance::rus)
      .def_readonly("clouds", &SystemInstance::clouds)
      .def("ru_demand_bps", &SystemInstance::ru_demand_bps, py::arg("ru"));

  m.def("ring_instance", &make_ring_instance, py::arg("n_sites"),
        py::arg("users_per_ru") = 10, py::arg("seed") = 1,
        py::arg("load_factor") = 0.7, py::arg("cloud_capacity") = 6.0,
        py::arg("paths_k") = 3, py::arg("band_lo_bps") = 50e6,
        py::arg("band_hi_bps") = 500e6,
        "ring of co-located RU/cloud sites with seeded user demand");
  m.def("build_grid_instance", &build_grid_instance, py::arg("config"),
        py::arg("n_sites"), py::arg("seed"));
  m.def("load_topology_file", &load_topology_file, py::arg("path"));
  m.def("save_topology_file", &save_topology_file, py::arg("topology"),
        py::arg("path"));

  // ---- network state ----
  py::enum_<RuStatus>(m, "RuStatus")
      .value("Operational", RuStatus::Operational)
      .value("Disrupted", RuStatus::Disrupted);
  py::class_<NetworkState>(m, "NetworkState")
      .def_readonly("cu_cloud", &NetworkState::cu_cloud)
      .def_readonly("du_cloud", &NetworkState::du_cloud)
      .def_readonly("ru_status", &NetworkState::ru_status)
      .def_readonly("cloud_up", &NetworkState::cloud_up)
      .def_readonly("cloud_residual", &NetworkState::cloud_residual)
      .def_readonly("link_residual", &NetworkState::link_residual)
      .def("__eq__", [](const NetworkState& a, const NetworkState& b) {
        return a == b;
      });
  m.def("initial_placement", &initial_placement, py::arg("instance"));
  m.def("compute_utility", &compute_utility, py::arg("state"),
        py::arg("instance"));
  m.def("used_compute", &used_compute, py::arg("state"), py::arg("instance"));

  // ---- failures ----
  py::class_<FailureScenario>(m, "FailureScenario")
      .def(py::init<>())
      .def_readwrite("severity", &FailureScenario::severity)
      .def_readwrite("seed", &FailureScenario::seed)
      .def_readwrite("failed_clouds", &FailureScenario::failed_clouds);
  py::class_<DisruptionReport>(m, "DisruptionReport")
      .def_readonly("disrupted_rus", &DisruptionReport::disrupted_rus)
      .def_readonly("operational_rus", &DisruptionReport::operational_rus)
      .def_readonly("clouds_up", &DisruptionReport::clouds_up)
      .def_readonly("clouds_down", &DisruptionReport::clouds_down)
      .def("is_disrupted", &DisruptionReport::is_disrupted, py::arg("ru"));
  m.def("sample_failure", &sample_failure, py::arg("instance"),
        py::arg("severity"), py::arg("seed"));
  m.def("propagate_cascade", &propagate_cascade, py::arg("state"),
        py::arg("scenario"), py::arg("instance"));
  m.def("in_failure_state", &in_failure_state, py::arg("state"),
        py::arg("report"), py::arg("scenario"), py::arg("instance"));

  // ---- recovery ----
  py::class_<RecoveryModel>(m, "RecoveryModel")
      .def_property_readonly(
          "n_rus", [](const RecoveryModel& mm) { return mm.rus.size(); })
      .def_readonly("n_select_vars", &RecoveryModel::n_select_vars)
      .def_readonly("n_abandon_vars", &RecoveryModel::n_abandon_vars)
      .def_readonly("n_compute_rows", &RecoveryModel::n_compute_rows)
      .def_readonly("n_link_rows", &RecoveryModel::n_link_rows)
      .def_readonly("n_latency_rows", &RecoveryModel::n_latency_rows)
      .def_property_readonly("option_counts", [](const RecoveryModel& mm) {
        std::vector<std::size_t> counts;
        for (const auto& rc : mm.rus) counts.push_back(rc.options.size());
        return counts;
      });
  py::class_<RecoveryPlan>(m, "RecoveryPlan")
      .def(py::init<>())
      .def_readwrite("choice", &RecoveryPlan::choice)
      .def_readwrite("recovered_bps", &RecoveryPlan::recovered_bps);
  py::class_<SolveStats>(m, "SolveStats")
      .def(py::init<>())
      .def_readonly("nodes_explored", &SolveStats::nodes_explored)
      .def_readonly("best_bound_bps", &SolveStats::best_bound_bps)
      .def_readonly("wall_time_s", &SolveStats::wall_time_s)
      .def_readonly("proven_optimal", &SolveStats::proven_optimal);
  py::class_<SolveLimits>(m, "SolveLimits")
      .def(py::init<>())
      .def_readwrite("node_cap", &SolveLimits::node_cap)
      .def_readwrite("time_limit_s", &SolveLimits::time_limit_s);
  py::class_<ConstraintReport>(m, "ConstraintReport")
      .def_readonly("ok", &ConstraintReport::ok)
      .def_readonly("violations", &ConstraintReport::violations);

  m.def("build_model", &build_model, py::arg("in_failure"), py::arg("report"),
        py::arg("instance"));
  m.def(
      "solve",
      [](const RecoveryModel& model, const SolveLimits& limits) {
        SolveStats stats;
        RecoveryPlan plan = solve(model, &stats, limits);
        return py::make_tuple(plan, stats);
      },
      py::arg("model"), py::arg("limits") = SolveLimits{},
      "returns (plan, stats)");
  m.def("brute_force_oracle", &brute_force_oracle, py::arg("model"),
        py::arg("max_states") = 200'000'000ull);
  m.def("verify_plan", &verify_plan, py::arg("plan"), py::arg("model"),
        py::arg("in_failure"), py::arg("report"), py::arg("instance"));
  m.def("apply_plan", &apply_plan, py::arg("plan"), py::arg("model"),
        py::arg("in_failure"), py::arg("report"), py::arg("instance"));

  // ---- baselines ----
  py::class_<RecoveryOutcome>(m, "RecoveryOutcome")
      .def_readonly("strategy", &RecoveryOutcome::strategy)
      .def_readonly("state", &RecoveryOutcome::state)
      .def_readonly("recovered_bps_per_ru",
                    &RecoveryOutcome::recovered_bps_per_ru)
      .def_readonly("recovered_bps", &RecoveryOutcome::recovered_bps);
  py::class_<CoverageParams>(m, "CoverageParams")
      .def(py::init<>())
      .def_readwrite("neighbor_hops", &CoverageParams::neighbor_hops)
      .def_readwrite("rate_penalty", &CoverageParams::rate_penalty)
      .def_readwrite("headroom_fraction", &CoverageParams::headroom_fraction);
  m.def("no_recovery", &no_recovery, py::arg("in_failure"),
        py::arg("instance"));
  m.def("coverage_expansion", &coverage_expansion, py::arg("in_failure"),
        py::arg("report"), py::arg("instance"),
        py::arg("params") = CoverageParams{});

  // ---- simulation ----
  py::enum_<Strategy>(m, "Strategy")
      .value("Optimizer", Strategy::Optimizer)
      .value("CoverageExpansion", Strategy::CoverageExpansion)
      .value("NoRecovery", Strategy::NoRecovery);
  py::class_<TimingParams>(m, "TimingParams")
      .def(py::init<>())
      .def_readwrite("t0_s", &TimingParams::t0_s)
      .def_readwrite("td_s", &TimingParams::td_s)
      .def_readwrite("detection_wait_s", &TimingParams::detection_wait_s)
      .def_readwrite("reinstantiation_window_s",
                     &TimingParams::reinstantiation_window_s)
      .def_readwrite("tail_s", &TimingParams::tail_s)
      .def_readwrite("tti_s", &TimingParams::tti_s);
  py::class_<Timeline>(m, "Timeline")
      .def_readonly("t0_s", &Timeline::t0_s)
      .def_readonly("td_s", &Timeline::td_s)
      .def_readonly("tu_s", &Timeline::tu_s)
      .def_readonly("ts_s", &Timeline::ts_s)
      .def_readonly("tr_s", &Timeline::tr_s);
  py::class_<UtilityTrace>(m, "UtilityTrace")
      .def_readonly("tti_s", &UtilityTrace::tti_s)
      .def_readonly("timeline", &UtilityTrace::timeline)
      .def_readonly("samples", &UtilityTrace::samples);
  py::class_<MetricsRow>(m, "MetricsRow")
      .def(py::init<>())
      .def_readwrite("strategy", &MetricsRow::strategy)
      .def_readwrite("n_rus", &MetricsRow::n_rus)
      .def_readwrite("severity", &MetricsRow::severity)
      .def_readwrite("seed", &MetricsRow::seed)
      .def_readwrite("mu_t0_bps", &MetricsRow::mu_t0_bps)
      .def_readwrite("mu_td_bps", &MetricsRow::mu_td_bps)
      .def_readwrite("mu_tr_bps", &MetricsRow::mu_tr_bps)
      .def_readwrite("resilience", &MetricsRow::resilience)
      .def_readwrite("gain_vs_no_recovery", &MetricsRow::gain_vs_no_recovery)
      .def_readwrite("gain_vs_baseline", &MetricsRow::gain_vs_baseline)
      .def_readwrite("cpu_before", &MetricsRow::cpu_before)
      .def_readwrite("cpu_after", &MetricsRow::cpu_after)
      .def_readwrite("n_disrupted", &MetricsRow::n_disrupted)
      .def_readwrite("n_recovered", &MetricsRow::n_recovered)
      .def_readwrite("solver_nodes", &MetricsRow::solver_nodes)
      .def_readwrite("solver_bound_bps", &MetricsRow::solver_bound_bps)
      .def_readwrite("solver_proven", &MetricsRow::solver_proven)
      .def_readwrite("plan_verified", &MetricsRow::plan_verified)
      .def_readwrite("solve_wall_s", &MetricsRow::solve_wall_s);
  py::class_<RunResult>(m, "RunResult")
      .def_readonly("trace", &RunResult::trace)
      .def_readonly("row", &RunResult::row)
      .def_readonly("final_state", &RunResult::final_state);
  py::class_<CpuUtilization>(m, "CpuUtilization")
      .def_readonly("used", &CpuUtilization::used)
      .def_readonly("capacity_up", &CpuUtilization::capacity_up)
      .def_readonly("fraction", &CpuUtilization::fraction);
  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("n_rus", &SummaryRow::n_rus)
      .def_readonly("severity", &SummaryRow::severity)
      .def_readonly("strategy", &SummaryRow::strategy)
      .def_readonly("n", &SummaryRow::n)
      .def_readonly("resilience_mean", &SummaryRow::resilience_mean)
      .def_readonly("resilience_std", &SummaryRow::resilience_std)
      .def_readonly("resilience_min", &SummaryRow::resilience_min)
      .def_readonly("resilience_max", &SummaryRow::resilience_max)
      .def_readonly("gain_nr_mean", &SummaryRow::gain_nr_mean)
      .def_readonly("gain_cb_mean", &SummaryRow::gain_cb_mean);

  m.def("run_instance", &run_instance, py::arg("instance"),
        py::arg("scenario"), py::arg("strategy"),
        py::arg("timing") = TimingParams{},
        py::arg("limits") = SolveLimits{});
  m.def("cpu_utilization", &cpu_utilization, py::arg("state"),
        py::arg("instance"));
  m.def("aggregate", &aggregate, py::arg("rows"));

  // ---- experiment plumbing ----
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("ring_sizes", &ExperimentConfig::ring_sizes)
      .def_readwrite("topology_file", &ExperimentConfig::topology_file)
      .def_readwrite("users_per_ru", &ExperimentConfig::users_per_ru)
      .def_readwrite("band_lo_bps", &ExperimentConfig::band_lo_bps)
      .def_readwrite("band_hi_bps", &ExperimentConfig::band_hi_bps)
      .def_readwrite("load_factor", &ExperimentConfig::load_factor)
      .def_readwrite("cloud_capacity", &ExperimentConfig::cloud_capacity)
      .def_readwrite("paths_k", &ExperimentConfig::paths_k)
      .def_readwrite("severities", &ExperimentConfig::severities)
      .def_readwrite("seeds_per_severity",
                     &ExperimentConfig::seeds_per_severity)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("strategies", &ExperimentConfig::strategies)
      .def_readwrite("timing", &ExperimentConfig::timing)
      .def_readwrite("solver", &ExperimentConfig::solver)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("jobs", &ExperimentConfig::jobs)
      .def_readwrite("write_traces", &ExperimentConfig::write_traces)
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) {
        return a == b;
      });
  py::class_<GridResult>(m, "GridResult")
      .def_readonly("rows", &GridResult::rows)
      .def_readonly("summary", &GridResult::summary)
      .def_readonly("failures", &GridResult::failures)
      .def_readonly("out_dir", &GridResult::out_dir);
  py::class_<OracleCheckResult>(m, "OracleCheckResult")
      .def_readonly("instances", &OracleCheckResult::instances)
      .def_readonly("mismatches", &OracleCheckResult::mismatches)
      .def_readonly("notes", &OracleCheckResult::notes);

  m.def("load_config_file", &load_config_file, py::arg("path"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("format"));
  m.def("config_to_json", &config_to_json, py::arg("config"));
  m.def("validate_config", &validate_config, py::arg("config"));
  m.def("run_grid", &run_grid, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("grid_seed", &grid_seed, py::arg("base"), py::arg("severity_index"),
        py::arg("replicate"));
  m.def("run_oracle_check", &run_oracle_check, py::arg("n_instances"),
        py::arg("base_seed"), py::call_guard<py::gil_scoped_release>());
  m.def("metrics_csv", &metrics_csv, py::arg("rows"));
}
