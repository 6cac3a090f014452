#include "ranres/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ranres/failure.hpp"
#include "ranres/rng.hpp"

namespace fs = std::filesystem;

namespace ranres {

namespace {

constexpr std::uint64_t kOracleStream = 41;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double sig9(double v) {
  return std::strtod(fmt9(v).c_str(), nullptr);
}

}  // namespace

std::uint64_t grid_seed(std::uint64_t base, int severity_index,
                        int replicate) {
  return base + static_cast<std::uint64_t>(severity_index) * 1000ull +
         static_cast<std::uint64_t>(replicate);
}

SystemInstance build_grid_instance(const ExperimentConfig& cfg, int n_sites,
                                   std::uint64_t seed) {
  Topology topo;
  if (!cfg.topology_file.empty()) {
    topo = load_topology_file(cfg.topology_file);
  } else {
    topo = build_ring_topology(n_sites,
                               TopologyParams{.paths_k = cfg.paths_k});
  }
  SystemInstance inst =
      make_instance(std::move(topo), RadioConfig{}, cfg.cloud_capacity);
  populate_users(inst, cfg.users_per_ru, cfg.band_lo_bps, cfg.band_hi_bps,
                 cfg.load_factor, seed);
  apply_demand_profile(inst);
  return inst;
}

std::string trace_filename(int n_rus, double severity, std::uint64_t seed,
                           const std::string& strategy) {
  return "traces/n" + std::to_string(n_rus) + "/trace_" + fmt9(severity) +
         "_" + std::to_string(seed) + "_" + strategy + ".csv";
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "strategy,n_rus,severity,seed,mu_t0_bps,mu_td_bps,mu_tr_bps,"
      "resilience,gain_vs_no_recovery,gain_vs_baseline,cpu_before,cpu_after,"
      "n_disrupted,n_recovered,solver_nodes,solver_bound_bps,solver_proven,"
      "plan_verified\n";
  for (const MetricsRow& r : rows) {
    out += r.strategy;
    out += ',' + std::to_string(r.n_rus);
    out += ',' + fmt9(r.severity);
    out += ',' + std::to_string(r.seed);
    out += ',' + std::to_string(r.mu_t0_bps);
    out += ',' + std::to_string(r.mu_td_bps);
    out += ',' + std::to_string(r.mu_tr_bps);
    out += ',' + fmt9(r.resilience);
    out += ',' + fmt9(r.gain_vs_no_recovery);
    out += ',' + fmt9(r.gain_vs_baseline);
    out += ',' + fmt9(r.cpu_before);
    out += ',' + fmt9(r.cpu_after);
    out += ',' + std::to_string(r.n_disrupted);
    out += ',' + std::to_string(r.n_recovered);
    out += ',' + std::to_string(r.solver_nodes);
    out += ',' + std::to_string(r.solver_bound_bps);
    out += ',' + std::string(r.solver_proven ? "1" : "0");
    out += ',' + std::string(r.plan_verified ? "1" : "0");
    out += '\n';
  }
  return out;
}

std::string trace_csv(const UtilityTrace& trace) {
  std::string out = "time_s,utility_bps\n";
  for (const auto& [t, mu] : trace.samples) {
    out += fmt9(t);
    out += ',' + std::to_string(mu);
    out += '\n';
  }
  return out;
}

std::string summary_json(const ExperimentConfig& cfg, const GridResult& res) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["n_rows"] = res.rows.size();
  j["failures"] = res.failures;
  nlohmann::json table = nlohmann::json::array();
  for (const SummaryRow& s : res.summary) {
    nlohmann::json cell;
    cell["n_rus"] = s.n_rus;
    cell["severity"] = sig9(s.severity);
    cell["strategy"] = s.strategy;
    cell["n"] = s.n;
    cell["resilience"] = {{"mean", sig9(s.resilience_mean)},
                          {"std", sig9(s.resilience_std)},
                          {"min", sig9(s.resilience_min)},
                          {"max", sig9(s.resilience_max)}};
    cell["gain_vs_no_recovery"] = {{"mean", sig9(s.gain_nr_mean)},
                                   {"std", sig9(s.gain_nr_std)},
                                   {"min", sig9(s.gain_nr_min)},
                                   {"max", sig9(s.gain_nr_max)}};
    cell["gain_vs_baseline"] = {{"mean", sig9(s.gain_cb_mean)},
                                {"std", sig9(s.gain_cb_std)},
                                {"min", sig9(s.gain_cb_min)},
                                {"max", sig9(s.gain_cb_max)}};
    table.push_back(std::move(cell));
  }
  j["summary"] = std::move(table);
  return j.dump(2) + "\n";
}

GridResult run_grid(const ExperimentConfig& cfg) {
  validate_config(cfg);

  // topology per size, built once and copied into worker instances
  std::vector<int> sizes;
  std::map<int, Topology> topo_cache;
  if (!cfg.topology_file.empty()) {
    Topology t = load_topology_file(cfg.topology_file);
    sizes.push_back(t.n_sites());
    topo_cache.emplace(t.n_sites(), std::move(t));
  } else {
    for (int n : cfg.ring_sizes) {
      if (!topo_cache.count(n)) {
        topo_cache.emplace(
            n, build_ring_topology(n, TopologyParams{.paths_k = cfg.paths_k}));
      }
      sizes.push_back(n);
    }
  }

  GridResult res;
  res.out_dir = cfg.out_dir;
  fs::create_directories(cfg.out_dir);
  if (cfg.write_traces) {
    for (int n : sizes) {
      fs::create_directories(fs::path(cfg.out_dir) / "traces" /
                             ("n" + std::to_string(n)));
    }
  }

  struct Task {
    int size_idx, sev_idx, rep;
  };
  std::vector<Task> tasks;
  for (int si = 0; si < static_cast<int>(sizes.size()); ++si) {
    for (int vi = 0; vi < static_cast<int>(cfg.severities.size()); ++vi) {
      for (int rep = 0; rep < cfg.seeds_per_severity; ++rep) {
        tasks.push_back({si, vi, rep});
      }
    }
  }

  const std::size_t n_strats = cfg.strategies.size();
  std::vector<std::optional<MetricsRow>> slots(tasks.size() * n_strats);
  std::vector<std::string> fail_slots(tasks.size() * n_strats);

  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t ti = next.fetch_add(1);
      if (ti >= tasks.size()) return;
      const Task& task = tasks[ti];
      const int n = sizes[task.size_idx];
      const double severity = cfg.severities[task.sev_idx];
      const std::uint64_t seed =
          grid_seed(cfg.base_seed, task.sev_idx, task.rep);

      SystemInstance inst;
      FailureScenario scenario;
      try {
        Topology topo = topo_cache.at(n);
        inst = make_instance(std::move(topo), RadioConfig{},
                             cfg.cloud_capacity);
        populate_users(inst, cfg.users_per_ru, cfg.band_lo_bps,
                       cfg.band_hi_bps, cfg.load_factor, seed);
        apply_demand_profile(inst);
        scenario = sample_failure(inst, severity, seed);
      } catch (const std::exception& e) {
        for (std::size_t k = 0; k < n_strats; ++k) {
          fail_slots[ti * n_strats + k] =
              "n=" + std::to_string(n) + " severity=" + fmt9(severity) +
              " seed=" + std::to_string(seed) + ": " + e.what();
        }
        continue;
      }

      for (std::size_t k = 0; k < n_strats; ++k) {
        try {
          const Strategy strat = strategy_from_name(cfg.strategies[k]);
          RunResult run =
              run_instance(inst, scenario, strat, cfg.timing, cfg.solver);
          if (cfg.write_traces) {
            const std::string body = trace_csv(run.trace);
            const fs::path file =
                fs::path(cfg.out_dir) /
                trace_filename(n, severity, seed, cfg.strategies[k]);
            std::lock_guard<std::mutex> lock(io_mutex);
            std::ofstream out(file);
            out << body;
          }
          slots[ti * n_strats + k] = std::move(run.row);
        } catch (const std::exception& e) {
          fail_slots[ti * n_strats + k] = e.what();
        }
      }
    }
  };

  const std::size_t width =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), tasks.size());
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].has_value()) {
      res.rows.push_back(std::move(*slots[i]));
    } else if (!fail_slots[i].empty()) {
      res.failures.push_back(std::move(fail_slots[i]));
    }
  }
  res.summary = aggregate(res.rows);

  {
    std::ofstream m(fs::path(cfg.out_dir) / "metrics.csv");
    m << metrics_csv(res.rows);
    std::ofstream s(fs::path(cfg.out_dir) / "summary.json");
    s << summary_json(cfg, res);
  }
  return res;
}

OracleCheckResult run_oracle_check(int n_instances, std::uint64_t base_seed) {
  OracleCheckResult out;
  const std::uint64_t link_caps[3] = {30'000'000'000ull, 50'000'000'000ull,
                                      100'000'000'000ull};
  const double cloud_caps[4] = {3.5, 4.0, 5.0, 6.0};
  const double loads[5] = {0.4, 0.55, 0.7, 0.85, 1.0};

  for (int i = 0; i < n_instances; ++i) {
    const std::uint64_t seed = derive_seed(base_seed, kOracleStream,
                                           static_cast<std::uint64_t>(i));
    const int k = 1 + i % 3;
    // deeper failures only where the cartesian space stays tiny
    const int f = k == 1 ? 1 + i % 4 : (k == 2 ? 1 + i % 2 : 1);
    TopologyParams tp;
    tp.link_capacity_bps = link_caps[i % 3];
    tp.paths_k = k;
    auto header = [&](const char* what) {
      return "instance " + std::to_string(i) + " (k=" + std::to_string(k) +
             " failed=" + std::to_string(f) +
             " link_cap=" + std::to_string(tp.link_capacity_bps) +
             " cloud_cap=" + fmt9(cloud_caps[i % 4]) +
             " load=" + fmt9(loads[i % 5]) +
             " seed=" + std::to_string(seed) + "): " + what;
    };
    try {
      SystemInstance inst = make_instance(build_ring_topology(5, tp),
                                          RadioConfig{}, cloud_caps[i % 4]);
      populate_users(inst, 4 + i % 4, 30e6, 400e6, loads[i % 5], seed);
      apply_demand_profile(inst);

      NetworkState state0 = initial_placement(inst);
      FailureScenario sc = sample_failure(inst, f / 5.0, seed);
      DisruptionReport report = propagate_cascade(state0, sc, inst);
      NetworkState fstate = in_failure_state(state0, report, sc, inst);
      RecoveryModel model = build_model(fstate, report, inst);

      RecoveryPlan fast = solve(model);
      RecoveryPlan exact = brute_force_oracle(model);
      ++out.instances;
      if (fast.recovered_bps != exact.recovered_bps) {
        ++out.mismatches;
        std::ostringstream dump;
        dump << header("objective mismatch") << " solve="
             << fast.recovered_bps << " exhaustive=" << exact.recovered_bps
             << "; disrupted RUs:";
        for (const auto& rc : model.rus) {
          dump << " ru" << rc.ru << "(" << rc.options.size() << " options)";
        }
        dump << "; solve choices:";
        for (int c : fast.choice) dump << ' ' << c;
        dump << "; exhaustive choices:";
        for (int c : exact.choice) dump << ' ' << c;
        out.notes.push_back(dump.str());
        continue;
      }
      const ConstraintReport va =
          verify_plan(fast, model, fstate, report, inst);
      const ConstraintReport vb =
          verify_plan(exact, model, fstate, report, inst);
      if (!va.ok || !vb.ok) {
        ++out.mismatches;
        out.notes.push_back(header("verifier rejected an optimal plan: ") +
                            (!va.ok ? va.violations.front()
                                    : vb.violations.front()));
      }
    } catch (const std::exception& e) {
      ++out.mismatches;
      out.notes.push_back(header(e.what()));
    }
  }
  return out;
}

}  // namespace ranres
