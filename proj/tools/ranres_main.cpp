#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ranres/config.hpp"
#include "ranres/experiment.hpp"
#include "ranres/failure.hpp"
#include "ranres/simulation.hpp"

using namespace ranres;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunError = 1;
constexpr int kExitBadInput = 2;

std::string slurp_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A self-contained situation to verify a plan against: the instance recipe
// plus the failure. Either an explicit cloud list or a severity to sample.
//   {"config": {...}, "n_sites": 10, "seed": 3,
//    "severity": 0.2}                  sampled draw
//   {"config": {...}, "n_sites": 10, "seed": 3,
//    "failed_clouds": [2, 5]}          spelled out
struct SituationFile {
  ExperimentConfig config;
  int n_sites = 5;
  std::uint64_t seed = 1;
  SystemInstance inst;
  FailureScenario scenario;
};

SituationFile load_situation(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp_or_throw(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  SituationFile sit;
  if (j.contains("config")) {
    sit.config = parse_config_text(j["config"].dump(), "json");
  }
  try {
    if (j.contains("n_sites")) sit.n_sites = j["n_sites"].get<int>();
    if (j.contains("seed")) sit.seed = j["seed"].get<std::uint64_t>();
    sit.inst = build_grid_instance(sit.config, sit.n_sites, sit.seed);
    if (j.contains("failed_clouds")) {
      sit.scenario.failed_clouds =
          j["failed_clouds"].get<std::vector<int>>();
      std::sort(sit.scenario.failed_clouds.begin(),
                sit.scenario.failed_clouds.end());
      sit.scenario.seed = sit.seed;
      sit.scenario.severity =
          sit.inst.clouds.empty()
              ? 0.0
              : static_cast<double>(sit.scenario.failed_clouds.size()) /
                    static_cast<double>(sit.inst.clouds.size());
    } else {
      const double severity =
          j.contains("severity") ? j["severity"].get<double>() : 0.0;
      sit.scenario = sample_failure(sit.inst, severity, sit.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return sit;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::optional<int> jobs, std::optional<double> time_limit,
            std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (!out_override.empty()) {
    cfg.out_dir = out_override;
  } else if (const char* env = std::getenv("RAN_RESILIENCE_OUT");
             env && *env) {
    cfg.out_dir = env;
  }
  if (jobs) cfg.jobs = *jobs;
  if (time_limit) cfg.solver.time_limit_s = *time_limit;
  if (seed) cfg.base_seed = *seed;
  validate_config(cfg);

  const GridResult res = run_grid(cfg);
  std::cout << "wrote " << res.rows.size() << " rows to " << res.out_dir
            << "/metrics.csv\n";
  for (const SummaryRow& s : res.summary) {
    std::cout << "  n=" << s.n_rus << " severity=" << s.severity << " "
              << s.strategy << ": resilience mean " << s.resilience_mean
              << " min " << s.resilience_min << " max " << s.resilience_max
              << " (" << s.n << " runs)\n";
  }
  if (!res.failures.empty()) {
    std::cerr << res.failures.size() << " instance(s) failed:\n";
    for (const std::string& f : res.failures) std::cerr << "  " << f << "\n";
    return kExitRunError;
  }
  return kExitOk;
}

int cmd_verify(const std::string& instance_path, const std::string& plan_path,
               bool solve_instead, const std::string& plan_out) {
  const SituationFile sit = load_situation(instance_path);
  const NetworkState state0 = initial_placement(sit.inst);
  const DisruptionReport report =
      propagate_cascade(state0, sit.scenario, sit.inst);
  const NetworkState fstate =
      in_failure_state(state0, report, sit.scenario, sit.inst);
  const RecoveryModel model = build_model(fstate, report, sit.inst);

  RecoveryPlan plan;
  if (solve_instead) {
    plan = solve(model);
  } else {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(slurp_or_throw(plan_path));
      plan.choice = j.at("choice").get<std::vector<int>>();
      plan.recovered_bps = j.at("recovered_bps").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(plan_path + ": " + e.what());
    }
  }

  if (!plan_out.empty()) {
    nlohmann::json j;
    j["choice"] = plan.choice;
    j["recovered_bps"] = plan.recovered_bps;
    std::ofstream out(plan_out);
    if (!out) throw ConfigError("cannot write " + plan_out);
    out << j.dump(2) << "\n";
  }

  const ConstraintReport rep =
      verify_plan(plan, model, fstate, report, sit.inst);
  std::cout << "disrupted RUs: " << report.disrupted_rus.size()
            << ", plan recovers " << plan.recovered_bps << " bps\n";
  if (rep.ok) {
    std::cout << "all constraint families satisfied\n";
    return kExitOk;
  }
  std::cout << rep.violations.size() << " violation(s):\n";
  for (const std::string& v : rep.violations) std::cout << "  " << v << "\n";
  return kExitRunError;
}

int cmd_oracle(int instances, std::uint64_t seed) {
  const OracleCheckResult res = run_oracle_check(instances, seed);
  std::cout << "compared " << res.instances << " instance(s), "
            << res.mismatches << " mismatch(es)\n";
  bool guard_rail = false;
  for (const std::string& note : res.notes) {
    std::cout << note << "\n";
    if (note.find("too large") != std::string::npos) guard_rail = true;
  }
  if (guard_rail) return kExitBadInput;
  return res.mismatches == 0 ? kExitOk : kExitRunError;
}

int cmd_topology_gen(int ring, int paths_k, const std::string& out_path) {
  const Topology topo =
      build_ring_topology(ring, TopologyParams{.paths_k = paths_k});
  if (out_path.empty()) {
    std::cout << save_topology(topo) << "\n";
  } else {
    save_topology_file(topo, out_path);
    std::cout << "wrote " << topo.nodes.size() << " nodes, "
              << topo.links.size() << " links to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_topology_check(const std::string& path) {
  Topology topo;
  try {
    topo = load_topology_file(path);
  } catch (const ValidationError& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return kExitRunError;
  }
  validate_topology(topo);
  int rus = 0, clouds = 0;
  for (const NodeId& n : topo.nodes) {
    rus += n.kind == NodeKind::RuSite;
    clouds += n.kind == NodeKind::Cloud;
  }
  std::cout << "ok: " << rus << " RU sites, " << clouds << " clouds, "
            << topo.links.size() << " links, k=" << topo.paths_k << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disaggregated RAN failure recovery experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);

  // run
  auto* run = app.add_subcommand("run", "execute an experiment grid");
  std::string config_path, out_override;
  std::optional<int> jobs;
  std::optional<double> time_limit;
  std::optional<std::uint64_t> seed_override;
  run->add_option("--config", config_path, "experiment config (.json/.toml)")
      ->required();
  run->add_option("--out", out_override,
                  "output directory (overrides config and RAN_RESILIENCE_OUT)");
  run->add_option("--jobs", jobs, "worker pool width");
  run->add_option("--time-limit", time_limit,
                  "per solve wall clock limit, seconds");
  run->add_option("--seed", seed_override, "base seed override");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "check a recovery plan against a failure situation");
  std::string instance_path, plan_path, plan_out;
  bool solve_instead = false;
  verify->add_option("--instance", instance_path,
                     "situation file: instance recipe plus failure")
      ->required();
  verify->add_option("--plan", plan_path, "plan file with choice vector");
  verify->add_flag("--solve", solve_instead,
                   "solve for the plan instead of reading one");
  verify->add_option("--plan-out", plan_out, "write the checked plan here");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "compare the solver against exhaustive search");
  int oracle_instances = 100;
  std::uint64_t oracle_seed = 1;
  oracle->add_option("--instances", oracle_instances,
                     "number of seeded instances");
  oracle->add_option("--seed", oracle_seed, "sweep base seed");

  // topology gen | check
  auto* topology = app.add_subcommand("topology", "generate or inspect");
  topology->require_subcommand(1);
  auto* gen = topology->add_subcommand("gen", "emit a ring topology");
  int ring = 10, gen_paths_k = 3;
  std::string gen_out;
  gen->add_option("--ring", ring, "number of RU sites")->required();
  gen->add_option("--paths-k", gen_paths_k, "candidate paths per pair");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");
  auto* check = topology->add_subcommand("check", "validate a topology file");
  std::string check_path;
  check->add_option("file", check_path, "topology json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, out_override, jobs, time_limit,
                     seed_override);
    }
    if (verify->parsed()) {
      if (!solve_instead && plan_path.empty()) {
        std::cerr << "either --plan or --solve is required\n";
        return kExitBadInput;
      }
      return cmd_verify(instance_path, plan_path, solve_instead, plan_out);
    }
    if (oracle->parsed()) {
      if (oracle_instances < 1) {
        std::cerr << "--instances must be >= 1\n";
        return kExitBadInput;
      }
      return cmd_oracle(oracle_instances, oracle_seed);
    }
    if (gen->parsed()) return cmd_topology_gen(ring, gen_paths_k, gen_out);
    if (check->parsed()) return cmd_topology_check(check_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunError;
  }
  return kExitBadInput;
}
