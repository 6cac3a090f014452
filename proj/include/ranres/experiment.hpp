#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ranres/config.hpp"
#include "ranres/simulation.hpp"

namespace ranres {

// Replicate seed; the severity stride keeps existing instances stable when
// severities are appended to a config.
std::uint64_t grid_seed(std::uint64_t base, int severity_index, int replicate);

// Ring (or file) topology plus seeded user population and demand profile
SystemInstance build_grid_instance(const ExperimentConfig& cfg, int n_sites,
                                   std::uint64_t seed);

struct GridResult {
  std::vector<MetricsRow> rows;  // deterministic (size, severity, seed,
                                 // strategy) order, failures skipped
  std::vector<SummaryRow> summary;
  std::vector<std::string> failures;
  std::string out_dir;
};

// Runs the full grid on a worker pool and writes metrics.csv, per instance
// traces and summary.json under cfg.out_dir. Instance errors are collected,
// not fatal; the caller decides the exit status from `failures`.
GridResult run_grid(const ExperimentConfig& cfg);

// fixed header; floats at 9 significant digits; no wall clock columns
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string trace_csv(const UtilityTrace& trace);
std::string summary_json(const ExperimentConfig& cfg, const GridResult& res);

std::string trace_filename(int n_rus, double severity, std::uint64_t seed,
                           const std::string& strategy);

struct OracleCheckResult {
  int instances = 0;
  int mismatches = 0;
  std::vector<std::string> notes;  // one entry per mismatch, with the dump
};

// Seeded sweep of small instances inside the exhaustive-search guard rails;
// every branch-and-bound objective must match the reference search exactly.
OracleCheckResult run_oracle_check(int n_instances, std::uint64_t base_seed);

}  // namespace ranres
