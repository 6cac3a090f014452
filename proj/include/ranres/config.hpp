#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranres/recovery_model.hpp"
#include "ranres/simulation.hpp"

namespace ranres {

inline constexpr const char* kToolName = "ranres";
inline constexpr const char* kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything one experiment run needs. Absent keys in a config file keep
// these defaults, which reproduce the headline grid.
struct ExperimentConfig {
  std::vector<int> ring_sizes = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::string topology_file;  // when set, replaces the generated rings

  int users_per_ru = 10;
  double band_lo_bps = 50e6;
  double band_hi_bps = 500e6;
  double load_factor = 0.7;  // aggregate RU demand as a share of cell peak
  double cloud_capacity = 6.0;
  int paths_k = 3;

  std::vector<double> severities = {0.05, 0.10, 0.25, 0.50};
  int seeds_per_severity = 30;
  std::uint64_t base_seed = 1;
  std::vector<std::string> strategies = {"optimizer", "coverage_expansion",
                                         "no_recovery"};

  TimingParams timing;
  SolveLimits solver;

  std::string out_dir = "out";
  int jobs = 1;
  bool write_traces = true;

  bool operator==(const ExperimentConfig&) const = default;
};

// format is "json" or "toml"
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& format);

// picks the format from the file extension (.json, .toml)
ExperimentConfig load_config_file(const std::string& path);

// throws ConfigError with the offending field named
void validate_config(const ExperimentConfig& cfg);

// echo that parses back to an equal config
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace ranres
