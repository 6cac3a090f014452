#include "ranres/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ranres {

namespace {

using nlohmann::json;

// ---- TOML subset ----
// Enough for flat experiment configs: comments, [timing] / [solver] tables,
// dotted keys, strings, bools, numbers and single-line arrays. Anything
// fancier belongs in a JSON config.

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

json toml_scalar(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) {
    throw ConfigError("line " + std::to_string(line_no) + ": empty value");
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unterminated string");
    }
    return json(v.substr(1, v.size() - 2));
  }
  if (v == "true") return json(true);
  if (v == "false") return json(false);
  // numbers: integer when it looks like one, double otherwise
  try {
    std::size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      if (v.front() == '-') {
        const long long n = std::stoll(v, &used);
        if (used == v.size()) return json(n);
      } else {
        const unsigned long long n = std::stoull(v, &used);
        if (used == v.size()) return json(n);
      }
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return json(d);
  } catch (const std::exception&) {
  }
  throw ConfigError("line " + std::to_string(line_no) + ": bad value '" + v +
                    "'");
}

json toml_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": array must close on the same line");
    }
    json arr = json::array();
    std::string body = v.substr(1, v.size() - 2);
    std::string item;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!trim(item).empty()) arr.push_back(toml_scalar(item, line_no));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) arr.push_back(toml_scalar(item, line_no));
    return arr;
  }
  return toml_scalar(v, line_no);
}

json parse_toml(const std::string& text) {
  json root = json::object();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed table header");
      }
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty table");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim(s.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    json* slot = &root;
    std::size_t start = 0;
    for (auto dot = key.find('.'); dot != std::string::npos;
         dot = key.find('.', start)) {
      slot = &(*slot)[key.substr(start, dot - start)];
      start = dot + 1;
    }
    (*slot)[key.substr(start)] = toml_value(s.substr(eq + 1), line_no);
  }
  return root;
}

// ---- json -> config ----

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "': wrong type");
  }
}

void check_known_keys(const json& j, const std::vector<std::string>& known,
                      const std::string& scope) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown key '" + scope + key + "'");
    }
  }
}

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a table");
  check_known_keys(
      j,
      {"ring_sizes", "topology_file", "users_per_ru", "band_lo_bps",
       "band_hi_bps", "load_factor", "cloud_capacity", "paths_k", "severities",
       "seeds_per_severity", "base_seed", "strategies", "timing", "solver",
       "out_dir", "jobs", "write_traces"},
      "");
  ExperimentConfig cfg;
  take(j, "ring_sizes", cfg.ring_sizes);
  take(j, "topology_file", cfg.topology_file);
  take(j, "users_per_ru", cfg.users_per_ru);
  take(j, "band_lo_bps", cfg.band_lo_bps);
  take(j, "band_hi_bps", cfg.band_hi_bps);
  take(j, "load_factor", cfg.load_factor);
  take(j, "cloud_capacity", cfg.cloud_capacity);
  take(j, "paths_k", cfg.paths_k);
  take(j, "severities", cfg.severities);
  take(j, "seeds_per_severity", cfg.seeds_per_severity);
  take(j, "base_seed", cfg.base_seed);
  take(j, "strategies", cfg.strategies);
  if (j.contains("timing")) {
    const json& t = j.at("timing");
    if (!t.is_object()) throw ConfigError("'timing' must be a table");
    check_known_keys(t,
                     {"t0_s", "td_s", "detection_wait_s",
                      "reinstantiation_window_s", "tail_s", "tti_s"},
                     "timing.");
    take(t, "t0_s", cfg.timing.t0_s);
    take(t, "td_s", cfg.timing.td_s);
    take(t, "detection_wait_s", cfg.timing.detection_wait_s);
    take(t, "reinstantiation_window_s", cfg.timing.reinstantiation_window_s);
    take(t, "tail_s", cfg.timing.tail_s);
    take(t, "tti_s", cfg.timing.tti_s);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) throw ConfigError("'solver' must be a table");
    check_known_keys(s, {"node_cap", "time_limit_s"}, "solver.");
    take(s, "node_cap", cfg.solver.node_cap);
    take(s, "time_limit_s", cfg.solver.time_limit_s);
  }
  take(j, "out_dir", cfg.out_dir);
  take(j, "jobs", cfg.jobs);
  take(j, "write_traces", cfg.write_traces);
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& format) {
  json j;
  if (format == "json") {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("json parse: ") + e.what());
    }
  } else if (format == "toml") {
    j = parse_toml(text);
  } else {
    throw ConfigError("unsupported config format '" + format + "'");
  }
  ExperimentConfig cfg = from_json(j);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string format;
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".json") {
    format = "json";
  } else if (ext == ".toml") {
    format = "toml";
  } else {
    throw ConfigError("config extension must be .json or .toml: " + path);
  }
  return parse_config_text(buf.str(), format);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.topology_file.empty()) {
    if (cfg.ring_sizes.empty()) throw ConfigError("ring_sizes is empty");
    for (int n : cfg.ring_sizes) {
      if (n < 3) {
        throw ConfigError("ring_sizes: a ring needs at least 3 sites, got " +
                          std::to_string(n));
      }
    }
  } else if (!std::filesystem::exists(cfg.topology_file)) {
    throw ConfigError("topology_file does not exist: " + cfg.topology_file);
  }
  if (cfg.users_per_ru < 1) throw ConfigError("users_per_ru must be >= 1");
  if (!(cfg.band_lo_bps > 0) || cfg.band_hi_bps < cfg.band_lo_bps) {
    throw ConfigError("user rate band must satisfy 0 < band_lo <= band_hi");
  }
  if (!(cfg.load_factor > 0)) throw ConfigError("load_factor must be > 0");
  if (!(cfg.cloud_capacity > 0)) {
    throw ConfigError("cloud_capacity must be > 0");
  }
  if (cfg.paths_k < 1) throw ConfigError("paths_k must be >= 1");
  if (cfg.severities.empty()) throw ConfigError("severities is empty");
  for (double s : cfg.severities) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw ConfigError("severities must lie in [0, 1]");
    }
  }
  if (cfg.seeds_per_severity < 1) {
    throw ConfigError("seeds_per_severity must be >= 1");
  }
  if (cfg.strategies.empty()) throw ConfigError("strategies is empty");
  for (const std::string& s : cfg.strategies) {
    try {
      strategy_from_name(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!(cfg.timing.tti_s > 0)) throw ConfigError("timing.tti_s must be > 0");
  if (cfg.timing.td_s < cfg.timing.t0_s) {
    throw ConfigError("timing.td_s precedes timing.t0_s");
  }
  if (cfg.timing.detection_wait_s < 0 ||
      cfg.timing.reinstantiation_window_s < 0 || cfg.timing.tail_s < 0) {
    throw ConfigError("timing durations must be non-negative");
  }
  if (cfg.solver.node_cap < 1) throw ConfigError("solver.node_cap must be >= 1");
  if (cfg.solver.time_limit_s < 0) {
    throw ConfigError("solver.time_limit_s must be non-negative");
  }
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is empty");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["ring_sizes"] = cfg.ring_sizes;
  j["topology_file"] = cfg.topology_file;
  j["users_per_ru"] = cfg.users_per_ru;
  j["band_lo_bps"] = cfg.band_lo_bps;
  j["band_hi_bps"] = cfg.band_hi_bps;
  j["load_factor"] = cfg.load_factor;
  j["cloud_capacity"] = cfg.cloud_capacity;
  j["paths_k"] = cfg.paths_k;
  j["severities"] = cfg.severities;
  j["seeds_per_severity"] = cfg.seeds_per_severity;
  j["base_seed"] = cfg.base_seed;
  j["strategies"] = cfg.strategies;
  j["timing"]["t0_s"] = cfg.timing.t0_s;
  j["timing"]["td_s"] = cfg.timing.td_s;
  j["timing"]["detection_wait_s"] = cfg.timing.detection_wait_s;
  j["timing"]["reinstantiation_window_s"] =
      cfg.timing.reinstantiation_window_s;
  j["timing"]["tail_s"] = cfg.timing.tail_s;
  j["timing"]["tti_s"] = cfg.timing.tti_s;
  j["solver"]["node_cap"] = cfg.solver.node_cap;
  j["solver"]["time_limit_s"] = cfg.solver.time_limit_s;
  j["out_dir"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  j["write_traces"] = cfg.write_traces;
  return j.dump(2);
}

}  // namespace ranres
