#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gfdm/cloud_io.hpp"
#include "gfdm/ensemble.hpp"
#include "gfdm/errors.hpp"
#include "gfdm/problems.hpp"
#include "gfdm/sde.hpp"
#include "gfdm/weights.hpp"

namespace gfdm {

// How a run obtains its point cloud.
enum class CloudSource { generate, file };
enum class CloudKind { regular, random };

// How a convergence study derives its sequence of clouds.
enum class RefineRule { midpoint, per_axis, files };

// Fully resolved run configuration. Field defaults are the documented
// defaults; a few (rho, mu, star size, per-dimension counts) depend on the
// problem and are filled in by finalize().
struct RunConfig {
  ProblemId problem = ProblemId::diffusion1d;
  double rho = -1.0;  // negative = problem default
  double mu = -1.0;   // negative = problem default
  double final_time = 1.0;

  CloudSource cloud = CloudSource::generate;
  CloudKind cloud_kind = CloudKind::regular;
  std::string cloud_file;
  int points_per_axis = 0;  // 0 = default for the dimension
  int n_interior = 0;       // 0 = default for the dimension
  int boundary_per_face = 0;
  std::uint64_t cloud_seed = 1;

  int star_size = 0;  // 0 = default for the dimension
  WeightSpec weight;

  std::optional<double> dt;  // empty = auto by the stability rule
  double safety = 0.5;
  int realizations = 1000;
  std::uint64_t seed = 12345;
  NoiseMode noise = NoiseMode::shared_scalar;
  bool force_unstable = false;
  bool linf_final_only = false;
  int threads = 0;
  std::string out_dir = ".";
  std::vector<double> snapshot_times;  // empty = final time only
  bool dump_stencils = false;

  RefineRule refine_rule = RefineRule::midpoint;
  int refine_levels = 3;
  std::vector<int> per_axis_list;
  std::vector<std::string> cloud_files;
};

namespace detail {

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError("key \"" + key + "\": expected a boolean, got \"" + s + "\"");
}

inline double parse_config_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  if (!parse_double(s, v))
    throw ConfigError("key \"" + key + "\": expected a number, got \"" + s + "\"");
  return v;
}

inline long long parse_config_int(const std::string& s, const std::string& key) {
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (...) {
  }
  throw ConfigError("key \"" + key + "\": expected an integer, got \"" + s + "\"");
}

inline std::uint64_t parse_config_uint(const std::string& s, const std::string& key) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && s.find('-') == std::string::npos) return v;
  } catch (...) {
  }
  throw ConfigError("key \"" + key + "\": expected a nonnegative integer, got \"" +
                    s + "\"");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Read a flat key = value file: one pair per line, '#' starts a comment,
// blank lines are skipped. Duplicate keys are rejected so a typo cannot
// silently lose to an earlier line.
inline std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);

  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = detail::strip(line);
    if (text.empty()) continue;

    const size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError(path, line_no, "expected key = value");
    const std::string key = detail::strip(text.substr(0, eq));
    const std::string value = detail::strip(text.substr(eq + 1));
    if (key.empty()) throw ParseError(path, line_no, "empty key");

    for (const auto& [k, v] : entries)
      if (k == key)
        throw ParseError(path, line_no, "duplicate key \"" + key + "\"");
    entries.emplace_back(key, value);
  }
  return entries;
}

// Apply key/value pairs onto a RunConfig. Unknown keys are errors.
inline void apply_config_entries(
    RunConfig& config,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  using detail::parse_bool;
  using detail::parse_config_double;
  using detail::parse_config_int;
  using detail::parse_config_uint;

  for (const auto& [key, value] : entries) {
    if (key == "problem") {
      config.problem = parse_problem_id(value);
    } else if (key == "rho") {
      config.rho = parse_config_double(value, key);
    } else if (key == "mu") {
      config.mu = parse_config_double(value, key);
    } else if (key == "T") {
      config.final_time = parse_config_double(value, key);
    } else if (key == "cloud") {
      if (value == "generate") config.cloud = CloudSource::generate;
      else if (value == "file") config.cloud = CloudSource::file;
      else throw ConfigError("key \"cloud\": expected generate or file, got \"" + value + "\"");
    } else if (key == "cloud_kind") {
      if (value == "regular") config.cloud_kind = CloudKind::regular;
      else if (value == "random") config.cloud_kind = CloudKind::random;
      else throw ConfigError("key \"cloud_kind\": expected regular or random, got \"" + value + "\"");
    } else if (key == "cloud_file") {
      config.cloud_file = value;
    } else if (key == "points_per_axis") {
      config.points_per_axis = static_cast<int>(parse_config_int(value, key));
    } else if (key == "n_interior") {
      config.n_interior = static_cast<int>(parse_config_int(value, key));
    } else if (key == "boundary_per_face") {
      config.boundary_per_face = static_cast<int>(parse_config_int(value, key));
    } else if (key == "cloud_seed") {
      config.cloud_seed = parse_config_uint(value, key);
    } else if (key == "M") {
      config.star_size = static_cast<int>(parse_config_int(value, key));
    } else if (key == "weight") {
      config.weight.kind = parse_weight_kind(value);
    } else if (key == "weight_n") {
      config.weight.exponent = parse_config_double(value, key);
    } else if (key == "dt") {
      if (value == "auto") config.dt.reset();
      else config.dt = parse_config_double(value, key);
    } else if (key == "safety") {
      config.safety = parse_config_double(value, key);
    } else if (key == "realizations") {
      config.realizations = static_cast<int>(parse_config_int(value, key));
    } else if (key == "seed") {
      config.seed = parse_config_uint(value, key);
    } else if (key == "noise") {
      if (value == "shared") config.noise = NoiseMode::shared_scalar;
      else if (value == "per_node") config.noise = NoiseMode::per_node;
      else throw ConfigError("key \"noise\": expected shared or per_node, got \"" + value + "\"");
    } else if (key == "force_unstable") {
      config.force_unstable = parse_bool(value, key);
    } else if (key == "linf_final_only") {
      config.linf_final_only = parse_bool(value, key);
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_config_int(value, key));
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "snapshot_times") {
      config.snapshot_times.clear();
      for (const auto& item : detail::split_list(value))
        config.snapshot_times.push_back(parse_config_double(item, key));
    } else if (key == "dump_stencils") {
      config.dump_stencils = parse_bool(value, key);
    } else if (key == "refine_rule") {
      if (value == "midpoint") config.refine_rule = RefineRule::midpoint;
      else if (value == "per_axis") config.refine_rule = RefineRule::per_axis;
      else if (value == "files") config.refine_rule = RefineRule::files;
      else throw ConfigError("key \"refine_rule\": expected midpoint, per_axis, or files, got \"" + value + "\"");
    } else if (key == "refine_levels") {
      config.refine_levels = static_cast<int>(parse_config_int(value, key));
    } else if (key == "per_axis_list") {
      config.per_axis_list.clear();
      for (const auto& item : detail::split_list(value))
        config.per_axis_list.push_back(static_cast<int>(parse_config_int(item, key)));
    } else if (key == "cloud_files") {
      config.cloud_files = detail::split_list(value);
    } else {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
}

// Fill problem-dependent defaults and validate ranges.
inline void finalize_config(RunConfig& config) {
  const int dim = problem_dim(config.problem);
  if (config.rho < 0.0) config.rho = default_rho(config.problem);
  if (config.mu < 0.0) config.mu = default_mu(config.problem);
  if (config.points_per_axis == 0) config.points_per_axis = dim == 3 ? 5 : 11;
  if (config.n_interior == 0) config.n_interior = dim == 1 ? 8 : 50;
  if (config.boundary_per_face == 0)
    config.boundary_per_face = dim == 1 ? 1 : (dim == 2 ? 5 : 3);
  if (config.star_size == 0) config.star_size = default_star_size(dim);

  if (!(config.rho > 0.0)) throw ConfigError("rho must be positive");
  if (config.mu < 0.0) throw ConfigError("mu must be nonnegative");
  if (!(config.final_time > 0.0)) throw ConfigError("T must be positive");
  if (config.dt && !(*config.dt > 0.0)) throw ConfigError("dt must be positive or auto");
  if (!(config.safety > 0.0) || config.safety > 1.0)
    throw ConfigError("safety must lie in (0, 1]");
  if (config.realizations < 1) throw ConfigError("realizations must be at least 1");
  if (config.threads < 0) throw ConfigError("threads must be nonnegative");
  if (config.refine_levels < 1) throw ConfigError("refine_levels must be at least 1");
  if (config.cloud == CloudSource::file && config.cloud_file.empty())
    throw ConfigError("cloud = file requires cloud_file");
  if (config.refine_rule == RefineRule::files && config.cloud_files.empty() &&
      config.cloud_file.empty())
    throw ConfigError("refine_rule = files requires cloud_files");
  for (double t : config.snapshot_times)
    if (t < 0.0 || t > config.final_time)
      throw ConfigError("snapshot time " + std::to_string(t) +
                        " is outside [0, T]");
}

// Write the fully resolved configuration in the same key = value syntax the
// parser reads, so a run can be replayed from its echo.
inline void write_config_echo(const std::string& path, const RunConfig& config,
                              const std::vector<std::string>& notes = {}) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const auto& note : notes) out << "# " << note << '\n';
  out << "problem = " << to_string(config.problem) << '\n';
  out << "rho = " << detail::format_double(config.rho) << '\n';
  out << "mu = " << detail::format_double(config.mu) << '\n';
  out << "T = " << detail::format_double(config.final_time) << '\n';
  out << "cloud = " << (config.cloud == CloudSource::generate ? "generate" : "file") << '\n';
  out << "cloud_kind = " << (config.cloud_kind == CloudKind::regular ? "regular" : "random") << '\n';
  if (!config.cloud_file.empty()) out << "cloud_file = " << config.cloud_file << '\n';
  out << "points_per_axis = " << config.points_per_axis << '\n';
  out << "n_interior = " << config.n_interior << '\n';
  out << "boundary_per_face = " << config.boundary_per_face << '\n';
  out << "cloud_seed = " << config.cloud_seed << '\n';
  out << "M = " << config.star_size << '\n';
  out << "weight = " << to_string(config.weight.kind) << '\n';
  out << "weight_n = " << detail::format_double(config.weight.exponent) << '\n';
  if (config.dt) out << "dt = " << detail::format_double(*config.dt) << '\n';
  else out << "dt = auto\n";
  out << "safety = " << detail::format_double(config.safety) << '\n';
  out << "realizations = " << config.realizations << '\n';
  out << "seed = " << config.seed << '\n';
  out << "noise = " << (config.noise == NoiseMode::shared_scalar ? "shared" : "per_node") << '\n';
  out << "force_unstable = " << (config.force_unstable ? "true" : "false") << '\n';
  out << "linf_final_only = " << (config.linf_final_only ? "true" : "false") << '\n';
  out << "threads = " << config.threads << '\n';
  out << "out = " << config.out_dir << '\n';
  if (!config.snapshot_times.empty()) {
    out << "snapshot_times = ";
    for (size_t i = 0; i < config.snapshot_times.size(); ++i) {
      if (i) out << ',';
      out << detail::format_double(config.snapshot_times[static_cast<size_t>(i)]);
    }
    out << '\n';
  }
  out << "dump_stencils = " << (config.dump_stencils ? "true" : "false") << '\n';
  out << "refine_rule = "
      << (config.refine_rule == RefineRule::midpoint
              ? "midpoint"
              : config.refine_rule == RefineRule::per_axis ? "per_axis" : "files")
      << '\n';
  out << "refine_levels = " << config.refine_levels << '\n';
  if (!config.per_axis_list.empty()) {
    out << "per_axis_list = ";
    for (size_t i = 0; i < config.per_axis_list.size(); ++i) {
      if (i) out << ',';
      out << config.per_axis_list[i];
    }
    out << '\n';
  }
  if (!config.cloud_files.empty()) {
    out << "cloud_files = ";
    for (size_t i = 0; i < config.cloud_files.size(); ++i) {
      if (i) out << ',';
      out << config.cloud_files[i];
    }
    out << '\n';
  }
  if (!out) throw Error("failed while writing " + path);
}

}  // namespace gfdm
