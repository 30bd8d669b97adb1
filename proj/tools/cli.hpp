#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "occupancy/core.hpp"

namespace occupancy::cli {

/// Malformed or inconsistent experiment configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat JSON experiment description. Spec keys: energies (strings "p/q" or
/// numbers), weights, energy_cap, regime, c, and optionally schedule
/// ("power" | "linear" | "constant") with schedule_param. Command keys:
/// N_list, xi_list, x, N, count, method ("exact" | "chain"), steps, burn_in,
/// thinning, seed, sampler_fallback.
struct ExperimentConfig {
  EnsembleSpec spec;
  std::vector<std::int64_t> n_list;
  std::vector<Vector> xi_list;
  std::optional<Vector> x;
  std::optional<std::int64_t> n;
  std::size_t count = 1000;
  std::string method = "exact";
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> burn_in;
  std::optional<std::int64_t> thinning;
  std::optional<std::uint64_t> seed;
  bool sampler_fallback = false;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  double budget = 1e7;
  bool timing = false;  // adds a wall_time column and a timestamp line
};

nlohmann::json cmd_solve(const ExperimentConfig& cfg);
void cmd_lln_sweep(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
void cmd_fluct_check(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
void cmd_entropy_probe(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
void cmd_sample(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);

/// Full command line; returns the exit status (0 ok, 1 numeric failure,
/// 2 config error). Errors go to `err` as one JSON object.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace occupancy::cli
