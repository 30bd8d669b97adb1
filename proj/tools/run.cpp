#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace occupancy::cli {

namespace {

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Micro-canonical occupancy ensemble: solve, enumerate, verify"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  RunOptions opts;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--jobs", opts.jobs, "parallel per-N work items")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.add_option("--budget", opts.budget, "maximum enumerated states")->check(CLI::PositiveNumber);
  app.add_flag("--timing", opts.timing, "add wall_time column and timestamp line");

  auto* solve_cmd = app.add_subcommand("solve", "maximum-entropy solution as JSON");
  auto* lln_cmd = app.add_subcommand("lln-sweep", "mean and mgf convergence across N_list");
  auto* fluct_cmd = app.add_subcommand("fluct-check", "empirical vs predicted fluctuations across N_list");
  auto* probe_cmd = app.add_subcommand("entropy-probe", "limit-entropy approximation error across N_list");
  auto* sample_cmd = app.add_subcommand("sample", "exact or Metropolis samples at N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, "config", e.what());
    return 2;
  }
  if (*seed_opt) opts.seed = seed;

  try {
    const ExperimentConfig cfg = load_config(config_path);
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw ConfigError("cannot open output: " + out_path);
    }
    std::ostream& sink = out_path.empty() ? out : file;

    if (solve_cmd->parsed()) {
      sink << cmd_solve(cfg).dump(2) << '\n';
    } else if (lln_cmd->parsed()) {
      cmd_lln_sweep(cfg, opts, sink);
    } else if (fluct_cmd->parsed()) {
      cmd_fluct_check(cfg, opts, sink);
    } else if (probe_cmd->parsed()) {
      cmd_entropy_probe(cfg, opts, sink);
    } else if (sample_cmd->parsed()) {
      cmd_sample(cfg, opts, sink);
    }
    sink.flush();
    return 0;
  } catch (const ConfigError& e) {
    report(err, "config", e.what());
    return 2;
  } catch (const SpecError& e) {
    report(err, "config", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    report(err, "config", e.what());
    return 2;
  } catch (const BudgetExceeded& e) {
    report(err, "budget", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    report(err, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    report(err, "numeric", e.what());
    return 1;
  }
}

}  // namespace occupancy::cli
