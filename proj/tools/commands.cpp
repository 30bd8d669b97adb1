#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <ostream>
#include <thread>

#include "cli.hpp"
#include "occupancy/ensemble.hpp"
#include "occupancy/entropy.hpp"
#include "occupancy/fluctuations.hpp"
#include "occupancy/maxent.hpp"
#include "occupancy/sampler.hpp"

namespace occupancy::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_preamble(std::ostream& out, const char* command, const RunOptions& opts) {
  out << "# schema=1\n";
  out << "# command=" << command << '\n';
  if (opts.timing) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# timestamp=" << buf << '\n';
  }
}

// Runs work(i) for i in [0, count) on up to `jobs` threads; results keep index
// order and the first failure (by index) is rethrown.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, int jobs, F work) {
  std::vector<R> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        results[i] = work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

struct Row {
  std::vector<std::string> cells;
  double seconds = 0.0;
};

void write_rows(std::ostream& out, const std::vector<std::string>& header, const std::vector<Row>& rows,
                const RunOptions& opts) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (opts.timing) out << ",wall_time";
  out << '\n';
  for (const Row& row : rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) out << (i ? "," : "") << row.cells[i];
    if (opts.timing) out << ',' << num(row.seconds);
    out << '\n';
  }
}

template <typename F>
Row timed(F body) {
  const auto start = std::chrono::steady_clock::now();
  Row row;
  row.cells = body();
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

void require_n_list(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("N_list: required for this command");
}

std::uint64_t seed_of(const ExperimentConfig& cfg, const RunOptions& opts) {
  return opts.seed.value_or(cfg.seed.value_or(0));
}

ChainConfig chain_config(const ExperimentConfig& cfg, std::int64_t n, std::uint64_t seed, std::size_t samples) {
  ChainConfig chain = ChainConfig::defaults(n, cfg.spec.levels(), 0, seed);
  if (cfg.burn_in) chain.burn_in = *cfg.burn_in;
  if (cfg.thinning) chain.thinning = *cfg.thinning;
  chain.steps = cfg.steps.value_or(chain.burn_in + static_cast<std::int64_t>(samples) * chain.thinning);
  try {
    chain.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return chain;
}

std::vector<std::string> index_pairs(const char* prefix, Eigen::Index dim) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) out.push_back(std::string(prefix) + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  }
  return out;
}

void append_upper(std::vector<std::string>& cells, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) cells.push_back(num(m(i, j)));
  }
}

}  // namespace

json cmd_solve(const ExperimentConfig& cfg) {
  const MaxEntSolution sol = solve(cfg.spec);
  json out;
  out["regime"] = std::string(to_string(sol.regime));
  out["kind"] = std::string(to_string(sol.kind));
  out["x_star"] = std::vector<double>(sol.x_star.data(), sol.x_star.data() + sol.x_star.size());
  out["lambda"] = sol.lambda;
  out["nu"] = sol.nu;
  out["threshold"] = threshold_energy(cfg.spec);
  out["normalization_residual"] = sol.normalization_residual;
  out["energy_residual"] = sol.energy_residual;
  return out;
}

void cmd_lln_sweep(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
  require_n_list(cfg);
  const MaxEntSolution sol = solve(cfg.spec);
  const std::uint64_t seed = seed_of(cfg, opts);

  auto rows = parallel_map<Row>(cfg.n_list.size(), opts.jobs, [&](std::size_t k) {
    return timed([&] {
      const std::int64_t n = cfg.n_list[k];
      std::vector<std::string> cells{std::to_string(n)};
      Vector mean;
      std::vector<double> mgfs;
      try {
        const ExactDistribution dist = build_distribution(cfg.spec, n, opts.budget);
        mean = exact_mean(dist);
        for (const Vector& xi : cfg.xi_list) mgfs.push_back(mgf(dist, xi));
        cells.push_back("exact");
        cells.push_back(std::to_string(dist.size()));
      } catch (const BudgetExceeded&) {
        if (!cfg.sampler_fallback) throw;
        const ChainResult chain = metropolis_chain(cfg.spec, n, chain_config(cfg, n, seed + k, 100000));
        mean = Vector::Zero(static_cast<Eigen::Index>(cfg.spec.levels()));
        mgfs.assign(cfg.xi_list.size(), 0.0);
        for (std::size_t s = 0; s < chain.states.size(); ++s) {
          const Vector x = chain.states.fractions(s);
          mean += x;
          for (std::size_t p = 0; p < cfg.xi_list.size(); ++p) mgfs[p] += std::exp(cfg.xi_list[p].dot(x));
        }
        const auto count = static_cast<double>(chain.states.size());
        mean /= count;
        for (double& v : mgfs) v /= count;
        cells.push_back("chain");
        cells.push_back(std::to_string(chain.states.size()));
      }
      cells.push_back(num((mean - sol.x_star).lpNorm<Eigen::Infinity>()));
      for (std::size_t p = 0; p < cfg.xi_list.size(); ++p) {
        cells.push_back(num(std::abs(mgfs[p] - std::exp(cfg.xi_list[p].dot(sol.x_star)))));
      }
      return cells;
    });
  });

  write_preamble(out, "lln-sweep", opts);
  for (std::size_t p = 0; p < cfg.xi_list.size(); ++p) {
    out << "# xi_" << p << '=';
    for (Eigen::Index i = 0; i < cfg.xi_list[p].size(); ++i) out << (i ? ";" : "") << num(cfg.xi_list[p][i]);
    out << '\n';
  }
  std::vector<std::string> header{"N", "method", "samples", "mean_err"};
  for (std::size_t p = 0; p < cfg.xi_list.size(); ++p) header.push_back("mgf_err_" + std::to_string(p));
  write_rows(out, header, rows, opts);
}

void cmd_fluct_check(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
  require_n_list(cfg);
  const MaxEntSolution sol = solve(cfg.spec);
  const bool interior = sol.kind == MaximumKind::Interior;
  const auto m = static_cast<Eigen::Index>(cfg.spec.levels());
  if (!interior) {
    const std::int64_t q = energy_lattice(cfg.spec).denominator;
    for (std::int64_t n : cfg.n_list) {
      if (n % q != 0) throw ConfigError("N_list: boundary runs need every N divisible by " + std::to_string(q));
    }
  }

  auto rows = parallel_map<Row>(cfg.n_list.size(), opts.jobs, [&](std::size_t k) {
    return timed([&] {
      const std::int64_t n = cfg.n_list[k];
      const ExactDistribution dist = build_distribution(cfg.spec, n, opts.budget);
      const FluctuationSummary emp = empirical_fluctuations(dist, sol, cfg.spec);
      const FluctuationPrediction pred = predict(cfg.spec, n);
      std::vector<std::string> cells{std::to_string(n), std::string(to_string(emp.kind)), std::to_string(dist.size())};
      if (!interior) {
        for (std::size_t r = 0; r < 2; ++r) {
          cells.push_back(r < emp.layer_ratios.size() ? num(emp.layer_ratios[r]) : "nan");
        }
        cells.push_back(num(std::exp(pred.layer_log_ratio)));
      }
      append_upper(cells, emp.covariance);
      append_upper(cells, pred.covariance);
      for (Eigen::Index i = 0; i < emp.skewness.size(); ++i) cells.push_back(num(emp.skewness[i]));
      return cells;
    });
  });

  write_preamble(out, "fluct-check", opts);
  std::vector<std::string> header{"N", "kind", "states"};
  const Eigen::Index dim = interior ? m - 1 : m - 2;
  if (!interior) {
    header.insert(header.end(), {"ratio_1_0", "ratio_2_1", "pred_ratio"});
  }
  for (const auto& h : index_pairs("emp_cov_", dim)) header.push_back(h);
  for (const auto& h : index_pairs("pred_cov_", dim)) header.push_back(h);
  for (Eigen::Index i = 0; i < dim; ++i) header.push_back("skew_" + std::to_string(i + 1));
  write_rows(out, header, rows, opts);
}

void cmd_entropy_probe(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
  require_n_list(cfg);
  if (!cfg.x) throw ConfigError("x: required for entropy-probe");
  for (std::int64_t n : cfg.n_list) {
    for (Eigen::Index i = 0; i < cfg.x->size(); ++i) {
      const double units = (*cfg.x)[i] * static_cast<double>(n);
      if (std::abs(units - std::round(units)) > 1e-9) {
        throw ConfigError("x: x_i N must be an integer for every N in N_list");
      }
    }
  }
  auto rows = parallel_map<Row>(cfg.n_list.size(), opts.jobs, [&](std::size_t k) {
    return timed([&] {
      const std::int64_t n = cfg.n_list[k];
      return std::vector<std::string>{std::to_string(n), num(scaling_factor(cfg.spec, n)),
                                      num(approximation_error(cfg.spec, n, *cfg.x))};
    });
  });
  write_preamble(out, "entropy-probe", opts);
  write_rows(out, {"N", "h", "error"}, rows, opts);
}

void cmd_sample(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
  if (!cfg.n) throw ConfigError("N: required for sample");
  const std::int64_t n = *cfg.n;
  const std::uint64_t seed = seed_of(cfg, opts);
  OccupancyTable table(cfg.spec.levels(), n);
  if (cfg.method == "exact") {
    table = exact_sample(build_distribution(cfg.spec, n, opts.budget), cfg.count, seed);
  } else {
    table = metropolis_chain(cfg.spec, n, chain_config(cfg, n, seed, cfg.count)).states;
  }
  write_preamble(out, "sample", opts);
  out << "# method=" << cfg.method << " seed=" << seed << '\n';
  for (std::size_t i = 0; i < cfg.spec.levels(); ++i) out << (i ? "," : "") << 'N' << (i + 1);
  out << '\n';
  for (std::size_t s = 0; s < table.size(); ++s) {
    const auto row = table.row(s);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace occupancy::cli
