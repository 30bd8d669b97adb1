#include "occupancy/maxent.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace occupancy {

namespace {

constexpr int kMaxBracketSteps = 1100;
constexpr int kMaxBisections = 4000;
constexpr double kResidualTolerance = 1e-10;

// Bisection on a bracket [lo, hi] where pred(lo) is true and pred(hi) false,
// run until the midpoint is no longer representable between the ends.
double bisect(double lo, double hi, const std::function<bool(double)>& pred) {
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest positive bracket [t/2, t] (or [t, 2t]) around the crossing of a
// function that is below `target` near 0 and above it for large t.
std::pair<double, double> geometric_bracket(const std::function<double(double)>& f, double target,
                                            const char* what) {
  double t = 1.0;
  if (f(t) > target) {
    for (int i = 0; i < kMaxBracketSteps; ++i) {
      const double lower = 0.5 * t;
      if (lower == 0.0) break;
      if (f(lower) <= target) return {lower, t};
      t = lower;
    }
  } else {
    for (int i = 0; i < kMaxBracketSteps; ++i) {
      const double upper = 2.0 * t;
      if (!std::isfinite(upper)) break;
      if (f(upper) > target) return {t, upper};
      t = upper;
    }
  }
  throw NumericError(std::string("bracket growth cap exceeded while solving for ") + what);
}

double mean_energy_regime1(const Vector& g, const Vector& e, double lambda) {
  const Eigen::ArrayXd w = g.array() * (-lambda * (e.array() - e[0])).exp();
  return (w * e.array()).sum() / w.sum();
}

double mean_energy_regime3(const Vector& g, const Vector& e, double t) {
  const Eigen::ArrayXd w = g.array() / (e.array() - e[0] + t);
  return (w * e.array()).sum() / w.sum();
}

// x_i(u) = g_i c / (exp(u_i) - 1)
Vector bose_occupations(const Vector& g, double c, const Vector& e, double lambda, double nu) {
  Vector x(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) x[i] = g[i] * c / std::expm1(lambda * e[i] + nu);
  return x;
}

// Same, parametrized by s = nu + lambda e_1 so tiny s keeps full precision.
Vector bose_occupations_shifted(const Vector& g, double c, const Vector& e, double lambda, double s) {
  Vector x(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) x[i] = g[i] * c / std::expm1(lambda * (e[i] - e[0]) + s);
  return x;
}

double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

}  // namespace

std::string_view to_string(MaximumKind kind) {
  return kind == MaximumKind::Interior ? "Interior" : "Boundary";
}

MaximumKind classify_maximum(const EnsembleSpec& spec) {
  if (!(spec.energies.front() < spec.energy_cap)) throw SpecError("empty domain: E <= e_1");
  const double threshold = threshold_energy(spec);
  const double tol = 1e-12 * std::max(1.0, std::abs(threshold));
  return spec.cap() >= threshold - tol ? MaximumKind::Interior : MaximumKind::Boundary;
}

Vector occupations(const EnsembleSpec& spec, Multipliers mult) {
  const Vector g = spec.weight_vector();
  const Vector e = spec.energy_vector();
  switch (spec.regime) {
    case Regime::HighDegeneracy:
      return (g.array() * (-(mult.lambda * e.array() + mult.nu)).exp()).matrix();
    case Regime::Proportional:
      return bose_occupations(g, spec.c.value_or(1.0), e, mult.lambda, mult.nu);
    case Regime::LowDegeneracy:
      return (g.array() / (mult.lambda * e.array() + mult.nu)).matrix();
  }
  return {};
}

Multipliers solve_regime1_multipliers(const EnsembleSpec& spec) {
  const Vector g = spec.weight_vector();
  const Vector e = spec.energy_vector();
  const double target = spec.cap();
  if (mean_energy_regime1(g, e, 0.0) <= target) {
    throw std::invalid_argument("regime-1 multipliers requested for an interior maximum");
  }
  // E(lambda) decreases, so bracket on -E.
  const auto [lo, hi] = geometric_bracket([&](double l) { return -mean_energy_regime1(g, e, l); },
                                          -target, "lambda (regime 1)");
  const double lambda =
      bisect(lo, hi, [&](double l) { return mean_energy_regime1(g, e, l) > target; });
  const double nu = -lambda * e[0] + std::log((g.array() * (-lambda * (e.array() - e[0])).exp()).sum());
  return {lambda, nu};
}

Multipliers solve_regime3_multipliers(const EnsembleSpec& spec) {
  const Vector g = spec.weight_vector();
  const Vector e = spec.energy_vector();
  const double target = spec.cap();
  if (threshold_energy(spec) <= target) {
    throw std::invalid_argument("regime-3 multipliers requested for an interior maximum");
  }
  // t = alpha + e_1 > 0; E(t) rises from e_1 towards sum g e.
  const auto [lo, hi] = geometric_bracket([&](double t) { return mean_energy_regime3(g, e, t); },
                                          target, "alpha (regime 3)");
  const double t = bisect(lo, hi, [&](double s) { return mean_energy_regime3(g, e, s) <= target; });
  const double lambda = (g.array() / (e.array() - e[0] + t)).sum();
  const double alpha = t - e[0];
  return {lambda, lambda * alpha};
}

Multipliers solve_regime2_multipliers(const EnsembleSpec& spec) {
  return solve_regime2_multipliers(spec, Regime2Options{}).multipliers;
}

Regime2Report solve_regime2_multipliers(const EnsembleSpec& spec, const Regime2Options& options) {
  const Vector g = spec.weight_vector();
  const Vector e = spec.energy_vector();
  const double c = spec.c.value_or(1.0);
  const double target = spec.cap();
  if (threshold_energy(spec) <= target) {
    throw std::invalid_argument("regime-2 multipliers requested for an interior maximum");
  }

  // nu(lambda) from sum x = 1; sum x falls from +inf to 0 as s = nu + lambda e_1 grows.
  auto inner_nu = [&](double lambda) {
    auto total = [&](double s) { return -bose_occupations_shifted(g, c, e, lambda, s).sum(); };
    const auto [lo, hi] = geometric_bracket(total, -1.0, "nu (regime 2)");
    const double s = bisect(lo, hi, [&](double v) { return -total(v) > 1.0; });
    return s - lambda * e[0];
  };

  auto residual = [&](double lambda, double nu) {
    const Vector x = bose_occupations(g, c, e, lambda, nu);
    return Eigen::Vector2d(x.sum() - 1.0, e.dot(x) - target);
  };
  auto feasible = [&](double lambda, double nu) { return (lambda * e.array() + nu > 0.0).all(); };
  const double tol = 1e-14 * std::max(1.0, std::abs(target));

  Regime2Report report;
  Multipliers m;
  if (options.initial_guess) {
    m = *options.initial_guess;
  } else {
    m.lambda = solve_regime1_multipliers(spec).lambda;
    m.nu = inner_nu(m.lambda);
  }

  bool converged = false;
  if (feasible(m.lambda, m.nu)) {
    Eigen::Vector2d f = residual(m.lambda, m.nu);
    for (int it = 0; it < options.max_newton_iterations; ++it) {
      report.newton_iterations = it + 1;
      if (f.lpNorm<Eigen::Infinity>() < tol) {
        converged = true;
        break;
      }
      const Vector x = bose_occupations(g, c, e, m.lambda, m.nu);
      const Eigen::ArrayXd d = -x.array() * (1.0 + x.array() / (g.array() * c));
      Eigen::Matrix2d jac;
      jac << (d * e.array()).sum(), d.sum(), (d * e.array().square()).sum(), (d * e.array()).sum();
      const Eigen::Vector2d step = -jac.partialPivLu().solve(f);

      double t = 1.0;
      bool accepted = false;
      for (int half = 0; half < 60; ++half, t *= 0.5) {
        const double l = m.lambda + t * step[0];
        const double n = m.nu + t * step[1];
        if (!feasible(l, n)) continue;
        const Eigen::Vector2d trial = residual(l, n);
        if (trial.allFinite() && trial.norm() <= (1.0 - 1e-4 * t) * f.norm()) {
          m = {l, n};
          f = trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        converged = f.lpNorm<Eigen::Infinity>() < 1e3 * tol;
        break;
      }
    }
  }

  if (!converged) {
    if (!options.allow_fallback) {
      const Eigen::Vector2d f = feasible(m.lambda, m.nu) ? residual(m.lambda, m.nu)
                                                         : Eigen::Vector2d::Constant(INFINITY);
      throw NumericError("regime-2 Newton did not converge after " +
                         std::to_string(report.newton_iterations) + " iterations; residuals " +
                         std::to_string(f[0]) + ", " + std::to_string(f[1]));
    }
    report.used_fallback = true;
    auto energy_at = [&](double lambda) {
      return e.dot(bose_occupations_shifted(g, c, e, lambda, inner_nu(lambda) + lambda * e[0]));
    };
    const auto [lo, hi] =
        geometric_bracket([&](double l) { return -energy_at(l); }, -target, "lambda (regime 2)");
    m.lambda = bisect(lo, hi, [&](double l) { return energy_at(l) > target; });
    m.nu = inner_nu(m.lambda);
  }

  const Eigen::Vector2d f = residual(m.lambda, m.nu);
  if (!(max_abs(f[0], f[1]) < kResidualTolerance)) {
    throw NumericError("regime-2 solve failed: residuals " + std::to_string(f[0]) + ", " +
                       std::to_string(f[1]) + (report.used_fallback ? " after fallback" : ""));
  }
  report.multipliers = m;
  return report;
}

MaxEntSolution solve(const EnsembleSpec& spec) {
  MaxEntSolution sol;
  sol.regime = spec.regime;
  sol.kind = classify_maximum(spec);

  if (sol.kind == MaximumKind::Interior) {
    sol.x_star = spec.weight_vector();
    sol.lambda = 0.0;
    switch (spec.regime) {
      case Regime::HighDegeneracy: sol.nu = 0.0; break;
      case Regime::Proportional: sol.nu = std::log1p(spec.c.value_or(1.0)); break;
      case Regime::LowDegeneracy: sol.nu = 1.0; break;
    }
    sol.normalization_residual = std::abs(sol.x_star.sum() - 1.0);
    return sol;
  }

  Multipliers mult;
  switch (spec.regime) {
    case Regime::HighDegeneracy: mult = solve_regime1_multipliers(spec); break;
    case Regime::Proportional: mult = solve_regime2_multipliers(spec); break;
    case Regime::LowDegeneracy: mult = solve_regime3_multipliers(spec); break;
  }
  sol.lambda = mult.lambda;
  sol.nu = mult.nu;
  sol.x_star = occupations(spec, mult);
  sol.normalization_residual = std::abs(sol.x_star.sum() - 1.0);
  sol.energy_residual = std::abs(spec.energy_vector().dot(sol.x_star) - spec.cap());
  if (!(sol.normalization_residual < kResidualTolerance && sol.energy_residual < kResidualTolerance)) {
    throw NumericError("maximum-entropy solve left residuals " + std::to_string(sol.normalization_residual) +
                       ", " + std::to_string(sol.energy_residual));
  }
  return sol;
}

}  // namespace occupancy
