#pragma once

#include <optional>
#include <string_view>

#include "occupancy/core.hpp"

namespace occupancy {

enum class MaximumKind { Interior, Boundary };

std::string_view to_string(MaximumKind kind);

/// KKT multipliers: lambda for the energy cap, nu for normalization.
struct Multipliers {
  double lambda = 0.0;
  double nu = 0.0;
};

struct MaxEntSolution {
  Vector x_star;
  MaximumKind kind = MaximumKind::Interior;
  double lambda = 0.0;
  double nu = 0.0;
  Regime regime = Regime::HighDegeneracy;
  double normalization_residual = 0.0;  // |sum x - 1|
  double energy_residual = 0.0;         // |sum e x - E|, Boundary only
};

/// Interior iff E >= sum g_i e_i (equality counts as Interior). Throws
/// SpecError when E <= e_1.
MaximumKind classify_maximum(const EnsembleSpec& spec);

/// Maximizer of the regime's limit entropy over
/// {x >= 0, sum x = 1, sum e x <= E}.
MaxEntSolution solve(const EnsembleSpec& spec);

/// Limiting occupations for given multipliers:
///   high:         g_i exp(-(lambda e_i + nu))
///   proportional: g_i c / (exp(lambda e_i + nu) - 1)
///   low:          g_i / (lambda e_i + nu)
Vector occupations(const EnsembleSpec& spec, Multipliers mult);

/// Boundary-case multipliers for the high-degeneracy regime. nu is eliminated
/// in closed form and lambda found by bisection on the strictly decreasing
/// mean energy E(lambda).
Multipliers solve_regime1_multipliers(const EnsembleSpec& spec);

/// Boundary-case multipliers for the low-degeneracy regime, via nu = lambda
/// alpha and bisection on the monotone E(alpha) over alpha > -e_1.
Multipliers solve_regime3_multipliers(const EnsembleSpec& spec);

struct Regime2Options {
  std::optional<Multipliers> initial_guess;
  bool allow_fallback = true;
  int max_newton_iterations = 200;
};

struct Regime2Report {
  Multipliers multipliers;
  bool used_fallback = false;
  int newton_iterations = 0;
};

/// Boundary-case multipliers for the proportional regime: damped Newton on the
/// two constraint residuals, falling back to nested bisection (outer lambda,
/// inner nu).
Multipliers solve_regime2_multipliers(const EnsembleSpec& spec);
Regime2Report solve_regime2_multipliers(const EnsembleSpec& spec, const Regime2Options& options);

/// Brute-force maximizer of the limit entropy over grid points k/resolution
/// with every coordinate at least 1/resolution, followed by one pass over a
/// 10x finer grid around the best point. For m <= 4 and resolution <= 2000.
Vector oracle_grid_maximize(const EnsembleSpec& spec, int resolution);

}  // namespace occupancy
