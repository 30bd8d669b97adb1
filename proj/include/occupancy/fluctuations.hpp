#pragma once

#include <cstdint>
#include <vector>

#include "occupancy/ensemble.hpp"
#include "occupancy/entropy.hpp"
#include "occupancy/maxent.hpp"

namespace occupancy {

enum class FluctuationKind { InteriorGaussian, BoundaryMixture };

std::string_view to_string(FluctuationKind kind);

/// Limiting law of the scaled fluctuation around x*. Coordinates are the
/// first m-1 fractions (x_m is eliminated through sum x = 1).
///
/// InteriorGaussian: sqrt(h(N)) (X - x*) -> N(0, covariance), covariance is
/// (m-1)x(m-1).
///
/// BoundaryMixture: in the rotated frame v = T^T (X - x*), the normal
/// coordinate lives on energy-slack layers k = 0, 1, ... with
/// p_{k+1} / p_k = exp(layer_log_ratio), and sqrt(h(N)) times the in-plane
/// coordinates is Gaussian with the (m-2)x(m-2) covariance.
struct FluctuationPrediction {
  FluctuationKind kind = FluctuationKind::InteriorGaussian;
  Matrix covariance;
  double layer_log_ratio = 0.0;
  double layer_spacing = 0.0;  // distance between layers along the first rotated axis
  Matrix rotation;
};

/// Hessian of s(x_1..x_{m-1}, 1 - sum) at x:
///   H(i,j) = s''(x_i) delta_ij + s''(x_m)
Matrix reduced_hessian(const EntropyModel& model, const Vector& x);

/// Throws std::invalid_argument for a Boundary spec.
FluctuationPrediction predict_interior(const EnsembleSpec& spec);

/// Orthonormal basis of the reduced space. The first column is the unit normal
/// n / |n| with n_i = e_i - e_m, the rest come from Gram-Schmidt over the
/// canonical directions. Throws std::invalid_argument when all energies are
/// equal or m < 2.
Matrix rotation_basis(const EnsembleSpec& spec);

/// Throws std::invalid_argument for an Interior spec.
FluctuationPrediction predict_boundary(const EnsembleSpec& spec, std::int64_t n);

FluctuationPrediction predict(const EnsembleSpec& spec, std::int64_t n);

struct FluctuationSummary {
  FluctuationKind kind = FluctuationKind::InteriorGaussian;
  double scale = 1.0;  // h(N)
  /// Interior: covariance of sqrt(h)(X - x*) in reduced coordinates.
  /// Boundary: covariance of sqrt(h) times the in-plane rotated coordinates.
  Matrix covariance;
  /// Third standardized moment of each column of the scaled vector above.
  Vector skewness;
  /// Boundary only: masses of the slack layers and p_{k+1}/p_k (NaN where
  /// p_k is 0).
  std::vector<double> layer_masses;
  std::vector<double> layer_ratios;
};

FluctuationSummary empirical_fluctuations(const ExactDistribution& dist, const MaxEntSolution& sol,
                                          const EnsembleSpec& spec);

}  // namespace occupancy
