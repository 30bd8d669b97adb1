#pragma once

#include <cstdint>
#include <span>

#include "occupancy/core.hpp"

namespace occupancy {

/// ln(n!) from a cumulative table of ln k (long-double accumulation), built
/// once on first use. Arguments beyond the table fall back to lgamma.
double log_factorial(std::int64_t n);

/// Stirling approximation of ln Gamma(lambda):
///   -lambda + (lambda - 1/2) ln lambda + ln(2 pi)/2 + ln(series)
/// where the series is truncated after `order` of 1, 1/(12 lambda),
/// 1/(288 lambda^2). Throws std::domain_error for lambda <= 0 and
/// std::invalid_argument for an order outside {0, 1, 2}.
double stirling_log_gamma(double lambda, int order);

/// Log of the number of ways to place n indistinguishable particles in g
/// boxes: ln C(n + g - 1, n).
double level_entropy(std::int64_t n, std::int64_t g);

/// S = sum_i ln C(N_i + G_i - 1, N_i), exact up to double rounding.
double entropy_exact(std::span<const std::int64_t> counts, std::span<const std::int64_t> degeneracies);
double entropy_exact(const Occupancy& occ, const DegeneracyAssignment& deg);

/// Limit entropy s_l of one regime together with its gradient and the
/// diagonal of its Hessian (the off-diagonal entries are identically zero).
///
///   s1(x) = sum x_i ln(g_i / x_i) + x_i
///   s2(x) = sum (x_i + g_i c) ln(x_i + g_i c) - x_i ln x_i
///   s3(x) = sum g_i ln x_i + g_i
///
/// In value(), a summand with x_i == 0 contributes 0. Derivatives require
/// x_i > 0 and throw std::domain_error otherwise.
class EntropyModel {
 public:
  EntropyModel(Regime regime, Vector weights, double c = 1.0);
  static EntropyModel for_spec(const EnsembleSpec& spec);

  Regime regime() const noexcept { return regime_; }
  const Vector& weights() const noexcept { return g_; }
  double c() const noexcept { return c_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Vector hessian_diagonal(const Vector& x) const;

 private:
  Regime regime_;
  Vector g_;
  double c_;
};

double limit_entropy(const EntropyModel& model, const Vector& x);
Vector limit_entropy_grad(const EntropyModel& model, const Vector& x);
Vector limit_entropy_hessian_diag(const EntropyModel& model, const Vector& x);

/// h(N): N for the high and proportional regimes, G(N) for the low regime.
double scaling_factor(const EnsembleSpec& spec, std::int64_t n);

/// |S(x,N)/h(N) - s_l(x) - kappa(N)| where kappa(N) removes the x-independent
/// offset, measured at the reference point x_ref = g. x must be representable
/// at N (every x_i N an integer); S at x_ref uses the continuous
/// (lgamma) extension since g N is generally not integral.
double approximation_error(const EnsembleSpec& spec, std::int64_t n, const Vector& x);

}  // namespace occupancy
