#include "occupancy/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace occupancy {

namespace {

constexpr std::int64_t kTableSize = std::int64_t{1} << 21;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kTableSize));
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::int64_t k = 1; k < kTableSize; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[static_cast<std::size_t>(k)] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

double continuous_entropy(const Vector& x, std::int64_t n, const DegeneracyAssignment& deg) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double occupied = x[i] * static_cast<double>(n);
    const double g = static_cast<double>(deg.per_level[static_cast<std::size_t>(i)]);
    total += std::lgamma(occupied + g) - std::lgamma(occupied + 1.0) - std::lgamma(g);
  }
  return total;
}

void require_positive(const Vector& x) {
  if ((x.array() <= 0.0).any()) {
    throw std::domain_error("limit entropy derivatives need every x_i > 0");
  }
}

}  // namespace

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial of a negative number");
  if (n < kTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double stirling_log_gamma(double lambda, int order) {
  if (!(lambda > 0.0)) throw std::domain_error("stirling_log_gamma needs lambda > 0");
  if (order < 0 || order > 2) throw std::invalid_argument("stirling series order must be 0, 1 or 2");
  double series = 1.0;
  if (order >= 1) series += 1.0 / (12.0 * lambda);
  if (order >= 2) series += 1.0 / (288.0 * lambda * lambda);
  return -lambda + (lambda - 0.5) * std::log(lambda) + 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

double level_entropy(std::int64_t n, std::int64_t g) {
  return log_factorial(n + g - 1) - log_factorial(n) - log_factorial(g - 1);
}

double entropy_exact(std::span<const std::int64_t> counts, std::span<const std::int64_t> degeneracies) {
  if (counts.size() != degeneracies.size()) {
    throw std::invalid_argument("occupancy and degeneracy dimensions differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += level_entropy(counts[i], degeneracies[i]);
  return total;
}

double entropy_exact(const Occupancy& occ, const DegeneracyAssignment& deg) {
  return entropy_exact(occ.counts(), deg.per_level);
}

EntropyModel::EntropyModel(Regime regime, Vector weights, double c)
    : regime_(regime), g_(std::move(weights)), c_(c) {}

EntropyModel EntropyModel::for_spec(const EnsembleSpec& spec) {
  return EntropyModel(spec.regime, spec.weight_vector(), spec.c.value_or(1.0));
}

double EntropyModel::value(const Vector& x) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double gi = g_[i];
    switch (regime_) {
      case Regime::HighDegeneracy:
        total += xi * std::log(gi / xi) + xi;
        break;
      case Regime::Proportional: {
        const double shifted = xi + gi * c_;
        total += shifted * std::log(shifted) - xi * std::log(xi);
        break;
      }
      case Regime::LowDegeneracy:
        total += gi * std::log(xi) + gi;
        break;
    }
  }
  return total;
}

Vector EntropyModel::gradient(const Vector& x) const {
  require_positive(x);
  switch (regime_) {
    case Regime::HighDegeneracy: return (g_.array() / x.array()).log().matrix();
    case Regime::Proportional: return (1.0 + g_.array() * c_ / x.array()).log().matrix();
    case Regime::LowDegeneracy: return (g_.array() / x.array()).matrix();
  }
  return {};
}

Vector EntropyModel::hessian_diagonal(const Vector& x) const {
  require_positive(x);
  switch (regime_) {
    case Regime::HighDegeneracy: return (-1.0 / x.array()).matrix();
    case Regime::Proportional:
      return (-(g_.array() * c_) / (x.array() * (x.array() + g_.array() * c_))).matrix();
    case Regime::LowDegeneracy: return (-g_.array() / x.array().square()).matrix();
  }
  return {};
}

double limit_entropy(const EntropyModel& model, const Vector& x) { return model.value(x); }

Vector limit_entropy_grad(const EntropyModel& model, const Vector& x) { return model.gradient(x); }

Vector limit_entropy_hessian_diag(const EntropyModel& model, const Vector& x) {
  return model.hessian_diagonal(x);
}

double scaling_factor(const EnsembleSpec& spec, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("scaling factor needs N >= 1");
  if (spec.regime == Regime::LowDegeneracy) return static_cast<double>(spec.schedule(n));
  return static_cast<double>(n);
}

double approximation_error(const EnsembleSpec& spec, std::int64_t n, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != spec.levels()) {
    throw std::invalid_argument("x has the wrong dimension");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double scaled = x[i] * static_cast<double>(n);
    if (std::abs(scaled - std::round(scaled)) > 1e-9) {
      throw std::invalid_argument("x is not representable at N = " + std::to_string(n));
    }
  }
  const auto deg = degeneracies_for(spec, n);
  const EntropyModel model = EntropyModel::for_spec(spec);
  const double h = scaling_factor(spec, n);
  const Vector reference = spec.weight_vector();

  const double offset = continuous_entropy(reference, n, deg) / h - model.value(reference);
  return std::abs(continuous_entropy(x, n, deg) / h - model.value(x) - offset);
}

}  // namespace occupancy
