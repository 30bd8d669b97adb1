#include <doctest.h>

#include <cmath>
#include <random>

#include "occupancy/entropy.hpp"
#include "support.hpp"

using namespace occupancy;
using testing::make_spec;

TEST_CASE("log factorial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(4) == doctest::Approx(3.1780538303479458).epsilon(1e-15));
  CHECK(log_factorial(10) == doctest::Approx(15.104412573075516).epsilon(1e-15));
  for (std::int64_t n : {100, 12345, 2000000, 3000000}) {
    CHECK(log_factorial(n) == doctest::Approx(std::lgamma(static_cast<double>(n) + 1.0)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
}

TEST_CASE("stirling series") {
  // ln Gamma(10) = ln 9!
  const double exact = 12.801827480081469;
  const double err2 = std::abs(stirling_log_gamma(10.0, 2) - exact);
  // The order-2 series leaves the 139/(51840 lambda^3) term.
  CHECK(err2 < 139.0 / (51840.0 * 1000.0) * 1.01);
  CHECK(std::abs(stirling_log_gamma(10.0, 1) - exact) > err2);
  CHECK(std::abs(stirling_log_gamma(10.0, 0) - exact) > std::abs(stirling_log_gamma(10.0, 1) - exact));
  CHECK(std::abs(stirling_log_gamma(1.0, 0)) < 0.09);
  for (double lambda : {11.0, 100.0, 1e4}) {
    CHECK(stirling_log_gamma(lambda + 1.0, 2) ==
          doctest::Approx(log_factorial(static_cast<std::int64_t>(lambda))).epsilon(2e-7));
  }
  CHECK_THROWS_AS(stirling_log_gamma(0.0, 2), std::domain_error);
  CHECK_THROWS_AS(stirling_log_gamma(2.0, 3), std::invalid_argument);
}

TEST_CASE("exact entropy") {
  CHECK(level_entropy(0, 5) == 0.0);
  CHECK(level_entropy(3, 1) == doctest::Approx(0.0));
  const std::vector<std::int64_t> counts{2, 1};
  const std::vector<std::int64_t> degs{3, 2};
  CHECK(entropy_exact(counts, degs) == doctest::Approx(std::log(12.0)).epsilon(1e-14));
  DegeneracyAssignment d{5, degs};
  CHECK(entropy_exact(Occupancy(3, {2, 1}), d) == doctest::Approx(std::log(12.0)).epsilon(1e-14));
}

TEST_CASE("limit entropy values") {
  CHECK(EntropyModel(Regime::HighDegeneracy, Vector::Ones(1)).value(Vector::Ones(1)) == doctest::Approx(1.0));
  const Vector half = Vector::Constant(2, 0.5);
  CHECK(EntropyModel(Regime::Proportional, half, 1.0).value(half) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const EntropyModel low(Regime::LowDegeneracy, half);
  Vector with_zero(2);
  with_zero << 1.0, 0.0;
  CHECK(low.value(with_zero) == doctest::Approx(0.5));
  CHECK_THROWS_AS(low.gradient(with_zero), std::domain_error);
  CHECK_THROWS_AS(low.hessian_diagonal(with_zero), std::domain_error);
}

TEST_CASE("limit entropy derivatives") {
  const Vector half = Vector::Constant(2, 0.5);
  const Vector d1 = EntropyModel(Regime::HighDegeneracy, half).hessian_diagonal(half);
  CHECK(d1[0] == doctest::Approx(-2.0));
  CHECK(d1[1] == doctest::Approx(-2.0));

  Vector g(3);
  g << 0.2, 0.3, 0.5;
  const Vector grad3 = EntropyModel(Regime::LowDegeneracy, g).gradient(g);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(grad3[i] == doctest::Approx(1.0));
}

TEST_CASE("finite-difference agreement of gradients and Hessians") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (Regime regime : {Regime::HighDegeneracy, Regime::Proportional, Regime::LowDegeneracy}) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector g(3);
      g << unit(rng), unit(rng), unit(rng);
      g /= g.sum();
      Vector x(3);
      x << unit(rng), unit(rng), unit(rng);
      x /= x.sum();
      const EntropyModel model(regime, g, 0.5 + unit(rng));
      const Vector grad = model.gradient(x);
      const Vector hess = model.hessian_diagonal(x);
      for (Eigen::Index i = 0; i < 3; ++i) {
        const double h = 1e-6 * x[i];
        Vector up = x, down = x;
        up[i] += h;
        down[i] -= h;
        const double fd = (model.value(up) - model.value(down)) / (2 * h);
        CHECK(std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])) < 1e-6);
        const double fd2 = (model.gradient(up)[i] - model.gradient(down)[i]) / (2 * h);
        CHECK(std::abs(fd2 - hess[i]) / std::max(1.0, std::abs(hess[i])) < 1e-5);
      }
    }
  }
}

TEST_CASE("scaling factor") {
  CHECK(scaling_factor(make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::Proportional), 100) == 100.0);
  CHECK(scaling_factor(make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::LowDegeneracy), 100) == 10.0);
  CHECK(scaling_factor(make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::HighDegeneracy), 7) == 7.0);
}

TEST_CASE("approximation error shrinks with N") {
  const EnsembleSpec high = make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::HighDegeneracy);
  Vector x(2);
  x << 0.7, 0.3;
  const double e50 = approximation_error(high, 50, x);
  const double e100 = approximation_error(high, 100, x);
  const double e200 = approximation_error(high, 200, x);
  CHECK(e50 > e100);
  CHECK(e100 > e200);

  // The reference point carries no error by construction.
  CHECK(approximation_error(high, 100, Vector::Constant(2, 0.5)) == doctest::Approx(0.0).epsilon(1e-12));

  const EnsembleSpec prop = make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::Proportional);
  CHECK(approximation_error(prop, 400, x) < approximation_error(prop, 100, x));

  const EnsembleSpec low = make_spec({"1", "2"}, {0.5, 0.5}, "7/5", Regime::LowDegeneracy);
  CHECK(approximation_error(low, 1000, x) < approximation_error(low, 100, x));

  CHECK_THROWS_AS(approximation_error(high, 7, x), std::invalid_argument);
}
