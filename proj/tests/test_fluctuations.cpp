#include <doctest.h>

#include <cmath>
#include <map>

#include "occupancy/fluctuations.hpp"
#include "support.hpp"

using namespace occupancy;
using testing::make_spec;
using testing::two_level;

TEST_CASE("interior covariance") {
  for (Regime r : {Regime::HighDegeneracy, Regime::LowDegeneracy}) {
    const FluctuationPrediction pred = predict_interior(two_level("2", r));
    CHECK(pred.kind == FluctuationKind::InteriorGaussian);
    REQUIRE(pred.covariance.rows() == 1);
    CHECK(pred.covariance(0, 0) == doctest::Approx(0.25));
  }

  for (Regime r : {Regime::HighDegeneracy, Regime::Proportional, Regime::LowDegeneracy}) {
    const EnsembleSpec spec = make_spec({"1", "2", "4"}, {0.2, 0.3, 0.5}, "4", r);
    const FluctuationPrediction pred = predict_interior(spec);
    const Matrix h = reduced_hessian(EntropyModel::for_spec(spec), spec.weight_vector());
    CHECK(((-h) * pred.covariance - Matrix::Identity(2, 2)).norm() < 1e-10);
    CHECK((pred.covariance - pred.covariance.transpose()).norm() < 1e-14);
    CHECK(pred.covariance.llt().info() == Eigen::Success);
  }

  CHECK_THROWS_AS(predict_interior(two_level("7/5", Regime::HighDegeneracy)), std::invalid_argument);
}

TEST_CASE("rotation basis") {
  const Matrix one = rotation_basis(two_level("7/5", Regime::HighDegeneracy));
  REQUIRE(one.rows() == 1);
  CHECK(std::abs(one(0, 0)) == doctest::Approx(1.0));

  const Matrix t = rotation_basis(make_spec({"1", "2", "3"}, {0.2, 0.3, 0.5}, "2", Regime::HighDegeneracy));
  CHECK(t(0, 0) == doctest::Approx(-2.0 / std::sqrt(5.0)));
  CHECK(t(1, 0) == doctest::Approx(-1.0 / std::sqrt(5.0)));
  CHECK((t.transpose() * t - Matrix::Identity(2, 2)).norm() < 1e-12);

  const Matrix t4 = rotation_basis(make_spec({"0", "1/3", "2", "7"}, {0.1, 0.2, 0.3, 0.4}, "2", Regime::HighDegeneracy));
  CHECK((t4.transpose() * t4 - Matrix::Identity(3, 3)).norm() < 1e-12);

  EnsembleSpec single;
  single.energies = {Rational(1)};
  single.weights = {1.0};
  single.energy_cap = Rational(2);
  CHECK_THROWS_AS(rotation_basis(validate_spec(single)), std::invalid_argument);
}

TEST_CASE("boundary prediction") {
  const EnsembleSpec spec = two_level("7/5", Regime::HighDegeneracy);
  const FluctuationPrediction pred = predict_boundary(spec, 100);
  CHECK(pred.kind == FluctuationKind::BoundaryMixture);
  CHECK(pred.layer_log_ratio < 0.0);
  CHECK(std::exp(pred.layer_log_ratio) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pred.covariance.size() == 0);
  CHECK(pred.layer_spacing == doctest::Approx(0.01));
  CHECK_THROWS_AS(predict_boundary(two_level("2", Regime::HighDegeneracy), 100), std::invalid_argument);

  // Energy steps of 1/2 halve the spacing.
  const EnsembleSpec half = make_spec({"1", "3/2", "5/2"}, {0.2, 0.3, 0.5}, "1.6", Regime::Proportional, 2.0);
  const FluctuationPrediction p3 = predict_boundary(half, 40);
  CHECK(p3.covariance.rows() == 1);
  CHECK(p3.covariance(0, 0) > 0.0);
  CHECK(p3.layer_log_ratio == doctest::Approx(-solve(half).lambda / 2.0).epsilon(1e-12));
}

TEST_CASE("in-plane gradient vanishes at a boundary maximum") {
  const EnsembleSpec specs[] = {
      make_spec({"1", "3/2", "5/2"}, {0.2, 0.3, 0.5}, "1.6", Regime::Proportional, 2.0),
      make_spec({"0", "1", "3"}, {0.2, 0.3, 0.5}, "1", Regime::HighDegeneracy),
      make_spec({"1", "2", "3", "5"}, {0.1, 0.2, 0.3, 0.4}, "2", Regime::LowDegeneracy),
  };
  for (const auto& spec : specs) {
    const MaxEntSolution sol = solve(spec);
    const Eigen::Index k = sol.x_star.size() - 1;
    const Vector grad = EntropyModel::for_spec(spec).gradient(sol.x_star);
    // Gradient of the reduced function: d_i - d_m.
    const Vector reduced = grad.head(k).array() - grad[k];
    const Matrix t = rotation_basis(spec);
    for (Eigen::Index c = 1; c < k; ++c) CHECK(std::abs(t.col(c).dot(reduced)) < 1e-8);
    CHECK(t.col(0).dot(reduced) > 0.0);
  }
}

TEST_CASE("layers by slack equal layers by normal coordinate") {
  const EnsembleSpec specs[] = {
      make_spec({"1", "3/2", "5/2"}, {0.2, 0.3, 0.5}, "1.6", Regime::Proportional, 2.0),
      make_spec({"1", "3", "5"}, {0.3, 0.3, 0.4}, "2", Regime::HighDegeneracy),
  };
  for (const auto& spec : specs) {
    const ExactDistribution dist = build_distribution(spec, 12);
    const LayerDecomposition layers = layer_decomposition(dist);
    const Matrix t = rotation_basis(spec);
    const Eigen::Index k = t.rows();
    const auto& top = layers.layers.front();
    const double v_top = t.col(0).dot(dist.states.fractions(top.states.front()).head(k));
    const FluctuationPrediction pred = predict_boundary(spec, 12);
    std::map<long, double> by_normal;
    for (std::size_t s = 0; s < dist.size(); ++s) {
      const double v = t.col(0).dot(dist.states.fractions(s).head(k));
      by_normal[std::lround((v_top - v) / pred.layer_spacing)] += dist.pmf[s];
    }
    for (const auto& layer : layers.layers) {
      CHECK(by_normal[static_cast<long>(layer.index)] == doctest::Approx(layer.probability).epsilon(1e-12));
    }
  }
}

TEST_CASE("empirical interior fluctuations approach the Gaussian law") {
  const EnsembleSpec spec = make_spec({"1", "2"}, {0.3, 0.7}, "2", Regime::Proportional);
  const MaxEntSolution sol = solve(spec);
  const double predicted = predict_interior(spec).covariance(0, 0);
  CHECK(predicted == doctest::Approx(1.0 / (1.0 / 0.6 + 1.0 / 1.4)));
  double prev_gap = INFINITY;
  double prev_skew = INFINITY;
  for (std::int64_t n : {64, 128, 256}) {
    const FluctuationSummary emp = empirical_fluctuations(build_distribution(spec, n), sol, spec);
    const double gap = std::abs(emp.covariance(0, 0) - predicted);
    CHECK(gap < prev_gap);
    CHECK(std::abs(emp.skewness[0]) < prev_skew);
    prev_gap = gap;
    prev_skew = std::abs(emp.skewness[0]);
  }
}

TEST_CASE("empirical boundary layer ratios approach the prediction") {
  const EnsembleSpec spec = two_level("7/5", Regime::HighDegeneracy);
  const MaxEntSolution sol = solve(spec);
  const double target = std::exp(predict_boundary(spec, 64).layer_log_ratio);
  double prev = INFINITY;
  for (std::int64_t n : {64, 128, 256}) {
    const FluctuationSummary emp = empirical_fluctuations(build_distribution(spec, n), sol, spec);
    REQUIRE(emp.layer_ratios.size() >= 2);
    const double gap = std::abs(emp.layer_ratios[0] - target);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("single level has no fluctuations") {
  EnsembleSpec single;
  single.energies = {Rational(1)};
  single.weights = {1.0};
  single.energy_cap = Rational(2);
  single = validate_spec(single);
  const MaxEntSolution sol = solve(single);
  const FluctuationSummary emp = empirical_fluctuations(build_distribution(single, 5), sol, single);
  CHECK(emp.covariance.size() == 0);
  CHECK(predict_interior(single).covariance.size() == 0);
}
