#include <doctest.h>

#include "occupancy/core.hpp"
#include "support.hpp"

using namespace occupancy;
using testing::make_spec;
using testing::two_level;

TEST_CASE("rational parsing and normalization") {
  CHECK(Rational::parse("6/4") == Rational(3, 2));
  CHECK(Rational::parse("-3") == Rational(-3));
  CHECK(Rational::parse("1.25") == Rational(5, 4));
  CHECK(Rational::parse("-0.4") == Rational(-2, 5));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational::from_double(1.4) == Rational(7, 5));
  CHECK(Rational::from_double(0.1) == Rational(1, 10));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(7, 5).str() == "7/5");
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK(lcm_checked(4, 6) == 12);
}

TEST_CASE("degeneracy schedules") {
  CHECK(DegeneracySchedule::power(2.0)(7) == 49);
  CHECK(DegeneracySchedule::power(0.5)(100) == 10);
  CHECK(DegeneracySchedule::power(0.5)(101) == 11);
  CHECK(DegeneracySchedule::linear(1.5)(3) == 5);
  CHECK(DegeneracySchedule::constant(4)(1000) == 4);
  CHECK(parse_regime("proportional") == Regime::Proportional);
  CHECK(parse_regime("3") == Regime::LowDegeneracy);
  CHECK_THROWS_AS(parse_regime("medium"), SpecError);
}

TEST_CASE("spec validation collects every violation") {
  EnsembleSpec spec;
  spec.energies = {Rational(2), Rational(1)};
  spec.weights = {0.7, 0.7};
  spec.energy_cap = Rational(1, 2);
  spec.regime = Regime::HighDegeneracy;
  try {
    validate_spec(spec);
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(e.violations().size() >= 3);
    const std::string msg = e.what();
    CHECK(msg.find("strictly increasing") != std::string::npos);
    CHECK(msg.find("weight sum mismatch") != std::string::npos);
    CHECK(msg.find("empty domain") != std::string::npos);
  }
}

TEST_CASE("spec validation: regime, c and schedule consistency") {
  CHECK_THROWS_AS(make_spec({"1", "2"}, {0.5, 0.5}, "1", Regime::HighDegeneracy), SpecError);

  EnsembleSpec spec;
  spec.energies = {Rational(1), Rational(2)};
  spec.weights = {0.5, 0.5};
  spec.energy_cap = Rational(7, 5);
  spec.regime = Regime::Proportional;
  CHECK_THROWS_WITH_AS(validate_spec(spec), doctest::Contains("requires c"), SpecError);

  spec.c = 1.0;
  spec.schedule = DegeneracySchedule::power(2.0);
  CHECK_THROWS_WITH_AS(validate_spec(spec), doctest::Contains("regime/schedule mismatch"), SpecError);

  spec.schedule = DegeneracySchedule::linear(2.0);
  CHECK_THROWS_WITH_AS(validate_spec(spec), doctest::Contains("regime/schedule mismatch"), SpecError);

  spec.schedule = DegeneracySchedule::linear(1.0);
  CHECK_NOTHROW(validate_spec(spec));

  spec.regime = Regime::LowDegeneracy;
  spec.c.reset();
  spec.schedule = DegeneracySchedule::constant(3);
  CHECK_NOTHROW(validate_spec(spec));
}

TEST_CASE("energies are reduced to lowest terms") {
  const EnsembleSpec spec = make_spec({"2/2", "6/4"}, {0.5, 0.5}, "5/4", Regime::HighDegeneracy);
  CHECK(spec.energies[0] == Rational(1));
  CHECK(spec.energies[1] == Rational(3, 2));
}

TEST_CASE("threshold energy") {
  CHECK(threshold_energy(two_level("7/5", Regime::HighDegeneracy)) == doctest::Approx(1.5));
  const EnsembleSpec three = make_spec({"1", "2", "3"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, "5/2", Regime::HighDegeneracy);
  CHECK(threshold_energy(three) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("energy lattice") {
  const EnsembleSpec spec = make_spec({"1/2", "3/4", "2"}, {0.2, 0.3, 0.5}, "7/5", Regime::HighDegeneracy);
  const EnergyLattice lat = energy_lattice(spec);
  CHECK(lat.denominator == 4);
  CHECK(lat.numerators == std::vector<std::int64_t>{2, 3, 8});
  CHECK(lat.step == 1);
  // floor(4 * 7/5 * 3) = floor(16.8)
  CHECK(lat.cap_units(3) == 16);
  const std::vector<std::int64_t> counts{1, 1, 1};
  CHECK(lat.energy_units(counts) == 13);

  const EnergyLattice even = energy_lattice(make_spec({"1", "3", "5"}, {0.2, 0.3, 0.5}, "2", Regime::HighDegeneracy));
  CHECK(even.step == 2);
}

TEST_CASE("occupancy and fraction invariants") {
  CHECK_NOTHROW(Occupancy(3, {2, 1}));
  CHECK_THROWS_AS(Occupancy(3, {2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Occupancy(3, {4, -1}), std::invalid_argument);

  const EnsembleSpec spec = two_level("3/2", Regime::HighDegeneracy);
  const EnergyLattice lat = energy_lattice(spec);
  CHECK_NOTHROW(Occupancy(4, {2, 2}, lat));
  CHECK_THROWS_AS(Occupancy(4, {1, 3}, lat), std::invalid_argument);

  const FractionVector x = FractionVector::from_occupancy(Occupancy(4, {3, 1}), spec);
  CHECK(x[0] == doctest::Approx(0.75));
  CHECK_THROWS_AS(FractionVector(Vector::Constant(2, 0.6), spec), std::invalid_argument);
}

TEST_CASE("largest-remainder apportionment") {
  const std::vector<double> thirds{1.0 / 3, 2.0 / 3};
  CHECK(apportion(thirds, 10).per_level == std::vector<std::int64_t>{3, 7});

  const std::vector<double> skewed{0.01, 0.99};
  const auto floor_one = apportion(skewed, 5);
  CHECK(floor_one.per_level[0] == 1);
  CHECK(floor_one.per_level[0] + floor_one.per_level[1] == 5);

  const std::vector<double> many{0.25, 0.25, 0.25, 0.25};
  CHECK_THROWS_AS(apportion(many, 3), SpecError);

  const std::vector<double> uneven{0.2, 0.3, 0.5};
  for (std::int64_t total = 3; total < 200; ++total) {
    const auto split = apportion(uneven, total);
    std::int64_t sum = 0;
    for (auto k : split.per_level) {
      CHECK(k >= 1);
      sum += k;
    }
    CHECK(sum == total);
  }
}

TEST_CASE("degeneracies follow the schedule") {
  const auto deg = degeneracies_for(two_level("7/5", Regime::HighDegeneracy), 6);
  CHECK(deg.total == 36);
  CHECK(deg.per_level == std::vector<std::int64_t>{18, 18});
}
