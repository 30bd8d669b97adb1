#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "occupancy/errors.hpp"
#include "occupancy/rational.hpp"

namespace occupancy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Asymptotic growth of the total degeneracy G(N) relative to N.
enum class Regime {
  HighDegeneracy,  // G/N -> infinity, Maxwell-Boltzmann limit
  Proportional,    // G/N -> c, Bose-Einstein limit
  LowDegeneracy,   // G/N -> 0, Zipf-Mandelbrot limit
};

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view name);

/// Named rule N -> G(N).
///
///   Power(p):    G(N) = ceil(N^p)
///   Linear(c):   G(N) = ceil(c N)
///   Constant(k): G(N) = k
class DegeneracySchedule {
 public:
  enum class Kind { Power, Linear, Constant };

  static DegeneracySchedule power(double exponent);
  static DegeneracySchedule linear(double slope);
  static DegeneracySchedule constant(std::int64_t total);

  std::int64_t operator()(std::int64_t n) const;

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  std::string describe() const;

 private:
  DegeneracySchedule(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_ = Kind::Power;
  double parameter_ = 2.0;
};

/// Default schedule for a regime: N^2, ceil(cN) and N^(1/2).
DegeneracySchedule default_schedule(Regime regime, double c = 1.0);

/// A problem instance. Use validate_spec() before handing it to the solvers;
/// every other entry point assumes a validated spec.
struct EnsembleSpec {
  std::vector<Rational> energies;  // strictly increasing
  std::vector<double> weights;     // g_i in (0, 1], summing to 1
  Rational energy_cap;             // E
  Regime regime = Regime::HighDegeneracy;
  DegeneracySchedule schedule = DegeneracySchedule::power(2.0);
  std::optional<double> c;  // required iff regime == Proportional

  std::size_t levels() const noexcept { return energies.size(); }
  double energy(std::size_t i) const { return energies.at(i).value(); }
  double cap() const { return energy_cap.value(); }
  Vector energy_vector() const;
  Vector weight_vector() const;
};

/// Returns the spec with every energy in lowest terms, or throws SpecError
/// naming each violated invariant.
EnsembleSpec validate_spec(EnsembleSpec spec);

/// Integer view of the energy constraint. Energies are a_i / q with a shared
/// denominator q; the cap at particle number N is floor(q E N).
struct EnergyLattice {
  std::int64_t denominator = 1;
  std::vector<std::int64_t> numerators;
  Rational cap;
  /// gcd of (a_i - a_1): the smallest nonzero change of sum(a_i N_i) at fixed N.
  std::int64_t step = 1;

  std::int64_t cap_units(std::int64_t n) const;
  std::int64_t energy_units(std::span<const std::int64_t> counts) const;
};

EnergyLattice energy_lattice(const EnsembleSpec& spec);

/// Lattice point (N_1, ..., N_m) with N_i >= 0 and sum N_i = N.
class Occupancy {
 public:
  Occupancy(std::int64_t total, std::vector<std::int64_t> counts);
  /// Additionally checks the energy cap against `lattice`.
  Occupancy(std::int64_t total, std::vector<std::int64_t> counts, const EnergyLattice& lattice);

  std::int64_t total() const noexcept { return total_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  std::size_t levels() const noexcept { return counts_.size(); }

  friend bool operator==(const Occupancy&, const Occupancy&) = default;

 private:
  std::int64_t total_;
  std::vector<std::int64_t> counts_;
};

/// x = counts / N, checked to lie on the simplex and under the energy cap.
class FractionVector {
 public:
  FractionVector(Vector x, const EnsembleSpec& spec);
  static FractionVector from_occupancy(const Occupancy& occ, const EnsembleSpec& spec);

  const Vector& values() const noexcept { return x_; }
  double operator[](Eigen::Index i) const { return x_[i]; }
  Eigen::Index size() const noexcept { return x_.size(); }

 private:
  Vector x_;
};

struct DegeneracyAssignment {
  std::int64_t total = 0;
  std::vector<std::int64_t> per_level;
};

/// Largest-remainder split of `total` in proportion to `weights`, with every
/// part at least 1. Throws SpecError when total < weights.size().
DegeneracyAssignment apportion(std::span<const double> weights, std::int64_t total);

DegeneracyAssignment degeneracies_for(const EnsembleSpec& spec, std::int64_t n);

/// sum g_i e_i: the energy of the candidate interior maximum x = g.
double threshold_energy(const EnsembleSpec& spec);

}  // namespace occupancy
