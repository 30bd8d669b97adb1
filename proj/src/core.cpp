#include "occupancy/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace occupancy {

__extension__ using wide_int = __int128;

namespace {

// ceil() that forgives floating noise on values that are mathematically
// integers, e.g. pow(100, 0.5) landing a hair above 10.
std::int64_t robust_ceil(double r) {
  if (!std::isfinite(r) || r > 9.0e18) throw NumericError("degeneracy schedule overflow");
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, std::abs(r))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(r));
}

}  // namespace

SpecError::SpecError(std::vector<std::string> violations)
    : std::invalid_argument([&] {
        std::string msg = "invalid ensemble spec:";
        for (const auto& v : violations) msg += " " + v + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::HighDegeneracy: return "high";
    case Regime::Proportional: return "proportional";
    case Regime::LowDegeneracy: return "low";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  if (name == "high" || name == "HighDegeneracy" || name == "1") return Regime::HighDegeneracy;
  if (name == "proportional" || name == "Proportional" || name == "2") return Regime::Proportional;
  if (name == "low" || name == "LowDegeneracy" || name == "3") return Regime::LowDegeneracy;
  throw SpecError("unknown regime '" + std::string(name) + "'");
}

DegeneracySchedule DegeneracySchedule::power(double exponent) {
  return DegeneracySchedule(Kind::Power, exponent);
}

DegeneracySchedule DegeneracySchedule::linear(double slope) {
  return DegeneracySchedule(Kind::Linear, slope);
}

DegeneracySchedule DegeneracySchedule::constant(std::int64_t total) {
  return DegeneracySchedule(Kind::Constant, static_cast<double>(total));
}

std::int64_t DegeneracySchedule::operator()(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("degeneracy schedule needs N >= 1");
  switch (kind_) {
    case Kind::Power: return robust_ceil(std::pow(static_cast<double>(n), parameter_));
    case Kind::Linear: return robust_ceil(parameter_ * static_cast<double>(n));
    case Kind::Constant: return static_cast<std::int64_t>(parameter_);
  }
  return 0;
}

std::string DegeneracySchedule::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Power: out << "ceil(N^" << parameter_ << ")"; break;
    case Kind::Linear: out << "ceil(" << parameter_ << "*N)"; break;
    case Kind::Constant: out << static_cast<std::int64_t>(parameter_); break;
  }
  return out.str();
}

DegeneracySchedule default_schedule(Regime regime, double c) {
  switch (regime) {
    case Regime::HighDegeneracy: return DegeneracySchedule::power(2.0);
    case Regime::Proportional: return DegeneracySchedule::linear(c);
    case Regime::LowDegeneracy: return DegeneracySchedule::power(0.5);
  }
  return DegeneracySchedule::power(2.0);
}

Vector EnsembleSpec::energy_vector() const {
  Vector out(static_cast<Eigen::Index>(levels()));
  for (std::size_t i = 0; i < levels(); ++i) out[static_cast<Eigen::Index>(i)] = energy(i);
  return out;
}

Vector EnsembleSpec::weight_vector() const {
  return Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

EnsembleSpec validate_spec(EnsembleSpec spec) {
  std::vector<std::string> errors;
  const std::size_t m = spec.energies.size();

  if (m == 0) errors.emplace_back("no energy levels (m must be >= 1)");
  if (spec.weights.size() != m) {
    errors.emplace_back("weights count " + std::to_string(spec.weights.size()) +
                        " does not match level count " + std::to_string(m));
  }
  for (auto& e : spec.energies) e = Rational(e.num(), e.den());
  for (std::size_t i = 1; i < m; ++i) {
    if (!(spec.energies[i - 1] < spec.energies[i])) {
      errors.emplace_back("energies not strictly increasing");
      break;
    }
  }
  bool weights_ok = true;
  for (double g : spec.weights) {
    if (!(g > 0.0 && g <= 1.0)) weights_ok = false;
  }
  if (!weights_ok) errors.emplace_back("weights must lie in (0, 1]");
  const double weight_sum = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
  if (std::abs(weight_sum - 1.0) > 1e-12) errors.emplace_back("weight sum mismatch: weights must sum to 1");
  if (m > 0 && !(spec.energies.front() < spec.energy_cap)) {
    errors.emplace_back("empty domain: E <= e_1");
  }

  if (spec.regime == Regime::Proportional) {
    if (!spec.c) {
      errors.emplace_back("proportional regime requires c");
    } else if (!(*spec.c > 0.0)) {
      errors.emplace_back("c must be positive");
    }
  } else if (spec.c) {
    errors.emplace_back("c is only meaningful for the proportional regime");
  }

  const auto& sched = spec.schedule;
  bool schedule_ok = true;
  switch (sched.kind()) {
    case DegeneracySchedule::Kind::Power:
      schedule_ok = sched.parameter() > 0.0;
      break;
    case DegeneracySchedule::Kind::Linear:
      schedule_ok = sched.parameter() > 0.0;
      break;
    case DegeneracySchedule::Kind::Constant:
      schedule_ok = sched.parameter() >= 1.0;
      break;
  }
  if (!schedule_ok) {
    errors.emplace_back("invalid schedule parameter for " + sched.describe());
  } else {
    std::int64_t prev = 0;
    for (std::int64_t n = 1; n <= 2000; ++n) {
      const std::int64_t g = sched(n);
      if (g < prev) {
        errors.emplace_back("schedule G(N) is not nondecreasing");
        break;
      }
      prev = g;
    }

    // Classify the schedule's asymptotics from G(N)/N at two large N.
    constexpr std::int64_t n1 = 10'000;
    constexpr std::int64_t n2 = 1'000'000;
    const double r1 = static_cast<double>(sched(n1)) / n1;
    const double r2 = static_cast<double>(sched(n2)) / n2;
    const double trend = r2 / r1;
    Regime observed = Regime::Proportional;
    if (trend > 1.01) observed = Regime::HighDegeneracy;
    if (trend < 0.99) observed = Regime::LowDegeneracy;
    if (observed != spec.regime) {
      errors.emplace_back("regime/schedule mismatch: " + sched.describe() + " behaves as " +
                          std::string(to_string(observed)) + ", spec says " +
                          std::string(to_string(spec.regime)));
    } else if (spec.regime == Regime::Proportional && spec.c && *spec.c > 0.0 &&
               std::abs(r2 - *spec.c) > 1e-3 * *spec.c) {
      errors.emplace_back("regime/schedule mismatch: G(N)/N tends to " + std::to_string(r2) +
                          ", not c = " + std::to_string(*spec.c));
    }
  }

  if (!errors.empty()) throw SpecError(std::move(errors));
  return spec;
}

std::int64_t EnergyLattice::cap_units(std::int64_t n) const {
  // floor(q * (a/b) * n) with a/b = E
  const wide_int top = static_cast<wide_int>(denominator) * cap.num() * n;
  wide_int quotient = top / cap.den();
  if (top % cap.den() != 0 && top < 0) quotient -= 1;
  return static_cast<std::int64_t>(quotient);
}

std::int64_t EnergyLattice::energy_units(std::span<const std::int64_t> counts) const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += numerators[i] * counts[i];
  return total;
}

EnergyLattice energy_lattice(const EnsembleSpec& spec) {
  EnergyLattice lattice;
  lattice.cap = spec.energy_cap;
  std::int64_t q = 1;
  for (const auto& e : spec.energies) q = lcm_checked(q, e.den());
  lattice.denominator = q;
  lattice.numerators.reserve(spec.levels());
  for (const auto& e : spec.energies) lattice.numerators.push_back(e.num() * (q / e.den()));
  std::int64_t step = 0;
  for (std::size_t i = 1; i < lattice.numerators.size(); ++i) {
    step = std::gcd(step, lattice.numerators[i] - lattice.numerators[0]);
  }
  lattice.step = step == 0 ? 1 : step;
  return lattice;
}

Occupancy::Occupancy(std::int64_t total, std::vector<std::int64_t> counts)
    : total_(total), counts_(std::move(counts)) {
  if (total_ < 1) throw std::invalid_argument("occupancy total must be positive");
  std::int64_t sum = 0;
  for (auto c : counts_) {
    if (c < 0) throw std::invalid_argument("occupancy counts must be nonnegative");
    sum += c;
  }
  if (sum != total_) throw std::invalid_argument("occupancy counts do not sum to N");
}

Occupancy::Occupancy(std::int64_t total, std::vector<std::int64_t> counts,
                     const EnergyLattice& lattice)
    : Occupancy(total, std::move(counts)) {
  if (counts_.size() != lattice.numerators.size()) {
    throw std::invalid_argument("occupancy level count does not match the spec");
  }
  if (lattice.energy_units(counts_) > lattice.cap_units(total_)) {
    throw std::invalid_argument("occupancy violates the energy cap");
  }
}

FractionVector::FractionVector(Vector x, const EnsembleSpec& spec) : x_(std::move(x)) {
  if (static_cast<std::size_t>(x_.size()) != spec.levels()) {
    throw std::invalid_argument("fraction vector has the wrong dimension");
  }
  if ((x_.array() < 0.0).any() || (x_.array() > 1.0).any()) {
    throw std::invalid_argument("fractions must lie in [0, 1]");
  }
  if (std::abs(x_.sum() - 1.0) > 1e-12) throw std::invalid_argument("fractions must sum to 1");
  if (spec.energy_vector().dot(x_) > spec.cap() + 1e-12) {
    throw std::invalid_argument("fractions violate the energy cap");
  }
}

FractionVector FractionVector::from_occupancy(const Occupancy& occ, const EnsembleSpec& spec) {
  Vector x(static_cast<Eigen::Index>(occ.levels()));
  for (std::size_t i = 0; i < occ.levels(); ++i) {
    x[static_cast<Eigen::Index>(i)] = static_cast<double>(occ[i]) / static_cast<double>(occ.total());
  }
  return FractionVector(std::move(x), spec);
}

DegeneracyAssignment apportion(std::span<const double> weights, std::int64_t total) {
  const std::size_t m = weights.size();
  if (total < static_cast<std::int64_t>(m)) {
    throw SpecError("G(N) = " + std::to_string(total) + " is smaller than the level count " +
                    std::to_string(m));
  }
  DegeneracyAssignment out;
  out.total = total;
  out.per_level.resize(m);
  std::vector<double> remainder(m);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    out.per_level[i] = static_cast<std::int64_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(out.per_level[i]);
    assigned += out.per_level[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Rounding noise can leave assigned a unit off in either direction.
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out.per_level[order[k % m]];
  for (std::size_t k = 0; assigned > total; ++k) {
    auto& level = out.per_level[order[m - 1 - k % m]];
    if (level > 0) {
      --level;
      --assigned;
    }
  }

  // Floor at one, paid for by the largest level.
  for (std::size_t i = 0; i < m; ++i) {
    while (out.per_level[i] < 1) {
      auto donor = std::max_element(out.per_level.begin(), out.per_level.end());
      --*donor;
      ++out.per_level[i];
    }
  }
  return out;
}

DegeneracyAssignment degeneracies_for(const EnsembleSpec& spec, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("degeneracies need N >= 1");
  return apportion(spec.weights, spec.schedule(n));
}

double threshold_energy(const EnsembleSpec& spec) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.levels(); ++i) total += spec.weights[i] * spec.energy(i);
  return total;
}

}  // namespace occupancy
