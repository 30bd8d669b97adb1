#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "occupancy/core.hpp"

namespace occupancy {

/// Row-major table of occupancy vectors sharing one level count. Used for
/// enumerated supports and for sample paths, which can run to millions of rows.
class OccupancyTable {
 public:
  explicit OccupancyTable(std::size_t levels, std::int64_t total) : levels_(levels), total_(total) {}

  std::size_t size() const noexcept { return levels_ == 0 ? 0 : data_.size() / levels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t levels() const noexcept { return levels_; }
  std::int64_t total() const noexcept { return total_; }

  std::span<const std::int64_t> row(std::size_t i) const {
    return {data_.data() + i * levels_, levels_};
  }
  Occupancy at(std::size_t i) const;
  Vector fractions(std::size_t i) const;

  void push_back(std::span<const std::int64_t> counts);
  void reserve(std::size_t rows) { data_.reserve(rows * levels_); }

  friend bool operator==(const OccupancyTable&, const OccupancyTable&) = default;

 private:
  std::size_t levels_;
  std::int64_t total_;
  std::vector<std::int64_t> data_;
};

inline constexpr double kDefaultStateBudget = 1e7;

/// All (N_1..N_m) with sum N and sum a_i N_i <= floor(q E N), first coordinate
/// descending, then the second, and so on. Throws BudgetExceeded when
/// m (N+1)^(m-1) exceeds `budget`.
OccupancyTable enumerate_states(const EnsembleSpec& spec, std::int64_t n,
                                double budget = kDefaultStateBudget);

/// Enumerated support of X_N with pmf proportional to exp(S).
struct ExactDistribution {
  EnsembleSpec spec;
  std::int64_t n = 0;
  DegeneracyAssignment degeneracies;
  EnergyLattice lattice;
  OccupancyTable states{0, 0};
  std::vector<double> log_weights;
  double log_z = 0.0;
  std::vector<double> pmf;

  std::size_t size() const noexcept { return states.size(); }
};

ExactDistribution build_distribution(const EnsembleSpec& spec, std::int64_t n,
                                     double budget = kDefaultStateBudget);
/// Same, with an explicit degeneracy assignment instead of the spec's schedule.
ExactDistribution build_distribution(const EnsembleSpec& spec, std::int64_t n,
                                     const DegeneracyAssignment& degeneracies,
                                     double budget = kDefaultStateBudget);

/// Max-shifted log(sum exp(v)).
double log_sum_exp(std::span<const double> values);

Vector exact_mean(const ExactDistribution& dist);
Matrix exact_covariance(const ExactDistribution& dist);
/// E[exp(xi . X_N)].
double mgf(const ExactDistribution& dist, const Vector& xi);

struct Layer {
  std::int64_t index = 0;  // distance from the boundary, in lattice steps
  std::int64_t slack = 0;  // floor(qEN) - sum a_i N_i
  std::vector<std::size_t> states;
  double probability = 0.0;
};

/// Support grouped by exact integer energy slack. Layer 0 holds the states of
/// maximal energy; layer k sits k * step / (qN) below it in energy per
/// particle. Layers without states are kept with probability 0.
struct LayerDecomposition {
  std::int64_t step = 1;
  std::vector<Layer> layers;
};

LayerDecomposition layer_decomposition(const ExactDistribution& dist);

/// One line per state: `N1,...,Nm,logW,pmf`.
void write_distribution(std::ostream& out, const ExactDistribution& dist);

}  // namespace occupancy
