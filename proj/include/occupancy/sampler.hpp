#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "occupancy/ensemble.hpp"

namespace occupancy {

struct ChainConfig {
  std::int64_t steps = 0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;

  /// burn_in = 10 N m, thinning = N.
  static ChainConfig defaults(std::int64_t n, std::size_t levels, std::int64_t steps, std::uint64_t seed);
  /// Throws std::invalid_argument unless steps > burn_in >= 0 and thinning >= 1.
  void validate() const;
};

/// mt19937_64 with fixed-width derivations so that a seed reproduces the same
/// stream on every platform (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., bound - 1} without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// I.i.d. draws by inverse CDF over the enumerated pmf.
OccupancyTable exact_sample(const ExactDistribution& dist, std::size_t count, std::uint64_t seed);

/// Single-ball Metropolis moves targeting pmf proportional to exp(S). A move
/// picks an ordered pair (i, j), i != j, uniformly among all m(m-1) pairs and
/// proposes moving one ball from i to j; it is rejected outright when N_i = 0
/// or the energy cap would be exceeded, so the proposal stays symmetric.
class MetropolisKernel {
 public:
  MetropolisKernel(const EnsembleSpec& spec, std::int64_t n);
  MetropolisKernel(const EnsembleSpec& spec, std::int64_t n, DegeneracyAssignment degeneracies);

  std::size_t levels() const noexcept { return a_.size(); }
  std::int64_t total() const noexcept { return n_; }
  const DegeneracyAssignment& degeneracies() const noexcept { return deg_; }

  /// All balls in level 1, then balls moved up one level at a time towards
  /// g N while the cap allows.
  std::vector<std::int64_t> initial_state() const;

  bool feasible(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const;
  /// S(after) - S(before) for one ball moved from -> to; only levels from and
  /// to enter.
  double delta_entropy(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const;
  /// Probability of accepting the proposal, 0 when infeasible.
  double acceptance(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const;

  /// Advances `counts` by one step; returns whether the move was accepted.
  bool step(std::vector<std::int64_t>& counts, Rng& rng) const;

  /// Dense transition matrix over the rows of `states`, which must be closed
  /// under feasible moves (an enumerated support is).
  Matrix transition_matrix(const OccupancyTable& states) const;

 private:
  std::int64_t energy(std::span<const std::int64_t> counts) const;

  std::int64_t n_;
  DegeneracyAssignment deg_;
  std::vector<std::int64_t> a_;
  std::int64_t cap_;
  std::vector<double> g_;
};

struct ChainResult {
  OccupancyTable states{0, 0};
  std::int64_t accepted = 0;
  std::int64_t steps = 0;

  double acceptance_rate() const { return steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0; }
};

/// Runs cfg.steps moves and keeps the state after step t whenever
/// t > burn_in and (t - burn_in) is a multiple of thinning.
ChainResult metropolis_chain(const EnsembleSpec& spec, std::int64_t n, const ChainConfig& cfg);
ChainResult metropolis_chain(const MetropolisKernel& kernel, const ChainConfig& cfg);

}  // namespace occupancy
