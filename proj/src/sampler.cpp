#include "occupancy/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "occupancy/entropy.hpp"

namespace occupancy {

ChainConfig ChainConfig::defaults(std::int64_t n, std::size_t levels, std::int64_t steps, std::uint64_t seed) {
  ChainConfig cfg;
  cfg.burn_in = 10 * n * static_cast<std::int64_t>(levels);
  cfg.thinning = std::max<std::int64_t>(1, n);
  cfg.steps = steps;
  cfg.seed = seed;
  return cfg;
}

void ChainConfig::validate() const {
  if (burn_in < 0) throw std::invalid_argument("chain burn_in must be >= 0");
  if (steps <= burn_in) throw std::invalid_argument("chain steps must exceed burn_in");
  if (thinning < 1) throw std::invalid_argument("chain thinning must be >= 1");
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  // Reject the top partial block of the 64-bit range.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

OccupancyTable exact_sample(const ExactDistribution& dist, std::size_t count, std::uint64_t seed) {
  OccupancyTable out(dist.spec.levels(), dist.n);
  if (dist.size() == 0) throw std::invalid_argument("cannot sample from an empty support");
  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) cdf[i] = (acc += dist.pmf[i]);

  Rng rng(seed);
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), dist.size() - 1);
    out.push_back(dist.states.row(idx));
  }
  return out;
}

MetropolisKernel::MetropolisKernel(const EnsembleSpec& spec, std::int64_t n)
    : MetropolisKernel(spec, n, degeneracies_for(spec, n)) {}

MetropolisKernel::MetropolisKernel(const EnsembleSpec& spec, std::int64_t n, DegeneracyAssignment degeneracies)
    : n_(n), deg_(std::move(degeneracies)), g_(spec.weights) {
  if (n < 1) throw std::invalid_argument("Metropolis chain needs N >= 1");
  if (deg_.per_level.size() != spec.levels()) {
    throw std::invalid_argument("degeneracy assignment has the wrong level count");
  }
  const EnergyLattice lattice = energy_lattice(spec);
  a_ = lattice.numerators;
  cap_ = lattice.cap_units(n);
}

std::int64_t MetropolisKernel::energy(std::span<const std::int64_t> counts) const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a_.size(); ++i) total += a_[i] * counts[i];
  return total;
}

std::vector<std::int64_t> MetropolisKernel::initial_state() const {
  const std::size_t m = a_.size();
  std::vector<std::int64_t> counts(m, 0);
  counts[0] = n_;
  if (energy(counts) > cap_) throw NumericError("no feasible initial state: E must exceed the lowest energy");
  std::int64_t used = a_[0] * n_;
  for (std::size_t j = 1; j < m; ++j) {
    const auto target = static_cast<std::int64_t>(std::llround(g_[j] * static_cast<double>(n_)));
    const std::int64_t cost = a_[j] - a_[0];
    std::int64_t move = std::min(target, counts[0]);
    if (cost > 0) move = std::min(move, (cap_ - used) / cost);
    move = std::max<std::int64_t>(move, 0);
    counts[0] -= move;
    counts[j] += move;
    used += move * cost;
  }
  return counts;
}

bool MetropolisKernel::feasible(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const {
  if (from == to || counts[from] == 0) return false;
  return energy(counts) - a_[from] + a_[to] <= cap_;
}

double MetropolisKernel::delta_entropy(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const {
  // ln C(n+g-1, n) changes by ln(n/(n+g-1)) when n drops by one and by
  // ln((n+g)/(n+1)) when it grows by one.
  const auto ni = static_cast<double>(counts[from]);
  const auto gi = static_cast<double>(deg_.per_level[from]);
  const auto nj = static_cast<double>(counts[to]);
  const auto gj = static_cast<double>(deg_.per_level[to]);
  return std::log(ni) - std::log(ni + gi - 1.0) + std::log(nj + gj) - std::log(nj + 1.0);
}

double MetropolisKernel::acceptance(std::span<const std::int64_t> counts, std::size_t from, std::size_t to) const {
  if (!feasible(counts, from, to)) return 0.0;
  const double ds = delta_entropy(counts, from, to);
  return ds >= 0.0 ? 1.0 : std::exp(ds);
}

bool MetropolisKernel::step(std::vector<std::int64_t>& counts, Rng& rng) const {
  const std::uint64_t m = a_.size();
  if (m < 2) return false;
  const std::uint64_t pick = rng.below(m * (m - 1));
  const auto from = static_cast<std::size_t>(pick / (m - 1));
  auto to = static_cast<std::size_t>(pick % (m - 1));
  if (to >= from) ++to;
  if (!feasible(counts, from, to)) return false;
  const double ds = delta_entropy(counts, from, to);
  if (ds < 0.0 && !(rng.uniform() < std::exp(ds))) return false;
  --counts[from];
  ++counts[to];
  return true;
}

Matrix MetropolisKernel::transition_matrix(const OccupancyTable& states) const {
  const std::size_t count = states.size();
  const std::size_t m = a_.size();
  std::map<std::vector<std::int64_t>, std::size_t> index;
  for (std::size_t s = 0; s < count; ++s) {
    auto r = states.row(s);
    index.emplace(std::vector<std::int64_t>(r.begin(), r.end()), s);
  }
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  if (m < 2) return Matrix::Identity(p.rows(), p.cols());
  const double pair = 1.0 / static_cast<double>(m * (m - 1));
  for (std::size_t s = 0; s < count; ++s) {
    auto r = states.row(s);
    std::vector<std::int64_t> next(r.begin(), r.end());
    double leave = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double acc = acceptance(r, i, j);
        if (acc == 0.0) continue;
        --next[i];
        ++next[j];
        auto it = index.find(next);
        if (it == index.end()) throw std::invalid_argument("state table is not closed under moves");
        p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(it->second)) += pair * acc;
        leave += pair * acc;
        ++next[i];
        --next[j];
      }
    }
    p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) += 1.0 - leave;
  }
  return p;
}

ChainResult metropolis_chain(const EnsembleSpec& spec, std::int64_t n, const ChainConfig& cfg) {
  return metropolis_chain(MetropolisKernel(spec, n), cfg);
}

ChainResult metropolis_chain(const MetropolisKernel& kernel, const ChainConfig& cfg) {
  cfg.validate();
  ChainResult out;
  out.states = OccupancyTable(kernel.levels(), kernel.total());
  out.states.reserve(static_cast<std::size_t>((cfg.steps - cfg.burn_in) / cfg.thinning));
  Rng rng(cfg.seed);
  std::vector<std::int64_t> counts = kernel.initial_state();
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    if (kernel.step(counts, rng)) ++out.accepted;
    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0) out.states.push_back(counts);
  }
  out.steps = cfg.steps;
  return out;
}

}  // namespace occupancy
