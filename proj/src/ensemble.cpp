#include "occupancy/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "occupancy/entropy.hpp"

namespace occupancy {

Occupancy OccupancyTable::at(std::size_t i) const {
  auto r = row(i);
  return Occupancy(total_, std::vector<std::int64_t>(r.begin(), r.end()));
}

Vector OccupancyTable::fractions(std::size_t i) const {
  Vector x(static_cast<Eigen::Index>(levels_));
  auto r = row(i);
  const double n = static_cast<double>(total_);
  for (std::size_t k = 0; k < levels_; ++k) x[static_cast<Eigen::Index>(k)] = static_cast<double>(r[k]) / n;
  return x;
}

void OccupancyTable::push_back(std::span<const std::int64_t> counts) {
  if (counts.size() != levels_) throw std::invalid_argument("row has the wrong level count");
  data_.insert(data_.end(), counts.begin(), counts.end());
}

namespace {

struct Enumerator {
  const std::vector<std::int64_t>& a;
  std::int64_t cap;
  OccupancyTable& out;
  std::vector<std::int64_t> current;

  void fill(std::size_t level, std::int64_t remaining, std::int64_t energy) {
    const std::size_t m = a.size();
    if (level + 1 == m) {
      if (energy + a[level] * remaining <= cap) {
        current[level] = remaining;
        out.push_back(current);
      }
      return;
    }
    // Fewer particles here push more into pricier levels, so the energy of the
    // cheapest completion only grows as k drops.
    for (std::int64_t k = remaining; k >= 0; --k) {
      if (energy + a[level] * k + a[level + 1] * (remaining - k) > cap) break;
      current[level] = k;
      fill(level + 1, remaining - k, energy + a[level] * k);
    }
  }
};

}  // namespace

OccupancyTable enumerate_states(const EnsembleSpec& spec, std::int64_t n, double budget) {
  if (n < 1) throw std::invalid_argument("enumeration needs N >= 1");
  const std::size_t m = spec.levels();
  const double estimate = static_cast<double>(m) * std::pow(static_cast<double>(n + 1), static_cast<double>(m) - 1.0);
  if (estimate > budget) {
    throw BudgetExceeded("enumerating N = " + std::to_string(n) + " with m = " + std::to_string(m) +
                         " may need " + std::to_string(estimate) + " states (budget " +
                         std::to_string(budget) + "); use the Metropolis sampler instead");
  }
  const EnergyLattice lattice = energy_lattice(spec);
  OccupancyTable table(m, n);
  Enumerator e{lattice.numerators, lattice.cap_units(n), table, std::vector<std::int64_t>(m, 0)};
  e.fill(0, n, 0);
  return table;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double shift = *std::max_element(values.begin(), values.end());
  long double sum = 0.0L;
  for (double v : values) sum += std::exp(static_cast<long double>(v - shift));
  return shift + static_cast<double>(std::log(sum));
}

ExactDistribution build_distribution(const EnsembleSpec& spec, std::int64_t n, double budget) {
  return build_distribution(spec, n, degeneracies_for(spec, n), budget);
}

ExactDistribution build_distribution(const EnsembleSpec& spec, std::int64_t n,
                                     const DegeneracyAssignment& degeneracies, double budget) {
  if (degeneracies.per_level.size() != spec.levels()) {
    throw std::invalid_argument("degeneracy assignment has the wrong level count");
  }
  ExactDistribution dist;
  dist.spec = spec;
  dist.n = n;
  dist.degeneracies = degeneracies;
  dist.lattice = energy_lattice(spec);
  dist.states = enumerate_states(spec, n, budget);

  const std::size_t count = dist.states.size();
  dist.log_weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    dist.log_weights[i] = entropy_exact(dist.states.row(i), degeneracies.per_level);
  }
  dist.log_z = log_sum_exp(dist.log_weights);
  dist.pmf.resize(count);
  for (std::size_t i = 0; i < count; ++i) dist.pmf[i] = std::exp(dist.log_weights[i] - dist.log_z);
  return dist;
}

Vector exact_mean(const ExactDistribution& dist) {
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(dist.spec.levels()));
  for (std::size_t i = 0; i < dist.size(); ++i) mean += dist.pmf[i] * dist.states.fractions(i);
  return mean;
}

Matrix exact_covariance(const ExactDistribution& dist) {
  const auto m = static_cast<Eigen::Index>(dist.spec.levels());
  const Vector mean = exact_mean(dist);
  Matrix cov = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const Vector d = dist.states.fractions(i) - mean;
    cov.noalias() += dist.pmf[i] * d * d.transpose();
  }
  return cov;
}

double mgf(const ExactDistribution& dist, const Vector& xi) {
  std::vector<double> terms(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    terms[i] = dist.log_weights[i] + xi.dot(dist.states.fractions(i));
  }
  // Same reduction as log_z, so xi = 0 gives exactly 1.
  return std::exp(log_sum_exp(terms) - dist.log_z);
}

LayerDecomposition layer_decomposition(const ExactDistribution& dist) {
  LayerDecomposition out;
  out.step = dist.lattice.step;
  if (dist.size() == 0) return out;

  const std::int64_t cap = dist.lattice.cap_units(dist.n);
  std::vector<std::int64_t> slack(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) slack[i] = cap - dist.lattice.energy_units(dist.states.row(i));
  const std::int64_t min_slack = *std::min_element(slack.begin(), slack.end());
  const std::int64_t max_slack = *std::max_element(slack.begin(), slack.end());

  const std::int64_t layer_count = (max_slack - min_slack) / out.step + 1;
  out.layers.resize(static_cast<std::size_t>(layer_count));
  for (std::int64_t k = 0; k < layer_count; ++k) {
    out.layers[static_cast<std::size_t>(k)].index = k;
    out.layers[static_cast<std::size_t>(k)].slack = min_slack + k * out.step;
  }
  for (std::size_t i = 0; i < dist.size(); ++i) {
    auto& layer = out.layers[static_cast<std::size_t>((slack[i] - min_slack) / out.step)];
    layer.states.push_back(i);
    layer.probability += dist.pmf[i];
  }
  return out;
}

void write_distribution(std::ostream& out, const ExactDistribution& dist) {
  char buf[64];
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (auto c : dist.states.row(i)) out << c << ',';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", dist.log_weights[i], dist.pmf[i]);
    out << buf << '\n';
  }
}

}  // namespace occupancy
