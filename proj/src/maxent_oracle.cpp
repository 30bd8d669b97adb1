// Brute-force grid search. Shares only EntropyModel::value with the solvers.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "occupancy/entropy.hpp"
#include "occupancy/maxent.hpp"

namespace occupancy {

namespace {

struct GridSearch {
  const EntropyModel& model;
  const Vector& e;
  double cap;
  double step;
  std::int64_t units;  // grid points per unit mass
  std::int64_t min_units;

  Vector x;
  Vector best;
  double best_value = -std::numeric_limits<double>::infinity();

  void consider() {
    if (e.dot(x) > cap + 1e-12) return;
    const double v = model.value(x);
    if (v > best_value) {
      best_value = v;
      best = x;
    }
  }

  // Coarse pass: every level gets k_i >= min_units grid units, the last takes the rest.
  void coarse(Eigen::Index level, std::int64_t remaining) {
    const Eigen::Index m = x.size();
    if (level + 1 == m) {
      if (remaining < min_units) return;
      x[level] = static_cast<double>(remaining) * step;
      consider();
      return;
    }
    const std::int64_t reserve = min_units * (m - level - 1);
    for (std::int64_t k = min_units; k <= remaining - reserve; ++k) {
      x[level] = static_cast<double>(k) * step;
      coarse(level + 1, remaining - k);
    }
  }
};

void refine(GridSearch& search, const Vector& center, double fine_step, Eigen::Index level,
            Vector& x) {
  const Eigen::Index m = x.size();
  if (level + 1 == m) {
    x[level] = 1.0 - (x.head(m - 1).sum());
    if (x[level] < fine_step * 0.5) return;
    search.x = x;
    search.consider();
    return;
  }
  for (int o = -10; o <= 10; ++o) {
    x[level] = center[level] + o * fine_step;
    if (x[level] < fine_step * 0.5) continue;
    refine(search, center, fine_step, level + 1, x);
  }
}

}  // namespace

Vector oracle_grid_maximize(const EnsembleSpec& spec, int resolution) {
  const auto m = static_cast<Eigen::Index>(spec.levels());
  if (m > 4) throw std::invalid_argument("grid oracle supports at most 4 levels");
  if (resolution < m || resolution > 2000) throw std::invalid_argument("grid resolution out of range");

  const EntropyModel model = EntropyModel::for_spec(spec);
  const Vector e = spec.energy_vector();
  GridSearch search{model, e, spec.cap(), 1.0 / resolution, resolution, 1, Vector::Zero(m), Vector(), -INFINITY};
  search.coarse(0, resolution);
  if (search.best.size() == 0) throw std::invalid_argument("no grid point satisfies the energy cap");

  const Vector center = search.best;
  Vector x = center;
  refine(search, center, 1.0 / (10.0 * resolution), 0, x);
  return search.best;
}

}  // namespace occupancy
