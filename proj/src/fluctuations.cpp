#include "occupancy/fluctuations.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace occupancy {

std::string_view to_string(FluctuationKind kind) {
  return kind == FluctuationKind::InteriorGaussian ? "InteriorGaussian" : "BoundaryMixture";
}

Matrix reduced_hessian(const EntropyModel& model, const Vector& x) {
  const Eigen::Index k = x.size() - 1;
  if (k < 1) return Matrix(0, 0);
  const Vector d = model.hessian_diagonal(x);
  Matrix h = Matrix::Constant(k, k, d[k]);
  h.diagonal() += d.head(k);
  return h;
}

FluctuationPrediction predict_interior(const EnsembleSpec& spec) {
  if (classify_maximum(spec) != MaximumKind::Interior) {
    throw std::invalid_argument("interior prediction requested for a boundary maximum");
  }
  FluctuationPrediction out;
  out.kind = FluctuationKind::InteriorGaussian;
  const Matrix h = reduced_hessian(EntropyModel::for_spec(spec), spec.weight_vector());
  if (h.size() == 0) {
    out.covariance = Matrix(0, 0);
    return out;
  }
  const Matrix neg = -h;
  out.covariance = neg.llt().solve(Matrix::Identity(h.rows(), h.cols()));
  return out;
}

Matrix rotation_basis(const EnsembleSpec& spec) {
  const auto m = static_cast<Eigen::Index>(spec.levels());
  if (m < 2) throw std::invalid_argument("rotation basis needs at least two levels");
  const Vector e = spec.energy_vector();
  const Vector normal = e.head(m - 1).array() - e[m - 1];
  const double len = normal.norm();
  if (!(len > 0.0)) throw std::invalid_argument("degenerate energy normal: all energies equal");

  const Eigen::Index k = m - 1;
  Matrix t(k, k);
  t.col(0) = normal / len;
  Eigen::Index filled = 1;
  for (Eigen::Index c = 0; c < k && filled < k; ++c) {
    Vector v = Vector::Unit(k, c);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) v -= t.col(j).dot(v) * t.col(j);
    }
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    t.col(filled++) = v / nv;
  }
  return t;
}

FluctuationPrediction predict_boundary(const EnsembleSpec& spec, std::int64_t n) {
  if (classify_maximum(spec) != MaximumKind::Boundary) {
    throw std::invalid_argument("boundary prediction requested for an interior maximum");
  }
  if (n < 1) throw std::invalid_argument("boundary prediction needs N >= 1");
  const MaxEntSolution sol = solve(spec);
  const EnergyLattice lattice = energy_lattice(spec);
  const Matrix t = rotation_basis(spec);
  const auto m = static_cast<Eigen::Index>(spec.levels());
  const double nn = static_cast<double>(n);
  const double h = scaling_factor(spec, n);

  FluctuationPrediction out;
  out.kind = FluctuationKind::BoundaryMixture;
  out.rotation = t;

  // One slack unit is 1/(qN) of energy per particle; along the unit normal the
  // energy changes at rate |n|.
  const Vector e = spec.energy_vector();
  const double normal_len = (e.head(m - 1).array() - e[m - 1]).matrix().norm();
  const double energy_step = static_cast<double>(lattice.step) / (static_cast<double>(lattice.denominator) * nn);
  out.layer_spacing = energy_step / normal_len;
  // Inward derivative of h(N) s along the normal is -lambda |n| h(N).
  out.layer_log_ratio = -sol.lambda * normal_len * h * out.layer_spacing;

  const Eigen::Index k = m - 2;
  if (k <= 0) {
    out.covariance = Matrix(0, 0);
    return out;
  }
  const Matrix hess = reduced_hessian(EntropyModel::for_spec(spec), sol.x_star);
  const Matrix plane = t.rightCols(k);
  const Matrix block = -(plane.transpose() * hess * plane);
  out.covariance = block.llt().solve(Matrix::Identity(k, k));
  return out;
}

FluctuationPrediction predict(const EnsembleSpec& spec, std::int64_t n) {
  return classify_maximum(spec) == MaximumKind::Interior ? predict_interior(spec) : predict_boundary(spec, n);
}

namespace {

// Weighted covariance and skewness of rows y_s with weights p_s.
void weighted_moments(const std::vector<Vector>& ys, const std::vector<double>& p, Eigen::Index dim,
                      Matrix& cov, Vector& skew) {
  Vector mean = Vector::Zero(dim);
  for (std::size_t s = 0; s < ys.size(); ++s) mean += p[s] * ys[s];
  cov = Matrix::Zero(dim, dim);
  Vector third = Vector::Zero(dim);
  for (std::size_t s = 0; s < ys.size(); ++s) {
    const Vector d = ys[s] - mean;
    cov.noalias() += p[s] * d * d.transpose();
    third += p[s] * d.array().cube().matrix();
  }
  skew = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double var = cov(i, i);
    if (var > 0.0) skew[i] = third[i] / std::pow(var, 1.5);
  }
}

}  // namespace

FluctuationSummary empirical_fluctuations(const ExactDistribution& dist, const MaxEntSolution& sol,
                                          const EnsembleSpec& spec) {
  FluctuationSummary out;
  const auto m = static_cast<Eigen::Index>(spec.levels());
  out.kind = sol.kind == MaximumKind::Interior ? FluctuationKind::InteriorGaussian
                                               : FluctuationKind::BoundaryMixture;
  out.scale = scaling_factor(spec, dist.n);
  const double root = std::sqrt(out.scale);

  if (m < 2) {
    out.covariance = Matrix::Zero(0, 0);
    out.skewness = Vector::Zero(0);
    return out;
  }

  const Eigen::Index k = m - 1;
  std::vector<Vector> ys;
  ys.reserve(dist.size());

  if (out.kind == FluctuationKind::InteriorGaussian) {
    for (std::size_t s = 0; s < dist.size(); ++s) {
      ys.push_back(root * (dist.states.fractions(s).head(k) - sol.x_star.head(k)));
    }
    weighted_moments(ys, dist.pmf, k, out.covariance, out.skewness);
    return out;
  }

  const Matrix plane = rotation_basis(spec).rightCols(k - 1);
  for (std::size_t s = 0; s < dist.size(); ++s) {
    const Vector y = dist.states.fractions(s).head(k) - sol.x_star.head(k);
    ys.push_back(root * (plane.transpose() * y));
  }
  weighted_moments(ys, dist.pmf, k - 1, out.covariance, out.skewness);

  const LayerDecomposition layers = layer_decomposition(dist);
  for (const Layer& layer : layers.layers) out.layer_masses.push_back(layer.probability);
  for (std::size_t i = 0; i + 1 < out.layer_masses.size(); ++i) {
    const double p = out.layer_masses[i];
    out.layer_ratios.push_back(p > 0.0 ? out.layer_masses[i + 1] / p
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace occupancy
