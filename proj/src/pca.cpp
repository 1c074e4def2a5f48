#include "phishguard/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"

namespace phishguard {

PcaModel fit_pca(const Matrix& X, double variance_threshold) {
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw InvalidArgument("fit_pca: variance threshold must be in (0, 1]");
  }
  if (X.rows() < 2) throw InvalidArgument("fit_pca: need at least two rows");
  audit::notify_fit("pca", X);
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += X(i, j);
  }
  for (auto& m : model.mean) m /= static_cast<double>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = X(i, j) - model.mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += centered[a] * centered[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      cov(ia, ib) /= static_cast<double>(n - 1);
      cov(ib, ia) = cov(ia, ib);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw RuntimeFailure("fit_pca: eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) total += std::max(0.0, values(i));
  if (!(total > 0.0)) throw InvalidArgument("fit_pca: data has zero variance");

  double cumulative = 0.0;
  std::size_t m = 0;
  std::vector<double> rows;
  for (std::size_t r = 0; r < d; ++r) {
    const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - r);
    const double var = std::max(0.0, values(col));
    Eigen::VectorXd v = vectors.col(col);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    }
    if (v(arg) < 0) v = -v;
    for (Eigen::Index j = 0; j < v.size(); ++j) rows.push_back(v(j));
    model.explained_variance.push_back(var);
    model.explained_variance_ratio.push_back(var / total);
    cumulative += var / total;
    ++m;
    if (cumulative >= variance_threshold - 1e-12) break;
  }
  model.components = Matrix(m, d, std::move(rows));
  return model;
}

Matrix PcaModel::transform(const Matrix& X) const {
  require_columns(X, input_dim(), "pca transform");
  const std::size_t m = n_components();
  const std::size_t d = input_dim();
  Matrix Z(X.rows(), m);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = X(i, j) - mean[j];
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += components(c, j) * centered[j];
      Z(i, c) = s;
    }
  }
  return Z;
}

Matrix PcaModel::inverse_transform(const Matrix& Z) const {
  require_columns(Z, n_components(), "pca inverse_transform");
  const std::size_t d = input_dim();
  Matrix X(Z.rows(), d);
  for (std::size_t i = 0; i < Z.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = mean[j];
      for (std::size_t c = 0; c < n_components(); ++c) s += Z(i, c) * components(c, j);
      X(i, j) = s;
    }
  }
  return X;
}

}  // namespace phishguard
