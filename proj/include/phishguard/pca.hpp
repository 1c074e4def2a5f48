#pragma once

#include <vector>

#include "phishguard/matrix.hpp"

namespace phishguard {

/// Principal components of mean-centered data. Rows of `components` are
/// orthonormal; each row's largest-magnitude entry is positive.
struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // m x d
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;  // non-increasing

  std::size_t input_dim() const noexcept { return mean.size(); }
  std::size_t n_components() const noexcept { return components.rows(); }

  Matrix transform(const Matrix& X) const;
  /// Maps component scores back to the input space.
  Matrix inverse_transform(const Matrix& Z) const;

  bool operator==(const PcaModel&) const = default;
};

/// Keeps the smallest number of components whose cumulative explained
/// variance ratio reaches variance_threshold, which must lie in (0, 1].
PcaModel fit_pca(const Matrix& X, double variance_threshold = 0.95);

}  // namespace phishguard
