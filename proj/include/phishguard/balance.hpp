#pragma once

#include <cstdint>

#include "phishguard/matrix.hpp"

namespace phishguard {

struct SmoteParams {
  std::size_t k_neighbors = 5;
  /// Minority/majority count ratio after augmentation; never lowers the
  /// current ratio.
  double target_ratio = 1.0;
  std::uint64_t seed = 0;
};

struct SmoteResult {
  Matrix X;
  Labels y;
  std::size_t synthetic_count = 0;
  int minority_label = 1;
  /// Neighbor count actually used after clamping to minority_count - 1.
  std::size_t k_used = 0;
};

/// Synthetic minority oversampling. Original rows come first and unchanged;
/// each synthetic row is x_i + u (x_nn - x_i) with u ~ U[0, 1), x_i a random
/// minority row and x_nn one of its k nearest minority neighbors
/// (Euclidean, ties to the lower row index). Sample t draws from its own
/// stream derive_seed(seed, "smote", t).
SmoteResult smote(const Matrix& X, const Labels& y, const SmoteParams& params);

}  // namespace phishguard
