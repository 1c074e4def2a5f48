#include "phishguard/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

SmoteResult smote(const Matrix& X, const Labels& y, const SmoteParams& params) {
  require_binary_labels(X, y, "smote");
  if (params.k_neighbors < 1) throw InvalidArgument("smote: k_neighbors must be >= 1");
  if (!(params.target_ratio > 0.0 && params.target_ratio <= 1.0)) {
    throw InvalidArgument("smote: target_ratio must lie in (0, 1]");
  }
  audit::notify_fit("smote", X);

  const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t zeros = y.size() - ones;
  if (ones == 0 || zeros == 0) throw InvalidArgument("smote: both classes must be present");

  SmoteResult out;
  out.minority_label = ones <= zeros ? 1 : 0;
  const std::size_t minority_count = std::min(ones, zeros);
  const std::size_t majority_count = std::max(ones, zeros);
  out.X = X;
  out.y = y;

  const auto target = static_cast<std::size_t>(std::llround(params.target_ratio * static_cast<double>(majority_count)));
  if (target <= minority_count) return out;
  if (minority_count < 2) throw InvalidArgument("smote: minority class needs at least 2 rows");

  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == out.minority_label) minority.push_back(i);
  }
  const std::size_t m = minority.size();
  const std::size_t k = std::min(params.k_neighbors, m - 1);
  out.k_used = k;

  // Brute-force k-NN within the minority class.
  std::vector<std::size_t> neighbors(m * k);
  parallel_for(m, [&](std::size_t a) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(m - 1);
    const auto xa = X.row(minority[a]);
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      const auto xb = X.row(minority[b]);
      double s = 0.0;
      for (std::size_t j = 0; j < X.cols(); ++j) {
        const double dj = xa[j] - xb[j];
        s += dj * dj;
      }
      dist.emplace_back(s, b);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t t = 0; t < k; ++t) neighbors[a * k + t] = dist[t].second;
  });

  const std::size_t needed = target - minority_count;
  Matrix synthetic(needed, X.cols());
  parallel_for(needed, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, "smote", t));
    const std::size_t a = rng.below(m);
    const std::size_t b = neighbors[a * k + rng.below(k)];
    const double u = rng.uniform();
    const auto xa = X.row(minority[a]);
    const auto xb = X.row(minority[b]);
    auto dst = synthetic.row(t);
    for (std::size_t j = 0; j < X.cols(); ++j) dst[j] = xa[j] + u * (xb[j] - xa[j]);
  });

  for (std::size_t t = 0; t < needed; ++t) {
    out.X.append_row(synthetic.row(t));
    out.y.push_back(out.minority_label);
  }
  out.synthetic_count = needed;
  return out;
}

}  // namespace phishguard
