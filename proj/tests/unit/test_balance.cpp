#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "phishguard/balance.hpp"
#include "phishguard/error.hpp"
#include "support.hpp"

using namespace phishguard;

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

/// Brute-force k nearest minority neighbors of row a (ties: lower index).
std::vector<std::size_t> knn(const Matrix& X, const std::vector<std::size_t>& minority, std::size_t a, std::size_t k) {
  std::vector<std::size_t> others;
  for (std::size_t i : minority) {
    if (i != a) others.push_back(i);
  }
  std::stable_sort(others.begin(), others.end(),
                   [&](std::size_t p, std::size_t q) { return dist2(X.row(a), X.row(p)) < dist2(X.row(a), X.row(q)); });
  others.resize(std::min(k, others.size()));
  return others;
}

/// Smallest residual of s against any segment from a minority row to one of
/// its k nearest minority neighbors, restricted to u in [0, 1].
double segment_residual(const Matrix& X, const std::vector<std::size_t>& minority, std::size_t k,
                        std::span<const double> s) {
  double best = INFINITY;
  for (std::size_t a : minority) {
    for (std::size_t b : knn(X, minority, a, k)) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        num += (s[j] - X(a, j)) * (X(b, j) - X(a, j));
        den += (X(b, j) - X(a, j)) * (X(b, j) - X(a, j));
      }
      const double u = den > 0 ? num / den : 0.0;
      if (u < -1e-12 || u > 1 + 1e-12) continue;
      double r = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double e = s[j] - (X(a, j) + u * (X(b, j) - X(a, j)));
        r += e * e;
      }
      best = std::min(best, std::sqrt(r));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("smote balances classes and keeps originals first") {
  const Matrix X = pgtest::random_matrix(60, 3, 1);
  Labels y(60, 0);
  for (std::size_t i = 0; i < 12; ++i) y[i * 5] = 1;
  const SmoteResult r = smote(X, y, {5, 1.0, 42});
  CHECK(r.minority_label == 1);
  CHECK(r.synthetic_count == 36);
  CHECK(std::count(r.y.begin(), r.y.end(), 1) == 48);
  CHECK(std::count(r.y.begin(), r.y.end(), 0) == 48);
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(r.y[i] == y[i]);
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.X(i, j) == X(i, j));
  }
}

TEST_CASE("every synthetic row lies on a minority-neighbor segment") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 40 + seed * 3;
    const Matrix X = pgtest::random_matrix(n, 2 + seed % 3, 100 + seed);
    Labels y(n, 0);
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < n; i += 4) {
      y[i] = 1;
      minority.push_back(i);
    }
    const SmoteResult r = smote(X, y, {5, 1.0, seed});
    CHECK(std::count(r.y.begin(), r.y.end(), 1) == std::count(r.y.begin(), r.y.end(), 0));
    for (std::size_t t = n; t < r.X.rows(); ++t) {
      CHECK(r.y[t] == 1);
      CHECK(segment_residual(X, minority, r.k_used, r.X.row(t)) < 1e-9);
    }
  }
}

TEST_CASE("smote handles the minority label being 0") {
  const Matrix X = pgtest::random_matrix(30, 2, 3);
  Labels y(30, 1);
  y[0] = y[7] = y[20] = 0;
  const SmoteResult r = smote(X, y, {5, 1.0, 1});
  CHECK(r.minority_label == 0);
  CHECK(r.k_used == 2);
  CHECK(std::count(r.y.begin(), r.y.end(), 0) == 27);
}

TEST_CASE("smote target ratio and no-op cases") {
  const Matrix X = pgtest::random_matrix(50, 2, 4);
  Labels y(50, 0);
  for (std::size_t i = 0; i < 10; ++i) y[i] = 1;
  const SmoteResult half = smote(X, y, {5, 0.5, 1});
  CHECK(std::count(half.y.begin(), half.y.end(), 1) == 20);

  Labels balanced(50, 0);
  for (std::size_t i = 0; i < 25; ++i) balanced[i] = 1;
  const SmoteResult none = smote(X, balanced, {5, 1.0, 1});
  CHECK(none.synthetic_count == 0);
  CHECK(none.X == X);
}

TEST_CASE("smote is deterministic per seed") {
  const Matrix X = pgtest::random_matrix(40, 3, 8);
  Labels y(40, 0);
  for (std::size_t i = 0; i < 8; ++i) y[i] = 1;
  CHECK(smote(X, y, {5, 1.0, 3}).X == smote(X, y, {5, 1.0, 3}).X);
  CHECK_FALSE(smote(X, y, {5, 1.0, 3}).X == smote(X, y, {5, 1.0, 4}).X);
}

TEST_CASE("smote rejects a single-row minority") {
  const Matrix X = pgtest::random_matrix(10, 2, 1);
  Labels y(10, 0);
  y[3] = 1;
  CHECK_THROWS_AS(smote(X, y, {5, 1.0, 1}), InvalidArgument);
}
