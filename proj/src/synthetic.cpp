#include "phishguard/synthetic.hpp"

#include <cmath>
#include <string>

#include "phishguard/error.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

namespace {

std::vector<std::string> feature_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

}  // namespace

Dataset make_blobs(std::size_t n, std::size_t d, double distance, std::uint64_t seed) {
  if (n < 4 || d < 1) throw InvalidArgument("make_blobs: need n >= 4 and d >= 1");
  Rng rng(derive_seed(seed, "make_blobs"));
  const std::size_t informative = std::min<std::size_t>(d, 2);
  const double offset = 0.5 * distance / std::sqrt(static_cast<double>(informative));

  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i < n / 2 ? 0 : 1;
  rng.shuffle(y);

  Matrix X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = y[i] == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      X(i, j) = rng.normal() + (j < informative ? sign * offset : 0.0);
    }
  }
  return Dataset(std::move(X), std::move(y), feature_names(d), "blobs");
}

Dataset make_noisy_xor(std::size_t n, std::size_t d, double flip_probability, std::uint64_t seed) {
  if (n < 4 || d < 2) throw InvalidArgument("make_noisy_xor: need n >= 4 and d >= 2");
  Rng rng(derive_seed(seed, "make_noisy_xor"));
  Matrix X(n, d);
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    X(i, 0) = a;
    X(i, 1) = b;
    for (std::size_t j = 2; j < d; ++j) X(i, j) = rng.normal();
    int label = (a > 0.0) != (b > 0.0) ? 1 : 0;
    if (rng.uniform() < flip_probability) label = 1 - label;
    y[i] = label;
  }
  return Dataset(std::move(X), std::move(y), feature_names(d), "noisy_xor");
}

}  // namespace phishguard
