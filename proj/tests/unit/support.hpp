#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phishguard/data.hpp"
#include "phishguard/matrix.hpp"
#include "phishguard/rng.hpp"

namespace pgtest {

using phishguard::Labels;
using phishguard::Matrix;

inline Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
  phishguard::Rng rng(seed);
  Matrix X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = scale * rng.normal();
  }
  return X;
}

/// Random labels with both classes present.
inline Labels random_labels(std::size_t n, std::uint64_t seed, double p1 = 0.5) {
  phishguard::Rng rng(seed);
  Labels y(n);
  for (auto& v : y) v = rng.uniform() < p1 ? 1 : 0;
  y[0] = 0;
  y[n - 1] = 1;
  return y;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double accuracy(const Labels& truth, const Labels& pred) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += truth[i] == pred[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("pgtest_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace pgtest
