#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace phishguard {

/// Child seed for a named stage and index. Every stochastic component of a
/// run draws its seed from the master seed through this function, so results
/// do not depend on call order or scheduling.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stage, std::uint64_t index = 0);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Seeded generator with portable conversions. The engine output of
/// std::mt19937_64 is fully specified by the standard; the standard
/// distributions are not, so the conversions are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace phishguard
