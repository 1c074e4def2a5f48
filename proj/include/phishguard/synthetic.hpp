#pragma once

#include <cstdint>

#include "phishguard/data.hpp"

namespace phishguard {

/// Two unit-variance Gaussian classes whose means are `distance` apart along
/// the diagonal of the first two axes (first axis when d == 1). The remaining
/// d - 2 columns are pure noise. Classes are balanced.
Dataset make_blobs(std::size_t n, std::size_t d, double distance, std::uint64_t seed);

/// x0, x1 ~ U(-1, 1), label = (x0 > 0) xor (x1 > 0), each label flipped with
/// probability `flip_probability`; columns 2..d-1 are N(0, 1) noise.
Dataset make_noisy_xor(std::size_t n, std::size_t d, double flip_probability, std::uint64_t seed);

}  // namespace phishguard
