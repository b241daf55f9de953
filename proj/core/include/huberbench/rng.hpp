#pragma once

#include <cstdint>
#include <random>

namespace huberbench {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for sub-stream `index` of `root`: mix64(root + index). Every parallel
/// loop in the library (trials, Monte Carlo draws) derives its per-item seed
/// this way, so results do not depend on the number of worker threads.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Number of worker threads to use when the caller passes 0.
unsigned default_thread_count();

}  // namespace huberbench
