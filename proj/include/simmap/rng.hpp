#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace simmap {

using Rng = std::mt19937_64;

/// Stage-specific sub-seed: every stage hashes its own name together with
/// the pipeline seed so that stages draw independent streams.
std::uint64_t derive_seed(std::string_view stage, std::uint64_t seed);

/// Unbiased integer in [0, bound). bound must be > 0. Portable across
/// standard libraries, unlike std::uniform_int_distribution.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Standard normal via Box-Muller (portable, deterministic).
double standard_normal(Rng& rng);

}  // namespace simmap
