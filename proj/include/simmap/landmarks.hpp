#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "simmap/similarity.hpp"

namespace simmap {

enum class LandmarkStrategy { random, maxmin };

std::string_view strategy_name(LandmarkStrategy s);
LandmarkStrategy parse_strategy(std::string_view text);

struct LandmarkSet {
    std::vector<NodeIndex> indices;  // distinct, in selection order
    LandmarkStrategy strategy = LandmarkStrategy::random;
    std::size_t seed_count = 0;  // maxmin only
    std::uint64_t rng_seed = 0;

    std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

/// l distinct nodes drawn uniformly without replacement (partial
/// Fisher-Yates). Deterministic in rng_seed.
LandmarkSet select_random(std::size_t n, std::size_t l, std::uint64_t rng_seed);

/// s random seeds, then greedy farthest-point picks by geodesic distance:
/// each new landmark is the non-landmark with the largest distance to its
/// nearest landmark, ties to the smallest index. One Dijkstra per landmark.
LandmarkSet select_maxmin(const SimilarityGraph& graph, std::size_t s, std::size_t l, std::uint64_t rng_seed);

}  // namespace simmap
