#include "simmap/landmarks.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "simmap/error.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/rng.hpp"

namespace simmap {

std::string_view strategy_name(LandmarkStrategy s) { return s == LandmarkStrategy::maxmin ? "maxmin" : "random"; }

LandmarkStrategy parse_strategy(std::string_view text) {
    if (text == "random") return LandmarkStrategy::random;
    if (text == "maxmin") return LandmarkStrategy::maxmin;
    throw ValidationError("landmark strategy must be 'random' or 'maxmin', got '" + std::string(text) + "'");
}

LandmarkSet select_random(std::size_t n, std::size_t l, std::uint64_t rng_seed) {
    if (l < 1 || l > n) {
        throw ContractError("landmark count must satisfy 1 <= l <= n (l=" + std::to_string(l) +
                            ", n=" + std::to_string(n) + ")");
    }
    std::vector<NodeIndex> pool(n);
    std::iota(pool.begin(), pool.end(), NodeIndex{0});
    Rng rng(rng_seed);
    for (std::size_t i = 0; i < l; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(l);
    return LandmarkSet{std::move(pool), LandmarkStrategy::random, 0, rng_seed};
}

LandmarkSet select_maxmin(const SimilarityGraph& graph, std::size_t s, std::size_t l, std::uint64_t rng_seed) {
    const std::size_t n = graph.node_count();
    if (s < 1 || s > l || l > n) {
        throw ContractError("maxmin requires 1 <= s <= l <= n (s=" + std::to_string(s) + ", l=" + std::to_string(l) +
                            ", n=" + std::to_string(n) + ")");
    }
    LandmarkSet set = select_random(n, s, rng_seed);
    set.strategy = LandmarkStrategy::maxmin;
    set.seed_count = s;
    if (s == l) return set;

    std::vector<char> chosen(n, 0);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    auto absorb = [&](NodeIndex landmark) {
        chosen[landmark] = 1;
        const auto row = sssp(graph, landmark);
        for (std::size_t v = 0; v < n; ++v) nearest[v] = std::min(nearest[v], row[v]);
    };
    for (const auto seed : set.indices) absorb(seed);

    set.indices.reserve(l);
    while (set.indices.size() < l) {
        NodeIndex best = 0;
        double best_dist = -1.0;
        for (NodeIndex v = 0; v < n; ++v) {
            if (!chosen[v] && nearest[v] > best_dist) {
                best = v;
                best_dist = nearest[v];
            }
        }
        set.indices.push_back(best);
        absorb(best);
    }
    return set;
}

}  // namespace simmap
