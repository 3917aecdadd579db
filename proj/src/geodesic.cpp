#include "simmap/geodesic.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "simmap/error.hpp"
#include "simmap/parallel.hpp"

namespace simmap {
namespace {

void symmetrize_block(DenseMatrix& d, std::span<const NodeIndex> sources) {
    for (std::size_t a = 0; a < sources.size(); ++a) {
        for (std::size_t b = a + 1; b < sources.size(); ++b) {
            double& ab = d(a, sources[b]);
            double& ba = d(b, sources[a]);
            ab = ba = std::min(ab, ba);
        }
    }
}

GeodesicMatrix rows_from(const SimilarityGraph& graph, std::span<const NodeIndex> sources) {
    const std::size_t n = graph.node_count();
    GeodesicMatrix out{DenseMatrix(sources.size(), n), {sources.begin(), sources.end()}};
    parallel_for(sources.size(), [&](std::size_t r) {
        const auto row = sssp(graph, sources[r]);
        std::copy(row.begin(), row.end(), out.distances.row(r).begin());
    });
    symmetrize_block(out.distances, sources);
    return out;
}

}  // namespace

std::vector<double> sssp(const SimilarityGraph& graph, NodeIndex source) {
    const std::size_t n = graph.node_count();
    if (source >= n) throw ContractError("sssp: source node out of range");

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<char> settled(n, 0);
    using Entry = std::pair<double, NodeIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    std::size_t reached = 0;
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        ++reached;
        for (const auto& nb : graph.neighbors(u)) {
            const double candidate = d + nb.weight;
            if (candidate < dist[nb.node]) {
                dist[nb.node] = candidate;
                heap.emplace(candidate, nb.node);
            }
        }
    }
    if (reached != n) {
        throw ConnectivityError("graph is disconnected: " + std::to_string(n - reached) +
                                " nodes unreachable from '" + graph.node_id(source) +
                                "'; extract the largest component first");
    }
    return dist;
}

GeodesicMatrix all_pairs(const SimilarityGraph& graph, std::size_t n_cap) {
    const std::size_t n = graph.node_count();
    if (n == 0) throw EmptyInputError("all_pairs: graph has no nodes");
    if (n > n_cap) {
        throw ResourceError("all-pairs geodesics for " + std::to_string(n) + " nodes exceed the cap of " +
                            std::to_string(n_cap) + "; use l-isomap with landmarks instead");
    }
    std::vector<NodeIndex> sources(n);
    for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<NodeIndex>(i);
    return rows_from(graph, sources);
}

GeodesicMatrix landmark_rows(const SimilarityGraph& graph, std::span<const NodeIndex> landmarks) {
    if (landmarks.empty()) throw ContractError("landmark_rows: landmark set is empty");
    std::vector<char> seen(graph.node_count(), 0);
    for (const auto l : landmarks) {
        if (l >= graph.node_count()) throw ContractError("landmark index out of range");
        if (seen[l]) throw ContractError("duplicate landmark index");
        seen[l] = 1;
    }
    return rows_from(graph, landmarks);
}

}  // namespace simmap
