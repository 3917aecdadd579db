#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simmap/dense.hpp"
#include "simmap/similarity.hpp"

namespace simmap {

inline constexpr std::size_t default_all_pairs_cap = 100'000;

/// Shortest-path distances from a set of source nodes (rows) to every node
/// (columns). Row r holds distances from graph node sources[r].
struct GeodesicMatrix {
    DenseMatrix distances;
    std::vector<NodeIndex> sources;

    std::size_t rows() const noexcept { return distances.rows(); }
    std::size_t cols() const noexcept { return distances.cols(); }
    bool is_square() const noexcept { return rows() == cols(); }
    double operator()(std::size_t r, std::size_t c) const { return distances(r, c); }
};

/// Dijkstra from one source. Throws ConnectivityError when a node is
/// unreachable.
std::vector<double> sssp(const SimilarityGraph& graph, NodeIndex source);

/// n x n geodesic matrix. Rows are computed independently (in parallel) and
/// then made exactly symmetric by taking min(d(i,j), d(j,i)); the two only
/// differ by summation order. Throws ResourceError when n > n_cap.
GeodesicMatrix all_pairs(const SimilarityGraph& graph, std::size_t n_cap = default_all_pairs_cap);

/// l x n matrix of distances from each landmark. The l x l landmark block is
/// symmetrized the same way as all_pairs.
GeodesicMatrix landmark_rows(const SimilarityGraph& graph, std::span<const NodeIndex> landmarks);

}  // namespace simmap
