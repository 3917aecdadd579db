#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simmap/ingest.hpp"

namespace simmap {

using NodeIndex = std::uint32_t;

/// Popularity-normalized co-occurrence: cooc / sqrt(occ_a * occ_b).
/// Requires occ_a, occ_b >= 1 and cooc <= min(occ_a, occ_b).
double cosine(std::uint64_t cooc, std::uint64_t occ_a, std::uint64_t occ_b);

struct Neighbor {
    NodeIndex node;
    double weight;
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct WeightedEdge {
    NodeIndex u;
    NodeIndex v;
    double weight;
    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected graph whose edge weights are dissimilarities in [0, 1).
/// Adjacency lists are sorted by neighbor index and mirror each other.
class SimilarityGraph {
public:
    SimilarityGraph() = default;

    /// Validates the edge list (no self-loops, no duplicates, weights in
    /// [0, 1)) and builds canonical adjacency. Throws ContractError.
    static SimilarityGraph from_edges(std::vector<std::string> node_ids, std::span<const WeightedEdge> edges);

    std::size_t node_count() const noexcept { return node_ids_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
    const std::string& node_id(NodeIndex i) const { return node_ids_.at(i); }
    std::span<const Neighbor> neighbors(NodeIndex i) const { return adjacency_.at(i); }

    /// Every edge once, with u < v, ordered by (u, v).
    std::vector<WeightedEdge> edges() const;

    friend bool operator==(const SimilarityGraph&, const SimilarityGraph&) = default;

private:
    std::vector<std::string> node_ids_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::size_t edge_count_ = 0;
};

/// Keeps pairs with cooc >= min_cooc; weight = 1 - cosine. Nodes are the
/// items touched by a retained edge, in item-index order. Throws
/// EmptyInputError when nothing survives.
SimilarityGraph build_graph(const CoocMatrix& cooc, const ItemTable& items, std::uint32_t min_cooc);

struct ComponentInfo {
    std::size_t size;
    std::string min_item_id;
};

/// Connected components ordered by size (descending), ties by smallest
/// member id. `labels`, when non-null, receives the component rank of every
/// node.
std::vector<ComponentInfo> connected_components(const SimilarityGraph& graph, std::vector<std::uint32_t>* labels = nullptr);

/// Induced subgraph on the largest component, re-densified in the original
/// node order.
SimilarityGraph largest_component(const SimilarityGraph& graph);

bool is_connected(const SimilarityGraph& graph);

}  // namespace simmap
