#include "simmap/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "simmap/error.hpp"

namespace simmap {

double cosine(std::uint64_t cooc, std::uint64_t occ_a, std::uint64_t occ_b) {
    if (occ_a == 0 || occ_b == 0) throw ContractError("cosine: occurrence counts must be >= 1");
    if (cooc > std::min(occ_a, occ_b)) throw ContractError("cosine: co-occurrence exceeds an occurrence count");
    return static_cast<double>(cooc) / std::sqrt(static_cast<double>(occ_a) * static_cast<double>(occ_b));
}

SimilarityGraph SimilarityGraph::from_edges(std::vector<std::string> node_ids, std::span<const WeightedEdge> edges) {
    SimilarityGraph g;
    g.node_ids_ = std::move(node_ids);
    g.adjacency_.resize(g.node_ids_.size());
    for (const auto& e : edges) {
        if (e.u >= g.node_ids_.size() || e.v >= g.node_ids_.size()) {
            throw ContractError("edge refers to a node outside the graph");
        }
        if (e.u == e.v) throw ContractError("self-loops are not allowed");
        if (!(e.weight >= 0.0 && e.weight < 1.0)) {
            throw ContractError("edge weight must lie in [0, 1), got " + std::to_string(e.weight));
        }
        g.adjacency_[e.u].push_back({e.v, e.weight});
        g.adjacency_[e.v].push_back({e.u, e.weight});
    }
    for (auto& list : g.adjacency_) {
        std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].node == list[i - 1].node) throw ContractError("duplicate edge");
        }
    }
    g.edge_count_ = edges.size();
    return g;
}

std::vector<WeightedEdge> SimilarityGraph::edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count_);
    for (NodeIndex u = 0; u < adjacency_.size(); ++u) {
        for (const auto& nb : adjacency_[u]) {
            if (u < nb.node) out.push_back({u, nb.node, nb.weight});
        }
    }
    return out;
}

SimilarityGraph build_graph(const CoocMatrix& cooc, const ItemTable& items, std::uint32_t min_cooc) {
    if (min_cooc < 1) throw ContractError("min_cooc must be >= 1");
    if (cooc.item_count() != items.size()) throw ContractError("co-occurrence matrix and item table disagree on item count");

    std::vector<char> used(items.size(), 0);
    for (const auto& e : cooc.entries()) {
        if (e.count >= min_cooc) used[e.a] = used[e.b] = 1;
    }
    std::vector<NodeIndex> node_of(items.size(), 0);
    std::vector<std::string> node_ids;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (used[i]) {
            node_of[i] = static_cast<NodeIndex>(node_ids.size());
            node_ids.push_back(items.ids[i]);
        }
    }
    if (node_ids.empty()) {
        throw EmptyInputError("no item pair co-occurs at least " + std::to_string(min_cooc) + " times");
    }

    std::vector<WeightedEdge> edges;
    for (const auto& e : cooc.entries()) {
        if (e.count < min_cooc) continue;
        const double w = 1.0 - cosine(e.count, items.occurrences[e.a], items.occurrences[e.b]);
        edges.push_back({node_of[e.a], node_of[e.b], std::max(0.0, w)});
    }
    return SimilarityGraph::from_edges(std::move(node_ids), edges);
}

std::vector<ComponentInfo> connected_components(const SimilarityGraph& graph, std::vector<std::uint32_t>* labels) {
    const std::size_t n = graph.node_count();
    constexpr auto unseen = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> comp(n, unseen);
    std::vector<ComponentInfo> found;
    std::vector<NodeIndex> queue;
    for (NodeIndex start = 0; start < n; ++start) {
        if (comp[start] != unseen) continue;
        const auto id = static_cast<std::uint32_t>(found.size());
        ComponentInfo info{0, graph.node_id(start)};
        queue.assign(1, start);
        comp[start] = id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeIndex u = queue[head];
            ++info.size;
            if (graph.node_id(u) < info.min_item_id) info.min_item_id = graph.node_id(u);
            for (const auto& nb : graph.neighbors(u)) {
                if (comp[nb.node] == unseen) {
                    comp[nb.node] = id;
                    queue.push_back(nb.node);
                }
            }
        }
        found.push_back(std::move(info));
    }

    std::vector<std::uint32_t> order(found.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (found[a].size != found[b].size) return found[a].size > found[b].size;
        return found[a].min_item_id < found[b].min_item_id;
    });
    std::vector<std::uint32_t> rank(found.size());
    std::vector<ComponentInfo> sorted;
    sorted.reserve(found.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r;
        sorted.push_back(found[order[r]]);
    }
    if (labels) {
        labels->resize(n);
        for (std::size_t i = 0; i < n; ++i) (*labels)[i] = rank[comp[i]];
    }
    return sorted;
}

SimilarityGraph largest_component(const SimilarityGraph& graph) {
    if (graph.node_count() == 0) throw EmptyInputError("graph has no nodes");
    std::vector<std::uint32_t> labels;
    connected_components(graph, &labels);

    constexpr auto absent = static_cast<NodeIndex>(-1);
    std::vector<NodeIndex> remap(graph.node_count(), absent);
    std::vector<std::string> ids;
    for (NodeIndex i = 0; i < graph.node_count(); ++i) {
        if (labels[i] == 0) {
            remap[i] = static_cast<NodeIndex>(ids.size());
            ids.push_back(graph.node_id(i));
        }
    }
    std::vector<WeightedEdge> edges;
    for (const auto& e : graph.edges()) {
        if (remap[e.u] != absent) edges.push_back({remap[e.u], remap[e.v], e.weight});
    }
    return SimilarityGraph::from_edges(std::move(ids), edges);
}

bool is_connected(const SimilarityGraph& graph) { return connected_components(graph).size() <= 1; }

}  // namespace simmap
