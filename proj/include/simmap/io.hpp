#pragma once

// On-disk formats shared by the CLI stages. Text formats are tab-separated
// UTF-8 and start with a `#` metadata line; readers skip `#` lines. Doubles
// are written with 17 significant digits so every checkpoint round-trips
// exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "simmap/eval.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/ingest.hpp"
#include "simmap/landmarks.hpp"
#include "simmap/mds.hpp"
#include "simmap/similarity.hpp"

namespace simmap::io {

std::string format_double(double v);
double parse_double(std::string_view text, const std::string& source, std::size_t line);
std::uint64_t parse_uint(std::string_view text, const std::string& source, std::size_t line);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

/// Writes "# <compact json>\n".
void write_metadata(std::ostream& out, const nlohmann::json& meta);

// Co-occurrence checkpoint: `item_a<TAB>item_b<TAB>count` (item_a < item_b)
// plus an occurrence table `item_id<TAB>count`.
void write_cooc(std::ostream& out, const CoocMatrix& cooc, const ItemTable& items, const nlohmann::json& meta);
void write_occurrences(std::ostream& out, const ItemTable& items, const nlohmann::json& meta);
ItemTable read_occurrences(std::istream& in, const std::string& source);
CoocMatrix read_cooc(std::istream& in, const ItemTable& items, const std::string& source);

// Graph: edge list `i<TAB>j<TAB>weight` (i < j) plus node table `index<TAB>item_id`.
void write_graph_edges(std::ostream& out, const SimilarityGraph& graph, const nlohmann::json& meta);
void write_graph_nodes(std::ostream& out, const SimilarityGraph& graph);
SimilarityGraph read_graph(std::istream& edges, std::istream& nodes, const std::string& source);

// Geodesic checkpoint: u32 rows, u32 cols (little-endian), then rows*cols
// little-endian f64 in row-major order.
void write_geodesic_binary(std::ostream& out, const DenseMatrix& distances);
DenseMatrix read_geodesic_binary(std::istream& in, const std::string& source);

// Landmarks: `# strategy=<s> l=<l> s=<seeds> rng_seed=<seed>` then one index per line.
void write_landmarks(std::ostream& out, const LandmarkSet& set);
LandmarkSet read_landmarks(std::istream& in, const std::string& source);

// Embedding: `#items=<n> dims=<d> provenance=<json>`, `#eigenvalues=v1,...,vd`,
// then `item_id<TAB>c1<TAB>...<TAB>cd` per item.
void write_embedding(std::ostream& out, const Embedding& emb);
Embedding read_embedding(std::istream& in, const std::string& source);

// Reports.
void write_residual_curve(std::ostream& out, const std::vector<double>& curve, const nlohmann::json& meta);
void write_neighborhood_report(std::ostream& out, const NeighborhoodReport& report, const nlohmann::json& meta);

}  // namespace simmap::io
