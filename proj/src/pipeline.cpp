#include "simmap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>

#include "simmap/error.hpp"
#include "simmap/eval.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/io.hpp"
#include "simmap/kernels.hpp"
#include "simmap/parallel.hpp"
#include "simmap/rng.hpp"

namespace simmap {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path require(const PipelineConfig& c, std::string_view key) {
    auto p = c.path(key);
    if (p.empty()) throw ValidationError("missing required path '" + std::string(key) + "'");
    return p;
}

fs::path path_or(const PipelineConfig& c, std::string_view key, const fs::path& fallback) {
    auto p = c.path(key);
    return p.empty() ? fallback : p;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json base_meta(const PipelineConfig& c, std::string_view command) {
    json meta;
    meta["command"] = command;
    meta["rng_seed"] = c.rng_seed;
    if (c.timestamp) meta["created"] = utc_now();
    return meta;
}

std::string file_name(const fs::path& p) { return p.filename().string(); }

/// JSON from a leading `# {...}` line, or an empty object.
json leading_metadata(const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    if (in && std::getline(in, line) && line.rfind("# {", 0) == 0) {
        try {
            return json::parse(line.substr(2));
        } catch (const json::exception&) {
        }
    }
    return json::object();
}

SimilarityGraph load_graph(const PipelineConfig& c) {
    const auto edges_path = require(c, "graph");
    const auto nodes_path = path_or(c, "nodes", sidecar(edges_path, ".nodes.tsv"));
    auto edges = io::open_input(edges_path);
    auto nodes = io::open_input(nodes_path);
    return io::read_graph(edges, nodes, edges_path.string());
}

LandmarkSet choose_landmarks(const PipelineConfig& c, const SimilarityGraph& graph) {
    const auto seed = derive_seed("landmarks", c.rng_seed);
    if (c.landmark_strategy == LandmarkStrategy::maxmin) return select_maxmin(graph, c.seeds, c.landmarks, seed);
    return select_random(graph.node_count(), c.landmarks, seed);
}

LandmarkSet load_landmarks(const fs::path& file, std::size_t n) {
    auto in = io::open_input(file);
    auto set = io::read_landmarks(in, file.string());
    for (auto i : set.indices) {
        if (i >= n) throw ValidationError(file.string() + ": landmark index " + std::to_string(i) + " outside the graph");
    }
    return set;
}

Embedding load_embedding(const PipelineConfig& c) {
    const auto path = require(c, "embedding");
    auto in = io::open_input(path);
    return io::read_embedding(in, path.string());
}

void check_aligned(const Embedding& emb, const SimilarityGraph& graph) {
    if (emb.item_ids != graph.node_ids()) {
        throw ValidationError("embedding rows do not match the graph's node table");
    }
}

}  // namespace

fs::path sidecar(const fs::path& base, std::string_view suffix) { return fs::path(base.string() + std::string(suffix)); }

CoocSummary cmd_cooc(const PipelineConfig& c) {
    validate(c, Stage::cooc);
    const auto profiles_path = require(c, "profiles");
    const auto out_path = require(c, "out");
    const auto occ_path = path_or(c, "occurrences", sidecar(out_path, ".occurrences.tsv"));

    auto in = io::open_input(profiles_path);
    const auto store = parse_profiles(in, profiles_path.string());
    const auto cooc = count_cooccurrences(store);

    json meta = base_meta(c, "cooc");
    meta["profiles"] = file_name(profiles_path);
    meta["users"] = store.user_count();
    meta["items"] = store.item_count();
    meta["pairs"] = cooc.entries().size();
    {
        auto out = io::open_output(out_path);
        io::write_cooc(out, cooc, store.items(), meta);
    }
    {
        auto out = io::open_output(occ_path);
        io::write_occurrences(out, store.items(), meta);
    }
    return {store.user_count(), store.item_count(), cooc.entries().size()};
}

GraphSummary cmd_graph(const PipelineConfig& c) {
    validate(c, Stage::graph);
    const auto cooc_path = require(c, "cooc");
    const auto occ_path = path_or(c, "occurrences", sidecar(cooc_path, ".occurrences.tsv"));
    const auto out_path = require(c, "out");

    auto occ_in = io::open_input(occ_path);
    const auto items = io::read_occurrences(occ_in, occ_path.string());
    auto cooc_in = io::open_input(cooc_path);
    const auto cooc = io::read_cooc(cooc_in, items, cooc_path.string());

    const auto full = build_graph(cooc, items, c.min_cooc);
    GraphSummary summary;
    summary.components = connected_components(full);
    const auto graph = largest_component(full);
    summary.nodes = graph.node_count();
    summary.edges = graph.edge_count();

    json meta = base_meta(c, "graph");
    meta["cooc"] = file_name(cooc_path);
    meta["min_cooc"] = c.min_cooc;
    meta["items"] = items.size();
    meta["thresholded_nodes"] = full.node_count();
    meta["thresholded_edges"] = full.edge_count();
    meta["components"] = summary.components.size();
    meta["nodes"] = graph.node_count();
    meta["edges"] = graph.edge_count();
    meta["largest_fraction"] = static_cast<double>(graph.node_count()) / static_cast<double>(items.size());
    {
        auto out = io::open_output(out_path);
        io::write_graph_edges(out, graph, meta);
    }
    {
        auto out = io::open_output(path_or(c, "nodes", sidecar(out_path, ".nodes.tsv")));
        io::write_graph_nodes(out, graph);
    }
    {
        auto out = io::open_output(sidecar(out_path, ".components.tsv"));
        io::write_metadata(out, meta);
        for (std::size_t r = 0; r < summary.components.size(); ++r) {
            out << r << '\t' << summary.components[r].size << '\t' << summary.components[r].min_item_id << '\n';
        }
    }
    return summary;
}

LandmarkSet cmd_landmarks(const PipelineConfig& c) {
    validate(c, Stage::landmarks);
    const auto out_path = require(c, "out");
    const auto graph = load_graph(c);
    if (!is_connected(graph)) throw ConnectivityError("landmark selection needs a connected graph");
    const auto set = choose_landmarks(c, graph);
    auto out = io::open_output(out_path);
    io::write_landmarks(out, set);
    return set;
}

Embedding cmd_embed(const PipelineConfig& c) {
    validate(c, Stage::embed);
    const auto out_path = require(c, "out");
    const auto graph = load_graph(c);
    const auto graph_meta = leading_metadata(require(c, "graph"));

    MdsOptions mds;
    mds.eigen.seed = derive_seed("eigensolver", c.rng_seed);

    Embedding emb;
    GeodesicMatrix geo;
    if (c.method == EmbedMethod::isomap) {
        emb = isomap(graph, c.dims, IsomapOptions{mds, c.n_cap}, &geo);
    } else {
        const auto landmarks_file = c.path("landmarks_file");
        const auto set = landmarks_file.empty() ? choose_landmarks(c, graph) : load_landmarks(landmarks_file, graph.node_count());
        if (c.dims + 1 > set.size()) throw ValidationError("l-isomap requires dims <= landmarks - 1");
        emb = l_isomap(graph, set, c.dims, mds, &geo);
        if (landmarks_file.empty()) {
            auto out = io::open_output(sidecar(out_path, ".landmarks.txt"));
            io::write_landmarks(out, set);
        }
    }
    emb.provenance["rng_seed"] = c.rng_seed;
    emb.provenance["graph"] = file_name(require(c, "graph"));
    if (graph_meta.contains("min_cooc")) emb.provenance["min_cooc"] = graph_meta["min_cooc"];
    if (c.timestamp) emb.provenance["created"] = utc_now();

    {
        auto out = io::open_output(out_path);
        io::write_embedding(out, emb);
    }
    if (const auto geo_path = c.path("geodesic"); !geo_path.empty()) {
        auto out = io::open_output(geo_path);
        io::write_geodesic_binary(out, geo.distances);
    }
    return emb;
}

Metric parse_metric(std::string_view text) {
    if (text == "residual-variance") return Metric::residual_variance;
    if (text == "neighborhood") return Metric::neighborhood;
    if (text == "gradient") return Metric::gradient;
    if (text == "knn") return Metric::knn;
    throw ValidationError("unknown metric '" + std::string(text) + "'");
}

namespace {

GeodesicMatrix reference_for(const PipelineConfig& c, const Embedding& emb, json& meta) {
    const auto landmarks_file = c.path("landmarks_file");
    if (const auto geo_path = c.path("geodesic"); !geo_path.empty()) {
        auto in = io::open_input(geo_path);
        GeodesicMatrix ref{io::read_geodesic_binary(in, geo_path.string()), {}};
        meta["reference"] = file_name(geo_path);
        if (ref.cols() != emb.size()) throw ValidationError("geodesic matrix columns do not match the embedding");
        if (!landmarks_file.empty()) {
            const auto set = load_landmarks(landmarks_file, emb.size());
            if (set.size() != ref.rows()) throw ValidationError("landmark file does not match the geodesic rows");
            ref.sources = set.indices;
        } else if (ref.is_square()) {
            ref.sources.resize(ref.rows());
            std::iota(ref.sources.begin(), ref.sources.end(), NodeIndex{0});
        } else {
            throw ValidationError("a landmark geodesic matrix needs --landmarks-file");
        }
        return ref;
    }
    const auto graph = load_graph(c);
    check_aligned(emb, graph);
    meta["reference"] = file_name(require(c, "graph"));
    if (!landmarks_file.empty()) return landmark_rows(graph, load_landmarks(landmarks_file, graph.node_count()).indices);
    return all_pairs(graph, c.n_cap);
}

LabelTable load_labels(const PipelineConfig& c, const EvalOptions& o) {
    const auto path = require(c, "labels");
    auto in = io::open_input(path);
    return parse_labels(in, parse_label_kind(o.label_kind), path.string());
}

LabelSimilarityTable table_for(const PipelineConfig& c, const LabelTable& labels) {
    if (labels.kind == LabelKind::artist) {
        const auto path = require(c, "profiles");
        auto in = io::open_input(path);
        return profile_label_similarity_table(parse_profiles(in, path.string()), labels);
    }
    return label_similarity_table(labels);
}

}  // namespace

void cmd_eval(const PipelineConfig& c, const EvalOptions& o) {
    validate(c, Stage::eval);
    const auto emb = load_embedding(c);
    const auto out_path = require(c, "out");
    json meta = base_meta(c, "eval");
    meta["embedding"] = file_name(require(c, "embedding"));

    switch (o.metric) {
        case Metric::residual_variance: {
            meta["metric"] = "residual-variance";
            const auto ref = reference_for(c, emb, meta);
            const std::size_t k_max = o.k_max ? o.k_max : emb.dims();
            ResidualOptions ro;
            ro.seed = derive_seed("residual", c.rng_seed);
            meta["reference_shape"] = {ref.rows(), ref.cols()};
            meta["pairs"] = ref.is_square() ? (ref.rows() > ro.exact_limit ? "sampled" : "upper-triangle")
                                            : "landmark-by-item";
            const auto curve = residual_variance_curve(ref, emb, k_max, ro);
            auto out = io::open_output(out_path);
            io::write_residual_curve(out, curve, meta);
            break;
        }
        case Metric::neighborhood: {
            meta["metric"] = "neighborhood";
            const auto labels = load_labels(c, o);
            const auto table = table_for(c, labels);
            meta["labels"] = file_name(require(c, "labels"));
            meta["kind"] = label_kind_name(labels.kind);
            meta["sample"] = o.sample;
            meta["ci"] = "normal 95% (1.96 sd / sqrt(sample))";
            const auto seed = derive_seed("neighborhood", c.rng_seed);
            const auto report = labels.kind == LabelKind::artist
                                    ? artist_similarity_report(emb, labels, table, o.sizes, o.sample, seed, o.dims)
                                    : neighborhood_label_report(emb, labels, table, o.sizes, o.sample, seed, o.dims);
            auto out = io::open_output(out_path);
            io::write_neighborhood_report(out, report, meta);
            break;
        }
        case Metric::gradient: {
            meta["metric"] = "gradient";
            const auto labels = load_labels(c, o);
            const auto table = table_for(c, labels);
            meta["labels"] = file_name(require(c, "labels"));
            meta["points"] = o.points;
            meta["lines"] = o.lines;
            std::vector<GradientLine> lines;
            for (std::size_t i = 0; i < o.lines; ++i) {
                lines.push_back(gradient_along_line(emb, labels, table, o.points, o.dims,
                                                    derive_seed("gradient/" + std::to_string(i), c.rng_seed)));
            }
            double mean = 0.0;
            for (const auto& l : lines) mean += l.smoothness;
            if (!lines.empty()) meta["mean_smoothness"] = mean / static_cast<double>(lines.size());
            auto out = io::open_output(out_path);
            io::write_metadata(out, meta);
            for (std::size_t i = 0; i < lines.size(); ++i) {
                out << i << '\t' << emb.item_ids[lines[i].target] << '\t' << io::format_double(lines[i].smoothness) << '\n';
            }
            break;
        }
        case Metric::knn: {
            meta["metric"] = "knn";
            meta["item"] = o.item;
            const auto it = std::find(emb.item_ids.begin(), emb.item_ids.end(), o.item);
            if (it == emb.item_ids.end()) throw ValidationError("item '" + o.item + "' is not in the embedding");
            const auto query = static_cast<std::size_t>(it - emb.item_ids.begin());
            const std::size_t dims = o.dims ? o.dims : emb.dims();
            const auto near = knn(emb, query, o.k, dims);
            auto out = io::open_output(out_path);
            io::write_metadata(out, meta);
            const auto q = emb.coords.row(query).first(dims);
            for (std::size_t r = 0; r < near.size(); ++r) {
                const double d = std::sqrt(kernels::squared_distance(q, emb.coords.row(near[r]).first(dims)));
                out << r + 1 << '\t' << emb.item_ids[near[r]] << '\t' << io::format_double(d) << '\n';
            }
            break;
        }
    }
}

}  // namespace simmap
