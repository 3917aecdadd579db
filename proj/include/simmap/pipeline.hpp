#pragma once

// Checkpointed pipeline stages behind the CLI subcommands. Every stage is a
// pure function of its input files and the config; timestamps only appear in
// `#` metadata lines and are omitted when config.timestamp is false.

#include <cstddef>
#include <string>
#include <vector>

#include "simmap/config.hpp"
#include "simmap/mds.hpp"
#include "simmap/similarity.hpp"

namespace simmap {

/// Default location of a sidecar file next to `base`.
std::filesystem::path sidecar(const std::filesystem::path& base, std::string_view suffix);

struct CoocSummary {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t pairs = 0;
};

/// profiles -> out (co-occurrence list) + occurrences (default out.occurrences.tsv).
CoocSummary cmd_cooc(const PipelineConfig& config);

struct GraphSummary {
    std::vector<ComponentInfo> components;  // of the thresholded graph
    std::size_t nodes = 0;                  // written (largest component)
    std::size_t edges = 0;
};

/// cooc + occurrences -> out (edge list of the largest component),
/// out.nodes.tsv and out.components.tsv.
GraphSummary cmd_graph(const PipelineConfig& config);

/// graph -> out (landmark list).
LandmarkSet cmd_landmarks(const PipelineConfig& config);

/// graph -> out (embedding). For l-isomap the landmark list is read from
/// landmarks_file or selected and written to out.landmarks.txt. The geodesic
/// matrix is dumped when the `geodesic` path is set.
Embedding cmd_embed(const PipelineConfig& config);

enum class Metric { residual_variance, neighborhood, gradient, knn };

Metric parse_metric(std::string_view text);

struct EvalOptions {
    Metric metric = Metric::residual_variance;
    std::size_t k_max = 0;                    // residual variance; 0 = embedding dims
    std::vector<std::size_t> sizes{1, 2, 5, 10, 20, 50};
    std::size_t sample = 50;
    std::size_t points = 20;                  // gradient
    std::size_t lines = 100;                  // gradient
    std::string item;                         // knn query id
    std::size_t k = 10;                       // knn
    std::size_t dims = 0;                     // 0 = all embedding columns
    std::string label_kind = "genre";
};

void cmd_eval(const PipelineConfig& config, const EvalOptions& options);

}  // namespace simmap
