#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simmap/dense.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/ingest.hpp"
#include "simmap/mds.hpp"

namespace simmap {

// ---------------------------------------------------------------------------
// Residual variance

struct ResidualOptions {
    /// Square references with more items than this are estimated from a
    /// uniform sample of unordered pairs instead of the full triangle.
    std::size_t exact_limit = 5000;
    std::size_t sample_pairs = 2'000'000;
    std::uint64_t seed = 0;
};

/// 1 - r^2 where r is the Pearson correlation between reference distances
/// and Euclidean distances over the first k embedding columns.
///
/// Reference row r belongs to embedding row ref.sources[r]. A square
/// reference uses each unordered pair once (strict upper triangle); a
/// landmark (l x n) reference uses every (landmark, other item) pair.
/// Throws NumericError when either distance vector has zero variance.
double residual_variance(const GeodesicMatrix& ref, const Embedding& emb, std::size_t k,
                         const ResidualOptions& options = {});

/// Element k - 1 equals residual_variance(ref, emb, k), bit for bit.
std::vector<double> residual_variance_curve(const GeodesicMatrix& ref, const Embedding& emb, std::size_t k_max,
                                            const ResidualOptions& options = {});

// ---------------------------------------------------------------------------
// Nearest neighbors

/// k nearest items to `item` by Euclidean distance over the first `dims`
/// columns, ascending, ties to the smaller index, the query excluded.
/// dims = 0 means all columns.
std::vector<std::size_t> knn(const Embedding& emb, std::size_t item, std::size_t k, std::size_t dims = 0);

/// As knn, restricted to rows where candidates[row] is true.
std::vector<std::size_t> knn_among(const Embedding& emb, std::size_t item, std::size_t k, std::size_t dims,
                                   std::span<const char> candidates);

// ---------------------------------------------------------------------------
// Label similarity

/// Symmetric label x label cosine table.
struct LabelSimilarityTable {
    DenseMatrix sim;
    std::vector<std::uint32_t> items_per_label;

    std::size_t label_count() const noexcept { return items_per_label.size(); }
};

/// sim(g, h) = |items with both g and h| / sqrt(items(g) * items(h)).
LabelSimilarityTable label_similarity_table(const LabelTable& labels);

/// The same cosine applied to user profiles: occurrence of a label is the
/// number of users with at least one item carrying it; co-occurrence the
/// number of users holding items with both. Used for artists, where a shared
/// artist gives similarity 1.
LabelSimilarityTable profile_label_similarity_table(const ProfileStore& store, const LabelTable& labels);

/// Mean of table entries over all (g in a, h in b). Both sets non-empty.
double label_based_similarity(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                              const LabelSimilarityTable& table);

/// Item-id form; nullopt when either item is unlabeled.
std::optional<double> label_based_similarity(std::string_view item_a, std::string_view item_b,
                                             const LabelTable& labels, const LabelSimilarityTable& table);

// ---------------------------------------------------------------------------
// Neighborhood reports

struct NeighborhoodStats {
    std::size_t size = 0;
    std::vector<double> samples;  // one value per sampled item
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double ci95 = 0.0;  // half-width, 1.96 * sd / sqrt(samples)
};

struct NeighborhoodReport {
    std::vector<NeighborhoodStats> rows;  // sizes strictly increasing
    std::vector<std::size_t> sampled_items;
};

/// Linear-interpolation quantile (numpy's default), q in [0, 1].
double quantile(std::vector<double> values, double q);

NeighborhoodStats summarize(std::size_t size, std::vector<double> samples);

inline constexpr std::size_t default_neighborhood_sample = 50;

/// For `sample` randomly chosen labeled items, the mean label-based
/// similarity to their m nearest labeled neighbors, for each m in sizes.
/// Unlabeled items are neither sampled nor counted as neighbors.
NeighborhoodReport neighborhood_label_report(const Embedding& emb, const LabelTable& labels,
                                             const LabelSimilarityTable& table, std::span<const std::size_t> sizes,
                                             std::size_t sample, std::uint64_t rng_seed, std::size_t dims = 0);

/// neighborhood_label_report over artist labels with an artist table built
/// from user profiles.
NeighborhoodReport artist_similarity_report(const Embedding& emb, const LabelTable& artist_labels,
                                            const LabelSimilarityTable& artist_sim,
                                            std::span<const std::size_t> sizes, std::size_t sample,
                                            std::uint64_t rng_seed, std::size_t dims = 0);

// ---------------------------------------------------------------------------
// Gradient along a line

struct GradientLine {
    std::size_t target = 0;            // embedding row the line points at
    std::vector<std::size_t> points;   // traversal order, far end first
    double smoothness = 0.0;
};

/// Line from the origin to a random labeled item; the p labeled items closest
/// to that segment, ordered by descending distance to the target, scored by
/// the mean label-based similarity of consecutive pairs.
GradientLine gradient_along_line(const Embedding& emb, const LabelTable& labels, const LabelSimilarityTable& table,
                                 std::size_t p, std::size_t dims, std::uint64_t rng_seed);

/// Distance from x to the segment [0, target] (endpoints included).
double distance_to_segment(std::span<const double> x, std::span<const double> target);

}  // namespace simmap
