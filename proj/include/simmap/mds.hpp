#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "simmap/dense.hpp"
#include "simmap/eigensolver.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/landmarks.hpp"
#include "simmap/similarity.hpp"

namespace simmap {

inline constexpr std::size_t max_embedding_dims = 100;

/// Item coordinates, one row per item, columns ordered by descending
/// eigenvalue. Euclidean distance between rows encodes dissimilarity.
struct Embedding {
    DenseMatrix coords;
    std::vector<double> eigenvalues;  // descending, clamped at 0
    std::vector<std::string> item_ids;
    nlohmann::json provenance = nlohmann::json::object();

    std::size_t size() const noexcept { return coords.rows(); }
    std::size_t dims() const noexcept { return coords.cols(); }
};

enum class EigenMethod { lanczos, dense };

struct MdsOptions {
    EigenMethod method = EigenMethod::lanczos;
    EigenOptions eigen;
};

/// Double-centered Gram matrix B = -1/2 J D^2 J of a square distance matrix.
DenseMatrix double_centered_gram(const DenseMatrix& distances);

/// Top-d classical scaling. Negative eigenvalues are clamped to 0 and give
/// zero columns (counted in provenance["clamped_dims"]); each eigenvector's
/// first non-negligible entry is made positive. Throws ContractError for a
/// non-square, asymmetric, non-finite or non-zero-diagonal input or d
/// outside [1, n - 1].
Embedding classical_mds(const DenseMatrix& distances, std::size_t d, const MdsOptions& options = {});

/// Landmark MDS state needed to place further points by triangulation.
struct LmdsModel {
    DenseMatrix landmark_coords;   // l x d
    DenseMatrix pseudo_inverse_t;  // d x l; row k = eigenvector_k / sqrt(lambda_k), zero if clamped
    std::vector<double> mean_sq_dist;  // l, row means of squared landmark distances
    std::vector<double> eigenvalues;   // d
    std::size_t clamped_dims = 0;

    std::size_t landmark_count() const noexcept { return landmark_coords.rows(); }
    std::size_t dims() const noexcept { return landmark_coords.cols(); }
};

LmdsModel landmark_mds(const DenseMatrix& landmark_distances, std::size_t d, const MdsOptions& options = {});

/// x = -1/2 * pseudo_inverse_t * (sq_dists - mean_sq_dist), where sq_dists
/// holds squared geodesic distances from the point to each landmark.
std::vector<double> triangulate(const LmdsModel& model, std::span<const double> sq_dists);

struct IsomapOptions {
    MdsOptions mds;
    std::size_t n_cap = default_all_pairs_cap;
};

/// all_pairs -> classical_mds. When `geodesics` is non-null it receives the
/// n x n matrix.
Embedding isomap(const SimilarityGraph& graph, std::size_t d, const IsomapOptions& options = {},
                 GeodesicMatrix* geodesics = nullptr);

/// landmark_rows -> landmark_mds -> triangulation of the non-landmarks.
/// Requires d <= l - 1. When `geodesics` is non-null it receives the l x n
/// landmark matrix.
Embedding l_isomap(const SimilarityGraph& graph, const LandmarkSet& landmarks, std::size_t d,
                   const MdsOptions& options = {}, GeodesicMatrix* geodesics = nullptr);

}  // namespace simmap
