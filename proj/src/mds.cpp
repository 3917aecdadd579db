#include "simmap/mds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simmap/error.hpp"
#include "simmap/kernels.hpp"
#include "simmap/parallel.hpp"

namespace simmap {
namespace {

constexpr double symmetry_tolerance = 1e-9;

void check_distance_matrix(const DenseMatrix& d) {
    const std::size_t n = d.rows();
    if (n == 0 || d.cols() != n) throw ContractError("distance matrix must be square and non-empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) throw ContractError("distance matrix has a non-zero diagonal at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = d(i, j);
            const double b = d(j, i);
            if (!std::isfinite(a) || !std::isfinite(b)) throw ContractError("distance matrix has non-finite entries");
            if (std::abs(a - b) > symmetry_tolerance * std::max(1.0, std::abs(a))) {
                throw ContractError("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
            }
        }
    }
}

EigenResult solve(const DenseMatrix& gram, std::size_t d, const MdsOptions& options) {
    if (options.method == EigenMethod::dense) return top_eigenpairs_dense(gram, d);
    return top_eigenpairs(gram, d, options.eigen);
}

void fix_sign(DenseMatrix& vectors, std::size_t col) {
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
        const double v = vectors(r, col);
        if (std::abs(v) > 1e-12) {
            if (v < 0.0) {
                for (std::size_t q = 0; q < vectors.rows(); ++q) vectors(q, col) = -vectors(q, col);
            }
            return;
        }
    }
}

struct Spectral {
    std::vector<double> values;  // clamped
    DenseMatrix vectors;         // n x d, sign-normalized
    std::size_t clamped = 0;
    std::size_t matvecs = 0;
};

Spectral spectral_embedding(const DenseMatrix& distances, std::size_t d, const MdsOptions& options) {
    check_distance_matrix(distances);
    const std::size_t n = distances.rows();
    if (d < 1 || d > n - 1) {
        throw ContractError("target dimension must satisfy 1 <= d <= n - 1 (d=" + std::to_string(d) +
                            ", n=" + std::to_string(n) + ")");
    }
    auto eig = solve(double_centered_gram(distances), d, options);
    Spectral s;
    s.vectors = std::move(eig.vectors);
    s.values = std::move(eig.values);
    s.matvecs = eig.matvecs;
    for (std::size_t k = 0; k < d; ++k) {
        if (!(s.values[k] > 0.0)) {
            s.values[k] = 0.0;
            ++s.clamped;
            for (std::size_t r = 0; r < n; ++r) s.vectors(r, k) = 0.0;
        } else {
            fix_sign(s.vectors, k);
        }
    }
    return s;
}

}  // namespace

DenseMatrix double_centered_gram(const DenseMatrix& distances) {
    const std::size_t n = distances.rows();
    DenseMatrix sq(n, n);
    std::vector<double> row_mean(n);
    parallel_for(n, [&](std::size_t i) {
        auto out = sq.row(i);
        const auto in = distances.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            // Average the two triangles so B is exactly symmetric.
            const double v = 0.5 * (in[j] + distances(j, i));
            out[j] = v * v;
        }
        row_mean[i] = kernels::sum(out) / static_cast<double>(n);
    });
    const double grand = kernels::sum(row_mean) / static_cast<double>(n);
    parallel_for(n, [&](std::size_t i) {
        auto r = sq.row(i);
        for (std::size_t j = 0; j < n; ++j) r[j] = -0.5 * (r[j] - row_mean[i] - row_mean[j] + grand);
    });
    return sq;
}

Embedding classical_mds(const DenseMatrix& distances, std::size_t d, const MdsOptions& options) {
    auto s = spectral_embedding(distances, d, options);
    const std::size_t n = distances.rows();
    Embedding emb;
    emb.coords = DenseMatrix(n, d);
    for (std::size_t k = 0; k < d; ++k) {
        const double root = std::sqrt(s.values[k]);
        for (std::size_t r = 0; r < n; ++r) emb.coords(r, k) = s.vectors(r, k) * root;
    }
    emb.eigenvalues = std::move(s.values);
    emb.provenance["dims"] = d;
    emb.provenance["clamped_dims"] = s.clamped;
    emb.provenance["eigensolver"] = options.method == EigenMethod::dense ? "dense" : "lanczos";
    return emb;
}

LmdsModel landmark_mds(const DenseMatrix& landmark_distances, std::size_t d, const MdsOptions& options) {
    const std::size_t l = landmark_distances.rows();
    if (d >= l) {
        throw ContractError("landmark MDS needs d <= l - 1 (d=" + std::to_string(d) + ", l=" + std::to_string(l) + ")");
    }
    auto s = spectral_embedding(landmark_distances, d, options);

    LmdsModel model;
    model.landmark_coords = DenseMatrix(l, d);
    model.pseudo_inverse_t = DenseMatrix(d, l);
    for (std::size_t k = 0; k < d; ++k) {
        if (s.values[k] <= 0.0) continue;
        const double root = std::sqrt(s.values[k]);
        for (std::size_t r = 0; r < l; ++r) {
            model.landmark_coords(r, k) = s.vectors(r, k) * root;
            model.pseudo_inverse_t(k, r) = s.vectors(r, k) / root;
        }
    }
    model.mean_sq_dist.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            const double v = 0.5 * (landmark_distances(i, j) + landmark_distances(j, i));
            acc += v * v;
        }
        model.mean_sq_dist[i] = acc / static_cast<double>(l);
    }
    model.eigenvalues = std::move(s.values);
    model.clamped_dims = s.clamped;
    return model;
}

std::vector<double> triangulate(const LmdsModel& model, std::span<const double> sq_dists) {
    const std::size_t l = model.landmark_count();
    if (sq_dists.size() != l) {
        throw ContractError("triangulate: expected " + std::to_string(l) + " squared distances, got " +
                            std::to_string(sq_dists.size()));
    }
    std::vector<double> centered(l);
    for (std::size_t i = 0; i < l; ++i) centered[i] = sq_dists[i] - model.mean_sq_dist[i];
    std::vector<double> x(model.dims());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = -0.5 * kernels::dot(model.pseudo_inverse_t.row(k), centered);
    return x;
}

Embedding isomap(const SimilarityGraph& graph, std::size_t d, const IsomapOptions& options, GeodesicMatrix* geodesics) {
    auto geo = all_pairs(graph, options.n_cap);
    Embedding emb = classical_mds(geo.distances, d, options.mds);
    emb.item_ids = graph.node_ids();
    emb.provenance["method"] = "isomap";
    emb.provenance["eigen_seed"] = options.mds.eigen.seed;
    if (geodesics) *geodesics = std::move(geo);
    return emb;
}

Embedding l_isomap(const SimilarityGraph& graph, const LandmarkSet& landmarks, std::size_t d,
                   const MdsOptions& options, GeodesicMatrix* geodesics) {
    const std::size_t l = landmarks.size();
    if (d < 1 || d + 1 > l) {
        throw ContractError("l-isomap needs 1 <= d <= l - 1 (d=" + std::to_string(d) + ", l=" + std::to_string(l) + ")");
    }
    auto geo = landmark_rows(graph, landmarks.indices);
    const std::size_t n = graph.node_count();

    DenseMatrix block(l, l);
    for (std::size_t a = 0; a < l; ++a) {
        for (std::size_t b = 0; b < l; ++b) block(a, b) = geo.distances(a, landmarks.indices[b]);
    }
    const LmdsModel model = landmark_mds(block, d, options);

    std::vector<std::int64_t> landmark_slot(n, -1);
    for (std::size_t a = 0; a < l; ++a) landmark_slot[landmarks.indices[a]] = static_cast<std::int64_t>(a);

    Embedding emb;
    emb.coords = DenseMatrix(n, d);
    parallel_for(n, [&](std::size_t v) {
        auto out = emb.coords.row(v);
        if (landmark_slot[v] >= 0) {
            const auto src = model.landmark_coords.row(static_cast<std::size_t>(landmark_slot[v]));
            std::copy(src.begin(), src.end(), out.begin());
            return;
        }
        std::vector<double> sq(l);
        for (std::size_t a = 0; a < l; ++a) {
            const double g = geo.distances(a, v);
            sq[a] = g * g;
        }
        const auto x = triangulate(model, sq);
        std::copy(x.begin(), x.end(), out.begin());
    });

    emb.eigenvalues = model.eigenvalues;
    emb.item_ids = graph.node_ids();
    emb.provenance["method"] = "l-isomap";
    emb.provenance["dims"] = d;
    emb.provenance["clamped_dims"] = model.clamped_dims;
    emb.provenance["eigensolver"] = options.method == EigenMethod::dense ? "dense" : "lanczos";
    emb.provenance["eigen_seed"] = options.eigen.seed;
    emb.provenance["landmarks"] = l;
    emb.provenance["landmark_strategy"] = std::string(strategy_name(landmarks.strategy));
    emb.provenance["landmark_seeds"] = landmarks.seed_count;
    emb.provenance["landmark_rng_seed"] = landmarks.rng_seed;
    if (geodesics) *geodesics = std::move(geo);
    return emb;
}

}  // namespace simmap
