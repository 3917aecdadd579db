#include "simmap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simmap/error.hpp"
#include "simmap/kernels.hpp"
#include "simmap/parallel.hpp"
#include "simmap/rng.hpp"

namespace simmap {
namespace {

constexpr std::size_t sample_chunk = 1 << 16;

struct PairPlan {
    const GeodesicMatrix& ref;
    bool square = false;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sampled;  // (ref row, column)

    std::size_t units() const {
        return sampled.empty() ? ref.rows() : (sampled.size() + sample_chunk - 1) / sample_chunk;
    }

    /// Calls f(embedding row a, embedding row b, reference distance) for
    /// every pair belonging to `unit`.
    template <class F>
    void for_each(std::size_t unit, F&& f) const {
        if (!sampled.empty()) {
            const std::size_t end = std::min(sampled.size(), (unit + 1) * sample_chunk);
            for (std::size_t s = unit * sample_chunk; s < end; ++s) {
                const auto [r, c] = sampled[s];
                f(ref.sources[r], c, ref(r, c));
            }
            return;
        }
        const std::size_t src = ref.sources[unit];
        for (std::size_t c = square ? src + 1 : 0; c < ref.cols(); ++c) {
            if (c == src) continue;
            f(src, c, ref(unit, c));
        }
    }
};

PairPlan plan_pairs(const GeodesicMatrix& ref, const Embedding& emb, const ResidualOptions& options) {
    if (ref.cols() != emb.size()) {
        throw ContractError("reference distances have " + std::to_string(ref.cols()) + " columns but the embedding has " +
                            std::to_string(emb.size()) + " items");
    }
    if (ref.sources.size() != ref.rows()) throw ContractError("reference matrix is missing its source mapping");
    for (auto s : ref.sources) {
        if (s >= emb.size()) throw ContractError("reference source row outside the embedding");
    }
    PairPlan plan{ref, ref.is_square(), {}};
    if (plan.square && ref.rows() > options.exact_limit) {
        Rng rng(options.seed);
        plan.sampled.reserve(options.sample_pairs);
        while (plan.sampled.size() < options.sample_pairs) {
            const auto r = static_cast<std::uint32_t>(uniform_index(rng, ref.rows()));
            const auto c = static_cast<std::uint32_t>(uniform_index(rng, ref.cols()));
            if (ref.sources[r] != c) plan.sampled.emplace_back(r, c);
        }
    }
    return plan;
}

// Euclidean distances over the first 1..k_max columns, summed left to right.
void prefix_distances(const Embedding& emb, std::size_t a, std::size_t b, std::span<double> out) {
    const auto xa = emb.coords.row(a);
    const auto xb = emb.coords.row(b);
    double sq = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double diff = xa[c] - xb[c];
        sq += diff * diff;
        out[c] = std::sqrt(sq);
    }
}

}  // namespace

std::vector<double> residual_variance_curve(const GeodesicMatrix& ref, const Embedding& emb, std::size_t k_max,
                                            const ResidualOptions& options) {
    if (k_max < 1 || k_max > emb.dims()) {
        throw ContractError("k must satisfy 1 <= k <= " + std::to_string(emb.dims()) + ", got " + std::to_string(k_max));
    }
    const PairPlan plan = plan_pairs(ref, emb, options);
    const std::size_t units = plan.units();

    // Pass 1: means. Per-unit partials are combined in unit order.
    std::vector<double> part_x(units * k_max, 0.0);
    std::vector<double> part_y(units, 0.0);
    std::vector<std::size_t> part_n(units, 0);
    parallel_for(units, [&](std::size_t u) {
        std::vector<double> dist(k_max);
        double* sx = &part_x[u * k_max];
        plan.for_each(u, [&](std::size_t a, std::size_t b, double y) {
            prefix_distances(emb, a, b, dist);
            for (std::size_t k = 0; k < k_max; ++k) sx[k] += dist[k];
            part_y[u] += y;
            ++part_n[u];
        });
    });
    std::size_t count = 0;
    double mean_y = 0.0;
    std::vector<double> mean_x(k_max, 0.0);
    for (std::size_t u = 0; u < units; ++u) {
        count += part_n[u];
        mean_y += part_y[u];
        for (std::size_t k = 0; k < k_max; ++k) mean_x[k] += part_x[u * k_max + k];
    }
    if (count < 2) throw NumericError("residual variance needs at least two distance pairs");
    mean_y /= static_cast<double>(count);
    for (auto& m : mean_x) m /= static_cast<double>(count);

    // Pass 2: centered second moments.
    std::vector<double> part_xx(units * k_max, 0.0);
    std::vector<double> part_xy(units * k_max, 0.0);
    std::vector<double> part_yy(units, 0.0);
    parallel_for(units, [&](std::size_t u) {
        std::vector<double> dist(k_max);
        double* sxx = &part_xx[u * k_max];
        double* sxy = &part_xy[u * k_max];
        plan.for_each(u, [&](std::size_t a, std::size_t b, double y) {
            prefix_distances(emb, a, b, dist);
            const double dy = y - mean_y;
            part_yy[u] += dy * dy;
            for (std::size_t k = 0; k < k_max; ++k) {
                const double dx = dist[k] - mean_x[k];
                sxx[k] += dx * dx;
                sxy[k] += dx * dy;
            }
        });
    });
    double syy = 0.0;
    std::vector<double> sxx(k_max, 0.0);
    std::vector<double> sxy(k_max, 0.0);
    for (std::size_t u = 0; u < units; ++u) {
        syy += part_yy[u];
        for (std::size_t k = 0; k < k_max; ++k) {
            sxx[k] += part_xx[u * k_max + k];
            sxy[k] += part_xy[u * k_max + k];
        }
    }
    if (!(syy > 0.0)) throw NumericError("reference distances have zero variance");

    std::vector<double> curve(k_max);
    for (std::size_t k = 0; k < k_max; ++k) {
        if (!(sxx[k] > 0.0)) {
            throw NumericError("embedded distances have zero variance at k=" + std::to_string(k + 1));
        }
        const double r2 = (sxy[k] * sxy[k]) / (sxx[k] * syy);
        curve[k] = std::clamp(1.0 - r2, 0.0, 1.0);
    }
    return curve;
}

double residual_variance(const GeodesicMatrix& ref, const Embedding& emb, std::size_t k, const ResidualOptions& options) {
    return residual_variance_curve(ref, emb, k, options).back();
}

std::vector<std::size_t> knn_among(const Embedding& emb, std::size_t item, std::size_t k, std::size_t dims,
                                   std::span<const char> candidates) {
    const std::size_t n = emb.size();
    if (dims == 0) dims = emb.dims();
    if (dims > emb.dims()) throw ContractError("knn: dims exceeds embedding dimension");
    if (item >= n) throw ContractError("knn: query item out of range");
    if (!candidates.empty() && candidates.size() != n) throw ContractError("knn: candidate mask has the wrong length");

    const auto q = emb.coords.row(item).first(dims);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == item || (!candidates.empty() && !candidates[j])) continue;
        scored.emplace_back(kernels::squared_distance(q, emb.coords.row(j).first(dims)), j);
    }
    if (k > scored.size()) {
        throw ContractError("knn: asked for " + std::to_string(k) + " neighbors but only " +
                            std::to_string(scored.size()) + " candidates exist");
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
    return out;
}

std::vector<std::size_t> knn(const Embedding& emb, std::size_t item, std::size_t k, std::size_t dims) {
    return knn_among(emb, item, k, dims, {});
}

namespace {

LabelSimilarityTable cosine_table(std::size_t labels, const std::vector<std::vector<std::uint32_t>>& groups) {
    LabelSimilarityTable t;
    t.items_per_label.assign(labels, 0);
    DenseMatrix both(labels, labels);
    for (const auto& g : groups) {
        for (auto a : g) {
            ++t.items_per_label[a];
            for (auto b : g) {
                if (a != b) both(a, b) += 1.0;
            }
        }
    }
    t.sim = DenseMatrix(labels, labels);
    for (std::size_t a = 0; a < labels; ++a) {
        if (t.items_per_label[a] == 0) continue;
        t.sim(a, a) = 1.0;
        for (std::size_t b = 0; b < labels; ++b) {
            if (a == b || t.items_per_label[b] == 0) continue;
            t.sim(a, b) = both(a, b) / std::sqrt(double(t.items_per_label[a]) * double(t.items_per_label[b]));
        }
    }
    return t;
}

}  // namespace

LabelSimilarityTable label_similarity_table(const LabelTable& labels) {
    if (labels.labels.empty()) throw EmptyInputError("label table is empty");
    std::vector<std::vector<std::uint32_t>> groups;
    groups.reserve(labels.labels.size());
    for (const auto& [item, list] : labels.labels) groups.push_back(list);
    return cosine_table(labels.label_count(), groups);
}

LabelSimilarityTable profile_label_similarity_table(const ProfileStore& store, const LabelTable& labels) {
    if (labels.labels.empty()) throw EmptyInputError("label table is empty");
    std::vector<const std::vector<std::uint32_t>*> item_labels(store.item_count(), nullptr);
    for (std::size_t i = 0; i < store.item_count(); ++i) item_labels[i] = labels.find(store.items().ids[i]);

    std::vector<std::vector<std::uint32_t>> groups;
    groups.reserve(store.user_count());
    for (const auto& user : store.users()) {
        std::vector<std::uint32_t> g;
        for (auto item : user.items) {
            if (item_labels[item]) g.insert(g.end(), item_labels[item]->begin(), item_labels[item]->end());
        }
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        groups.push_back(std::move(g));
    }
    return cosine_table(labels.label_count(), groups);
}

double label_based_similarity(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                              const LabelSimilarityTable& table) {
    if (a.empty() || b.empty()) throw ContractError("label-based similarity needs labeled items");
    double total = 0.0;
    for (auto g : a) {
        for (auto h : b) total += table.sim(g, h);
    }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::optional<double> label_based_similarity(std::string_view item_a, std::string_view item_b,
                                             const LabelTable& labels, const LabelSimilarityTable& table) {
    const auto* a = labels.find(item_a);
    const auto* b = labels.find(item_b);
    if (!a || !b) return std::nullopt;
    return label_based_similarity(*a, *b, table);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

NeighborhoodStats summarize(std::size_t size, std::vector<double> samples) {
    NeighborhoodStats s;
    s.size = size;
    const auto count = static_cast<double>(samples.size());
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / count;
    s.median = quantile(samples, 0.5);
    s.q1 = quantile(samples, 0.25);
    s.q3 = quantile(samples, 0.75);
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - s.mean) * (v - s.mean);
        s.ci95 = 1.96 * std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    s.samples = std::move(samples);
    return s;
}

namespace {

std::vector<const std::vector<std::uint32_t>*> labels_by_row(const Embedding& emb, const LabelTable& labels) {
    std::vector<const std::vector<std::uint32_t>*> out(emb.size(), nullptr);
    for (std::size_t i = 0; i < emb.size(); ++i) out[i] = labels.find(emb.item_ids.at(i));
    return out;
}

}  // namespace

NeighborhoodReport neighborhood_label_report(const Embedding& emb, const LabelTable& labels,
                                             const LabelSimilarityTable& table, std::span<const std::size_t> sizes,
                                             std::size_t sample, std::uint64_t rng_seed, std::size_t dims) {
    if (sizes.empty()) throw ContractError("neighborhood sizes are empty");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
            throw ContractError("neighborhood sizes must be positive and strictly increasing");
        }
    }
    if (emb.item_ids.size() != emb.size()) throw ContractError("embedding is missing item ids");
    const auto row_labels = labels_by_row(emb, labels);
    std::vector<char> labeled(emb.size(), 0);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        if (row_labels[i]) {
            labeled[i] = 1;
            pool.push_back(i);
        }
    }
    if (sample < 1 || sample > pool.size()) {
        throw ContractError("sample size " + std::to_string(sample) + " must be in [1, " + std::to_string(pool.size()) +
                            "] (labeled items)");
    }
    const std::size_t widest = sizes.back();
    if (widest + 1 > pool.size()) throw ContractError("neighborhood size exceeds the number of other labeled items");

    Rng rng(rng_seed);
    for (std::size_t i = 0; i < sample; ++i) {
        std::swap(pool[i], pool[i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i))]);
    }
    NeighborhoodReport report;
    report.sampled_items.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sample));

    std::vector<std::vector<double>> values(sizes.size(), std::vector<double>(sample));
    parallel_for(sample, [&](std::size_t s) {
        const std::size_t item = report.sampled_items[s];
        const auto near = knn_among(emb, item, widest, dims, labeled);
        double running = 0.0;
        std::size_t next = 0;
        for (std::size_t m = 0; m < widest; ++m) {
            running += label_based_similarity(*row_labels[item], *row_labels[near[m]], table);
            if (m + 1 == sizes[next]) {
                values[next][s] = running / static_cast<double>(m + 1);
                ++next;
            }
        }
    });
    for (std::size_t i = 0; i < sizes.size(); ++i) report.rows.push_back(summarize(sizes[i], std::move(values[i])));
    return report;
}

NeighborhoodReport artist_similarity_report(const Embedding& emb, const LabelTable& artist_labels,
                                            const LabelSimilarityTable& artist_sim,
                                            std::span<const std::size_t> sizes, std::size_t sample,
                                            std::uint64_t rng_seed, std::size_t dims) {
    if (artist_labels.kind != LabelKind::artist) throw ContractError("artist report needs an artist label table");
    return neighborhood_label_report(emb, artist_labels, artist_sim, sizes, sample, rng_seed, dims);
}

double distance_to_segment(std::span<const double> x, std::span<const double> target) {
    const double tt = kernels::dot(target, target);
    double u = tt > 0.0 ? kernels::dot(x, target) / tt : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    double sq = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double d = x[c] - u * target[c];
        sq += d * d;
    }
    return std::sqrt(sq);
}

GradientLine gradient_along_line(const Embedding& emb, const LabelTable& labels, const LabelSimilarityTable& table,
                                 std::size_t p, std::size_t dims, std::uint64_t rng_seed) {
    if (p < 2) throw ContractError("gradient line needs p >= 2");
    if (dims == 0) dims = emb.dims();
    if (dims > emb.dims()) throw ContractError("gradient line: dims exceeds embedding dimension");
    const auto row_labels = labels_by_row(emb, labels);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        if (row_labels[i]) pool.push_back(i);
    }
    if (pool.size() < p) {
        throw ContractError("gradient line needs at least p=" + std::to_string(p) + " labeled items, found " +
                            std::to_string(pool.size()));
    }

    Rng rng(rng_seed);
    GradientLine line;
    line.target = pool[uniform_index(rng, pool.size())];
    const auto target = emb.coords.row(line.target).first(dims);

    std::vector<std::pair<double, std::size_t>> by_line;
    by_line.reserve(pool.size());
    for (auto i : pool) by_line.emplace_back(distance_to_segment(emb.coords.row(i).first(dims), target), i);
    std::partial_sort(by_line.begin(), by_line.begin() + static_cast<std::ptrdiff_t>(p), by_line.end());

    std::vector<std::pair<double, std::size_t>> ordered;
    for (std::size_t i = 0; i < p; ++i) {
        const auto idx = by_line[i].second;
        ordered.emplace_back(-std::sqrt(kernels::squared_distance(emb.coords.row(idx).first(dims), target)), idx);
    }
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [neg_dist, idx] : ordered) line.points.push_back(idx);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < p; ++i) {
        total += label_based_similarity(*row_labels[line.points[i]], *row_labels[line.points[i + 1]], table);
    }
    line.smoothness = total / static_cast<double>(p - 1);
    return line;
}

}  // namespace simmap
