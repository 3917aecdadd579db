// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "simmap/error.hpp"
#include "simmap/eval.hpp"
#include "simmap/geodesic.hpp"
#include "simmap/ingest.hpp"
#include "simmap/landmarks.hpp"
#include "simmap/mds.hpp"
#include "simmap/similarity.hpp"
#include "simmap/synthetic.hpp"
#include "support/oracles.hpp"

#ifndef SIMMAP_CLI_PATH
#error "SIMMAP_CLI_PATH must name the simmap executable"
#endif

using namespace simmap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_seconds > 0 && seconds >= limit_seconds) {
        out.pass = false;
        out.detail += " (over the " + std::to_string(static_cast<int>(limit_seconds)) + " s budget)";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", seconds);
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << " [" << timing << "]" << std::endl;
    failures += !out.pass;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// The 2,000-item latent-square fixture shared by the landmark and curve
/// criteria.
struct ManifoldFixture {
    SimilarityGraph graph;
    GeodesicMatrix geodesics;
    Embedding isomap30;
};

const ManifoldFixture& manifold() {
    static const ManifoldFixture f = [] {
        ManifoldFixture f;
        const auto data = latent_manifold_profiles({});
        const auto store = ProfileStore::from_records(data.records);
        const auto cooc = count_cooccurrences(store);
        f.graph = largest_component(build_graph(cooc, store.items(), 3));
        f.isomap30 = isomap(f.graph, 30, {}, &f.geodesics);
        return f;
    }();
    return f;
}

Outcome mds_exactness() {
    std::mt19937_64 rng(101);
    double worst_dist = 0.0, worst_rv = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 20 + rng() % 181;
        const std::size_t dims = 2 + rng() % 4;
        const auto p = oracle::random_points(rng, n, dims);
        const auto d = oracle::euclidean_distances(p);
        const auto emb = classical_mds(d, dims, {.eigen = {.seed = rng()}});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                worst_dist = std::max(worst_dist, std::abs(d(i, j) - oracle::row_distance(emb.coords, i, j, dims)));
        GeodesicMatrix ref{d, {}};
        ref.sources.resize(n);
        std::iota(ref.sources.begin(), ref.sources.end(), NodeIndex{0});
        worst_rv = std::max(worst_rv, residual_variance(ref, emb, dims));
    }
    return {worst_dist <= 1e-6 && worst_rv <= 1e-9,
            "100 point sets, max |distance error| " + fmt(worst_dist) + " (<= 1e-6), max residual variance " +
                fmt(worst_rv) + " (<= 1e-9)"};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(202);
    std::size_t graph_mismatch = 0, cooc_mismatch = 0;
    // Dyadic weights keep every path sum exact, so any difference is a real
    // shortest-path error rather than summation order.
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng() % 199;
        const auto g = oracle::random_connected_graph(rng, n, rng() % (2 * n), true);
        const auto fw = oracle::floyd_warshall(g);
        for (NodeIndex s = 0; s < n; ++s) {
            const auto row = sssp(g, s);
            for (std::size_t v = 0; v < n; ++v) graph_mismatch += row[v] != fw(s, v);
        }
    }
    double general_rel = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng() % 199;
        const auto g = oracle::random_connected_graph(rng, n, rng() % (2 * n), false);
        const auto fw = oracle::floyd_warshall(g);
        for (NodeIndex s = 0; s < n; ++s) {
            const auto row = sssp(g, s);
            for (std::size_t v = 0; v < n; ++v)
                if (v != s) general_rel = std::max(general_rel, std::abs(row[v] - fw(s, v)) / fw(s, v));
        }
    }
    for (int trial = 0; trial < 50; ++trial) {
        const auto records = oracle::random_profiles(rng, 5 + rng() % 80, 1 + rng() % 12, 3 + rng() % 60);
        const auto expected = oracle::brute_cooc(records);
        const auto store = ProfileStore::from_records(records);
        const auto cooc = count_cooccurrences(store);
        const auto& ids = store.items().ids;
        std::size_t seen = 0;
        for (const auto& e : cooc.entries()) {
            const auto it = expected.find({ids[e.a], ids[e.b]});
            cooc_mismatch += it == expected.end() || it->second != e.count;
            ++seen;
        }
        cooc_mismatch += seen != expected.size();
    }
    return {graph_mismatch == 0 && cooc_mismatch == 0 && general_rel <= 1e-12,
            "50 graphs: " + std::to_string(graph_mismatch) + " sssp/Floyd-Warshall mismatches (exact); 10 graphs with "
            "general weights: max relative difference " + fmt(general_rel) + " (<= 1e-12); 50 profile sets: " +
                std::to_string(cooc_mismatch) + " co-occurrence mismatches (exact)"};
}

Outcome degenerate_equality() {
    std::mt19937_64 rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 50 + rng() % 951;
        const std::size_t d = 2 + rng() % 4;
        const auto g = oracle::random_connected_graph(rng, n, 2 * n, false);
        const MdsOptions mds{.eigen = {.seed = rng()}};
        const auto full = isomap(g, d, {.mds = mds});
        const auto all = select_random(n, n, rng());
        const auto landmark = l_isomap(g, all, d, mds);
        worst = std::max(worst, oracle::procrustes_rms(full.coords, landmark.coords));
    }
    return {worst <= 1e-6, "20 graphs, max Procrustes RMS " + fmt(worst) + " (<= 1e-6)"};
}

Outcome landmark_approximation() {
    const auto& f = manifold();
    const std::size_t n = f.graph.node_count();
    const double full = residual_variance(f.geodesics, f.isomap30, 10);
    const std::size_t small = (n * 3 + 50) / 100, large = (n * 30 + 50) / 100;
    double worst_small = 0.0, worst_large = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto a = l_isomap(f.graph, select_random(n, small, seed), 10, {.eigen = {.seed = seed}});
        const auto b = l_isomap(f.graph, select_random(n, large, seed), 10, {.eigen = {.seed = seed}});
        worst_small = std::max(worst_small, residual_variance(f.geodesics, a, 10) - full);
        worst_large = std::max(worst_large, residual_variance(f.geodesics, b, 10) - full);
    }
    return {worst_small <= 0.10 && worst_large <= 0.03,
            std::to_string(n) + " nodes, Isomap RV(10) " + fmt(full) + "; worst excess over 3 seeds: " +
                std::to_string(small) + " landmarks +" + fmt(worst_small) + " (<= 0.10), " + std::to_string(large) +
                " landmarks +" + fmt(worst_large) + " (<= 0.03)"};
}

Outcome curve_shape() {
    const auto& f = manifold();
    const auto curve = residual_variance_curve(f.geodesics, f.isomap30, 30);
    double worst_step = 0.0;
    for (std::size_t k = 21; k < curve.size(); ++k) worst_step = std::max(worst_step, std::abs(curve[k] - curve[k - 1]));
    const double at5 = curve[4];
    return {at5 < 0.1 && worst_step < 0.01,
            "RV(1) " + fmt(curve[0]) + ", RV(5) " + fmt(at5) + " (< 0.1), max |step| for k in 21..30 " +
                fmt(worst_step) + " (< 0.01)"};
}

Outcome maxmin_greedy() {
    std::mt19937_64 rng(404);
    std::size_t steps = 0, wrong = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10 + rng() % 291;
        // Coarse dyadic weights create plenty of ties.
        const auto g = oracle::random_connected_graph(rng, n, n, true);
        const auto fw = oracle::floyd_warshall(g);
        const std::size_t s = 1 + rng() % 3;
        const std::size_t l = std::min(n, s + 5 + rng() % 30);
        const auto set = select_maxmin(g, s, l, rng());
        std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
        std::vector<char> chosen(n, 0);
        for (std::size_t t = 0; t < set.size(); ++t) {
            if (t >= s) {
                double best = -1.0;
                for (std::size_t x = 0; x < n; ++x)
                    if (!chosen[x]) best = std::max(best, nearest[x]);
                ++steps;
                wrong += chosen[set.indices[t]] || nearest[set.indices[t]] != best;
            }
            chosen[set.indices[t]] = 1;
            for (std::size_t x = 0; x < n; ++x) nearest[x] = std::min(nearest[x], fw(set.indices[t], x));
        }
    }
    return {wrong == 0, "20 graphs, " + std::to_string(steps) + " greedy steps, " + std::to_string(wrong) +
                            " outside the brute-force tie set"};
}

Outcome metric_self_consistency() {
    std::vector<std::string> problems;

    // Single shared label.
    const auto shared = labels_from_records({{"a", "rock"}, {"b", "rock"}, {"c", "rock"}, {"c", "jazz"}, {"d", "jazz"}},
                                            LabelKind::genre);
    const auto shared_table = label_similarity_table(shared);
    if (*label_based_similarity("a", "b", shared, shared_table) != 1.0) problems.push_back("shared genre != 1");
    if (*label_based_similarity("d", "d", shared, shared_table) != 1.0) problems.push_back("self similarity != 1");

    // Planted artist clusters: 40 artists with 6 songs each, songs of one
    // artist clustered tightly in the plane; users listen within a few
    // artists.
    std::mt19937_64 rng(505);
    const std::size_t artists = 40, per_artist = 6, songs = artists * per_artist;
    std::vector<std::pair<std::string, std::string>> artist_records, profiles;
    DenseMatrix coords(songs, 2);
    std::normal_distribution<double> jitter(0.0, 0.01);
    std::vector<std::string> ids;
    for (std::size_t s = 0; s < songs; ++s) {
        const std::size_t a = s / per_artist;
        ids.push_back(oracle::item_name(s));
        artist_records.emplace_back(ids.back(), "artist" + std::to_string(a));
        coords(s, 0) = double(a % 8) + jitter(rng);
        coords(s, 1) = double(a / 8) + jitter(rng);
    }
    for (std::size_t u = 0; u < 400; ++u) {
        for (int pick = 0; pick < 4; ++pick) {
            const std::size_t a = rng() % artists;
            profiles.emplace_back("u" + std::to_string(u), ids[a * per_artist + rng() % per_artist]);
        }
    }
    Embedding emb;
    emb.coords = coords;
    emb.item_ids = ids;
    emb.eigenvalues = {1.0, 1.0};
    const auto artist_labels = labels_from_records(artist_records, LabelKind::artist);
    const auto store = ProfileStore::from_records(profiles);
    const auto artist_table = profile_label_similarity_table(store, artist_labels);
    const std::vector<std::size_t> sizes{1, 2, 5, 10, 20};
    const auto rep = artist_similarity_report(emb, artist_labels, artist_table, sizes, 50, 7);
    std::string medians;
    for (const auto& row : rep.rows) medians += (medians.empty() ? "" : ",") + fmt(row.median);
    if (rep.rows[0].median != 1.0 || rep.rows[1].median != 1.0) problems.push_back("artist medians at sizes 1-2 != 1");

    // knn against a linear scan.
    const auto p = oracle::random_points(rng, 2000, 10);
    Embedding big;
    big.coords = p;
    big.item_ids = oracle::node_names(2000);
    std::size_t knn_wrong = 0;
    for (int q = 0; q < 1000; ++q) {
        const std::size_t item = rng() % 2000, k = 1 + rng() % 50, dims = 1 + rng() % 10;
        std::vector<std::pair<double, std::size_t>> scan;
        for (std::size_t i = 0; i < 2000; ++i) {
            if (i == item) continue;
            double s = 0;
            for (std::size_t c = 0; c < dims; ++c) s += (p(i, c) - p(item, c)) * (p(i, c) - p(item, c));
            scan.emplace_back(s, i);
        }
        std::partial_sort(scan.begin(), scan.begin() + static_cast<std::ptrdiff_t>(k), scan.end());
        const auto got = knn(big, item, k, dims);
        for (std::size_t i = 0; i < k; ++i) knn_wrong += got[i] != scan[i].second;
    }
    if (knn_wrong) problems.push_back(std::to_string(knn_wrong) + " knn mismatches");

    std::string detail = "single-label similarity 1; artist medians at sizes 1,2,5,10,20 = " + medians +
                         "; knn 1000 queries, " + std::to_string(knn_wrong) + " mismatches";
    for (const auto& pr : problems) detail += "; " + pr;
    return {problems.empty(), detail};
}

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = std::string("\"") + SIMMAP_CLI_PATH + "\" " + args + " 2>>\"" + (dir / "log").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("simmap_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const std::vector<std::string> outputs{"cooc.tsv", "cooc.tsv.occurrences.tsv", "graph.tsv", "graph.tsv.nodes.tsv",
                                           "graph.tsv.components.tsv", "iso.tsv", "geo.bin", "liso.tsv",
                                           "liso.tsv.landmarks.txt", "rv.tsv", "lrv.tsv"};
    auto pipeline = [&](const std::string& tag, unsigned threads) {
        const fs::path d = root / tag;
        auto q = [&](const std::string& name) { return "\"" + (d / name).string() + "\""; };
        const std::string g = "--no-timestamp --rng-seed 11 --threads " + std::to_string(threads) + " ";
        int rc = 0;
        rc |= run_cli(root, g + "synth --items 500 --users 1500 --profile-size 20 --out " + q("profiles.tsv"));
        rc |= run_cli(root, g + "cooc --profiles " + q("profiles.tsv") + " --out " + q("cooc.tsv"));
        rc |= run_cli(root, g + "--min-cooc 3 graph --cooc " + q("cooc.tsv") + " --out " + q("graph.tsv"));
        rc |= run_cli(root, g + "--dims 8 embed --graph " + q("graph.tsv") + " --geodesic-out " + q("geo.bin") +
                                " --out " + q("iso.tsv"));
        rc |= run_cli(root, g + "--dims 8 --method l-isomap --landmarks 40 --landmark-strategy maxmin --seeds 3 embed "
                                "--graph " + q("graph.tsv") + " --out " + q("liso.tsv"));
        rc |= run_cli(root, g + "eval residual-variance --embedding " + q("iso.tsv") + " --geodesic " + q("geo.bin") +
                                " --out " + q("rv.tsv"));
        rc |= run_cli(root, g + "eval residual-variance --embedding " + q("liso.tsv") + " --geodesic " + q("geo.bin") +
                                " --out " + q("lrv.tsv"));
        return rc;
    };
    if (pipeline("a", 1) || pipeline("b", 1) || pipeline("c", 4)) return {false, "a pipeline stage failed; see " + root.string()};
    std::size_t differing = 0;
    std::string which;
    for (const auto& name : outputs) {
        const auto a = slurp(root / "a" / name);
        if (a.empty() || a != slurp(root / "b" / name) || a != slurp(root / "c" / name)) {
            ++differing;
            which += " " + name;
        }
    }
    if (differing == 0) fs::remove_all(root);
    return {differing == 0, "3 runs (threads 1, 1, 4), " + std::to_string(outputs.size()) + " outputs compared, " +
                                std::to_string(differing) + " differ" + which};
}

}  // namespace

int main() {
    report("mds-exactness", 30, mds_exactness);
    report("oracle-equivalence", 30, oracle_equivalence);
    report("l-isomap-degenerate-equality", 120, degenerate_equality);
    report("landmark-approximation", 300, landmark_approximation);
    report("residual-variance-curve-shape", 0, curve_shape);
    report("maxmin-greedy-correctness", 0, maxmin_greedy);
    report("metric-self-consistency", 0, metric_self_consistency);
    report("determinism", 0, determinism);
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria" << std::endl;
    return failures ? 1 : 0;
}
