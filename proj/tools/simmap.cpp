// simmap: build similarity maps from co-occurrence data, stage by stage.
//
//   simmap cooc      --profiles p.tsv --out cooc.tsv
//   simmap graph     --cooc cooc.tsv --min-cooc 5 --out graph.tsv
//   simmap landmarks --graph graph.tsv --landmark-strategy maxmin --landmarks 200 --seeds 10 --out lm.txt
//   simmap embed     --graph graph.tsv --dims 10 --out map.tsv
//   simmap eval residual-variance|neighborhood|gradient|knn ...

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "simmap/config.hpp"
#include "simmap/error.hpp"
#include "simmap/io.hpp"
#include "simmap/kernels.hpp"
#include "simmap/parallel.hpp"
#include "simmap/pipeline.hpp"
#include "simmap/synthetic.hpp"

namespace {

struct Flag {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
};

class FlagSet {
public:
    void add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
        auto& f = flags_.emplace_back(std::make_unique<Flag>());
        f->key = key;
        f->option = app->add_option(name, f->value, help);
    }

    /// Explicit command-line values, applied after the config file.
    void apply(simmap::PipelineConfig& config) const {
        for (const auto& f : flags_) {
            if (f->option->count() > 0) config.set(f->key, f->value);
        }
    }

private:
    std::vector<std::unique_ptr<Flag>> flags_;
};

int exit_code(simmap::ErrorKind kind) { return static_cast<int>(kind); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Similarity maps from co-occurrence data (Isomap / Landmark-Isomap)"};
    app.require_subcommand(1);
    app.fallthrough();

    FlagSet flags;
    std::string config_file;
    bool no_timestamp = false;
    std::string kernels_isa;
    app.add_option("--config", config_file, "Flat key=value config file; command-line flags override it");
    app.add_flag("--no-timestamp", no_timestamp, "Omit creation timestamps from metadata lines");
    app.add_option("--kernels", kernels_isa, "Force the kernel ISA (scalar, avx2, neon)");
    flags.add(&app, "--threads", "threads", "Worker threads (default: all cores)");
    flags.add(&app, "--rng-seed", "rng_seed", "Pipeline random seed");
    flags.add(&app, "--min-cooc", "min_cooc", "Minimum co-occurrence count for an edge");
    flags.add(&app, "--dims", "dims", "Embedding dimensions (1..100)");
    flags.add(&app, "--method", "method", "isomap or l-isomap");
    flags.add(&app, "--landmark-strategy", "landmark_strategy", "random or maxmin");
    flags.add(&app, "--landmarks", "landmarks", "Number of landmarks (l)");
    flags.add(&app, "--seeds", "seeds", "MaxMin seed landmarks (s)");
    flags.add(&app, "--n-cap", "n_cap", "Largest n accepted for all-pairs geodesics");

    auto* cooc = app.add_subcommand("cooc", "Count item co-occurrences from user profiles");
    flags.add(cooc, "--profiles", "profiles", "user_id<TAB>item_id file");
    flags.add(cooc, "--out", "out", "Co-occurrence output");
    flags.add(cooc, "--occurrences", "occurrences", "Occurrence output (default <out>.occurrences.tsv)");

    auto* graph = app.add_subcommand("graph", "Threshold co-occurrences into a similarity graph");
    flags.add(graph, "--cooc", "cooc", "Co-occurrence file");
    flags.add(graph, "--occurrences", "occurrences", "Occurrence file (default <cooc>.occurrences.tsv)");
    flags.add(graph, "--out", "out", "Edge-list output");
    flags.add(graph, "--nodes", "nodes", "Node table output (default <out>.nodes.tsv)");

    auto* landmarks = app.add_subcommand("landmarks", "Select landmark nodes");
    flags.add(landmarks, "--graph", "graph", "Edge-list file");
    flags.add(landmarks, "--nodes", "nodes", "Node table (default <graph>.nodes.tsv)");
    flags.add(landmarks, "--out", "out", "Landmark list output");

    auto* embed = app.add_subcommand("embed", "Embed the graph with Isomap or L-Isomap");
    flags.add(embed, "--graph", "graph", "Edge-list file");
    flags.add(embed, "--nodes", "nodes", "Node table (default <graph>.nodes.tsv)");
    flags.add(embed, "--landmarks-file", "landmarks_file", "Use these landmarks instead of selecting");
    flags.add(embed, "--geodesic-out", "geodesic", "Dump the geodesic matrix (binary)");
    flags.add(embed, "--out", "out", "Embedding output");

    auto* eval = app.add_subcommand("eval", "Evaluate an embedding");
    eval->require_subcommand(1);
    simmap::EvalOptions eval_options;
    std::string sizes_text;
    auto add_eval = [&](const std::string& name, const std::string& help) {
        auto* sub = eval->add_subcommand(name, help);
        flags.add(sub, "--embedding", "embedding", "Embedding file");
        flags.add(sub, "--out", "out", "Report output (TSV)");
        sub->add_option("--eval-dims", eval_options.dims, "Use only the first N coordinates (default all)");
        return sub;
    };
    auto* rv = add_eval("residual-variance", "Residual variance per dimension");
    flags.add(rv, "--geodesic", "geodesic", "Geodesic matrix dump from embed");
    flags.add(rv, "--graph", "graph", "Recompute reference geodesics from this graph");
    flags.add(rv, "--nodes", "nodes", "Node table (default <graph>.nodes.tsv)");
    flags.add(rv, "--landmarks-file", "landmarks_file", "Landmark rows of the reference matrix");
    rv->add_option("--k-max", eval_options.k_max, "Largest k (default: embedding dims)");

    auto* nb = add_eval("neighborhood", "Label similarity within neighborhoods of increasing size");
    flags.add(nb, "--labels", "labels", "item_id<TAB>label_id file");
    flags.add(nb, "--profiles", "profiles", "Profiles (needed for --kind artist)");
    nb->add_option("--kind", eval_options.label_kind, "genre or artist")->check(CLI::IsMember({"genre", "artist"}));
    nb->add_option("--sizes", sizes_text, "Comma-separated neighborhood sizes (default 1,2,5,10,20,50)");
    nb->add_option("--sample", eval_options.sample, "Sampled items (default 50)");

    auto* gr = add_eval("gradient", "Label smoothness along random lines");
    flags.add(gr, "--labels", "labels", "item_id<TAB>label_id file");
    flags.add(gr, "--profiles", "profiles", "Profiles (needed for --kind artist)");
    gr->add_option("--kind", eval_options.label_kind, "genre or artist")->check(CLI::IsMember({"genre", "artist"}));
    gr->add_option("--points", eval_options.points, "Points per line (default 20)");
    gr->add_option("--lines", eval_options.lines, "Number of lines (default 100)");

    auto* kn = add_eval("knn", "Nearest neighbors of one item");
    kn->add_option("--item", eval_options.item, "Query item id")->required();
    kn->add_option("--k", eval_options.k, "Neighbor count (default 10)");

    auto* synth = app.add_subcommand("synth", "Write a synthetic profiles file sampled from a 2-D latent square");
    simmap::ManifoldOptions synth_options;
    std::string synth_out;
    synth->add_option("--items", synth_options.items, "Item count");
    synth->add_option("--users", synth_options.users, "User count");
    synth->add_option("--profile-size", synth_options.profile_size, "Items per user");
    synth->add_option("--seed", synth_options.seed, "Generator seed");
    synth->add_option("--out", synth_out, "Profiles output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(simmap::ErrorKind::validation);
    }

    try {
        if (!kernels_isa.empty()) {
            bool matched = false;
            for (auto isa : {simmap::kernels::Isa::scalar, simmap::kernels::Isa::avx2, simmap::kernels::Isa::neon}) {
                if (simmap::kernels::isa_name(isa) == kernels_isa) {
                    simmap::kernels::set_active_isa(isa);
                    matched = true;
                }
            }
            if (!matched) throw simmap::ValidationError("unknown kernel ISA '" + kernels_isa + "'");
        }

        simmap::PipelineConfig config;
        if (!config_file.empty()) simmap::apply_config_file(config, config_file);
        flags.apply(config);
        if (no_timestamp) config.timestamp = false;
        simmap::set_thread_count(config.threads);

        if (!sizes_text.empty()) {
            eval_options.sizes.clear();
            for (const auto& part : CLI::detail::split(sizes_text, ',')) {
                eval_options.sizes.push_back(simmap::io::parse_uint(part, "--sizes", 1));
            }
        }

        if (cooc->parsed()) {
            const auto s = simmap::cmd_cooc(config);
            std::cerr << "cooc: " << s.users << " users, " << s.items << " items, " << s.pairs << " co-occurring pairs\n";
        } else if (graph->parsed()) {
            const auto s = simmap::cmd_graph(config);
            std::cerr << "graph: " << s.components.size() << " components; largest has " << s.nodes << " nodes, "
                      << s.edges << " edges\n";
        } else if (landmarks->parsed()) {
            const auto s = simmap::cmd_landmarks(config);
            std::cerr << "landmarks: selected " << s.size() << " (" << simmap::strategy_name(s.strategy) << ")\n";
        } else if (embed->parsed()) {
            const auto e = simmap::cmd_embed(config);
            std::cerr << "embed: " << e.size() << " items in " << e.dims() << " dims ("
                      << e.provenance.value("clamped_dims", 0) << " clamped)\n";
        } else if (eval->parsed()) {
            if (rv->parsed()) eval_options.metric = simmap::Metric::residual_variance;
            if (nb->parsed()) eval_options.metric = simmap::Metric::neighborhood;
            if (gr->parsed()) eval_options.metric = simmap::Metric::gradient;
            if (kn->parsed()) eval_options.metric = simmap::Metric::knn;
            simmap::cmd_eval(config, eval_options);
        } else if (synth->parsed()) {
            const auto data = simmap::latent_manifold_profiles(synth_options);
            auto out = simmap::io::open_output(synth_out);
            for (const auto& [user, item] : data.records) out << user << '\t' << item << '\n';
        }
    } catch (const simmap::Error& e) {
        std::cerr << "simmap: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "simmap: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
