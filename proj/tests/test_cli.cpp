#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SIMMAP_CLI_PATH
#error "SIMMAP_CLI_PATH must name the simmap executable"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("simmap_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + SIMMAP_CLI_PATH + "\" " + args + " 2>>\"" +
                            (workdir() / "stderr.log").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string path(const std::string& name) { return "\"" + (workdir() / name).string() + "\""; }

/// synth -> cooc -> graph -> embed (+ geodesic) -> eval, all outputs under `tag`.
void full_pipeline(const std::string& tag, const std::string& extra) {
    const std::string common = "--no-timestamp " + extra + " ";
    REQUIRE(run(common + "synth --items 200 --users 600 --profile-size 15 --seed 3 --out " + path("profiles.tsv")) == 0);
    REQUIRE(run(common + "cooc --profiles " + path("profiles.tsv") + " --out " + path(tag + "/cooc.tsv")) == 0);
    REQUIRE(run(common + "--min-cooc 2 graph --cooc " + path(tag + "/cooc.tsv") + " --out " + path(tag + "/graph.tsv")) == 0);
    REQUIRE(run(common + "--dims 5 embed --graph " + path(tag + "/graph.tsv") + " --geodesic-out " +
                path(tag + "/geo.bin") + " --out " + path(tag + "/emb.tsv")) == 0);
    REQUIRE(run(common + "--dims 4 --method l-isomap --landmarks 30 --landmark-strategy maxmin --seeds 2 embed --graph " +
                path(tag + "/graph.tsv") + " --out " + path(tag + "/lemb.tsv")) == 0);
    REQUIRE(run(common + "eval residual-variance --embedding " + path(tag + "/emb.tsv") + " --geodesic " +
                path(tag + "/geo.bin") + " --out " + path(tag + "/rv.tsv")) == 0);
    REQUIRE(run(common + "eval knn --embedding " + path(tag + "/emb.tsv") + " --item i0000007 --k 5 --out " +
                path(tag + "/knn.tsv")) == 0);
}

std::size_t count_rows(const std::string& text) {
    std::size_t rows = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#';
    return rows;
}

}  // namespace

TEST_CASE("the full pipeline writes one row per item and is byte-identical across thread counts") {
    full_pipeline("t1", "--threads 1");
    full_pipeline("t4", "--threads 4");
    const auto emb = slurp(workdir() / "t1/emb.tsv");
    CHECK(count_rows(emb) == 200);
    CHECK(emb.find("dims=5") != std::string::npos);
    CHECK(emb.find("created") == std::string::npos);
    CHECK(count_rows(slurp(workdir() / "t1/rv.tsv")) == 5);
    CHECK(count_rows(slurp(workdir() / "t1/knn.tsv")) == 5);
    for (const char* name : {"cooc.tsv", "cooc.tsv.occurrences.tsv", "graph.tsv", "graph.tsv.nodes.tsv", "emb.tsv",
                             "geo.bin", "lemb.tsv", "lemb.tsv.landmarks.txt", "rv.tsv", "knn.tsv"}) {
        CAPTURE(name);
        const auto a = slurp(workdir() / "t1" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(workdir() / "t4" / name));
    }
}

TEST_CASE("flags override the config file") {
    {
        std::ofstream cfg(workdir() / "run.cfg");
        cfg << "# fixture\ndims = 3\nmin_cooc = 2\n";
    }
    REQUIRE(run("--no-timestamp synth --items 60 --users 200 --profile-size 10 --seed 1 --out " + path("p60.tsv")) == 0);
    REQUIRE(run("--config " + path("run.cfg") + " cooc --profiles " + path("p60.tsv") + " --out " + path("c60.tsv")) == 0);
    REQUIRE(run("--config " + path("run.cfg") + " graph --cooc " + path("c60.tsv") + " --out " + path("g60.tsv")) == 0);
    REQUIRE(run("--config " + path("run.cfg") + " embed --graph " + path("g60.tsv") + " --out " + path("e3.tsv")) == 0);
    REQUIRE(run("--config " + path("run.cfg") + " --dims 2 embed --graph " + path("g60.tsv") + " --out " + path("e2.tsv")) == 0);
    CHECK(slurp(workdir() / "e3.tsv").find("dims=3") != std::string::npos);
    CHECK(slurp(workdir() / "e2.tsv").find("dims=2") != std::string::npos);
}

TEST_CASE("exit codes") {
    SUBCASE("validation errors exit with 2") {
        CHECK(run("--dims 0 embed --graph " + path("g60.tsv") + " --out " + path("x.tsv")) == 2);
        CHECK(run("--method l-isomap --dims 5 --landmarks 5 embed --graph " + path("g60.tsv") + " --out " + path("x.tsv")) == 2);
        CHECK(run("--no-such-flag") == 2);
        CHECK(run("--kernels sse9 synth --out " + path("x.tsv")) == 2);
    }
    SUBCASE("missing or malformed input exits with 3") {
        CHECK(run("cooc --profiles " + path("does_not_exist.tsv") + " --out " + path("x.tsv")) == 3);
        {
            std::ofstream bad(workdir() / "bad_profiles.tsv");
            bad << "u1\ti1\nu2 i2\n";
        }
        CHECK(run("cooc --profiles " + path("bad_profiles.tsv") + " --out " + path("x.tsv")) == 3);
    }
    SUBCASE("numerical failure exits with 4") {
        // Equilateral triangle: every reference distance is equal, so the
        // residual variance correlation is undefined.
        {
            std::ofstream edges(workdir() / "tri.tsv");
            edges << "# {}\n0\t1\t0.5\n0\t2\t0.5\n1\t2\t0.5\n";
            std::ofstream nodes(workdir() / "tri.tsv.nodes.tsv");
            nodes << "0\ta\n1\tb\n2\tc\n";
        }
        REQUIRE(run("--no-timestamp --dims 1 embed --graph " + path("tri.tsv") + " --out " + path("tri_emb.tsv")) == 0);
        CHECK(run("eval residual-variance --embedding " + path("tri_emb.tsv") + " --graph " + path("tri.tsv") +
                  " --out " + path("tri_rv.tsv")) == 4);
    }
}

TEST_CASE("label-based reports run end to end") {
    // Depends on t1/ from the pipeline case; labels split the latent square in halves.
    const auto emb = slurp(workdir() / "t1/emb.tsv");
    REQUIRE_FALSE(emb.empty());
    {
        std::ofstream genres(workdir() / "genres.tsv");
        std::ofstream artists(workdir() / "artists.tsv");
        for (int i = 0; i < 200; ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "i%07d", i);
            genres << id << '\t' << (i % 2 ? "odd" : "even") << '\n';
            if (i % 3 == 0) genres << id << "\tthirds\n";
            artists << id << "\tartist" << i / 4 << '\n';
        }
    }
    CHECK(run("--no-timestamp eval neighborhood --embedding " + path("t1/emb.tsv") + " --labels " + path("genres.tsv") +
              " --sizes 1,2,5 --sample 20 --out " + path("nb.tsv")) == 0);
    const auto nb = slurp(workdir() / "nb.tsv");
    CHECK(count_rows(nb) == 3);
    CHECK(nb.rfind("# ", 0) == 0);
    CHECK(run("--no-timestamp eval neighborhood --kind artist --embedding " + path("t1/emb.tsv") + " --labels " +
              path("artists.tsv") + " --profiles " + path("profiles.tsv") + " --sizes 1,2 --sample 10 --out " +
              path("artist.tsv")) == 0);
    CHECK(count_rows(slurp(workdir() / "artist.tsv")) == 2);
    CHECK(run("--no-timestamp eval gradient --embedding " + path("t1/emb.tsv") + " --labels " + path("genres.tsv") +
              " --points 10 --lines 7 --out " + path("grad.tsv")) == 0);
    CHECK(count_rows(slurp(workdir() / "grad.tsv")) == 7);
    CHECK(run("eval neighborhood --embedding " + path("t1/emb.tsv") + " --labels " + path("genres.tsv") +
              " --sizes 5,2 --out " + path("x.tsv")) == 2);
    CHECK(run("eval knn --embedding " + path("t1/emb.tsv") + " --item nope --out " + path("x.tsv")) == 2);
}
