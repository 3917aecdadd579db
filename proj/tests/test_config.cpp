#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "simmap/config.hpp"
#include "simmap/error.hpp"

using namespace simmap;

TEST_CASE("config text parsing") {
    const auto kv = parse_config_text("# comment\n\n  dims = 12 \nmethod=l-isomap\r\n", "cfg");
    REQUIRE(kv.size() == 2);
    CHECK(kv[0] == std::pair<std::string, std::string>{"dims", "12"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"method", "l-isomap"});
    try {
        parse_config_text("dims=3\nnot a pair\n", "cfg");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("set stores typed values and rejects unknown keys") {
    PipelineConfig c;
    c.set("min_cooc", "3");
    c.set("dims", "25");
    c.set("method", "l-isomap");
    c.set("landmark_strategy", "maxmin");
    c.set("landmarks", "100");
    c.set("seeds", "4");
    c.set("rng_seed", "99");
    c.set("graph", "data/g.tsv");
    CHECK(c.min_cooc == 3);
    CHECK(c.dims == 25);
    CHECK(c.method == EmbedMethod::l_isomap);
    CHECK(c.landmark_strategy == LandmarkStrategy::maxmin);
    CHECK(c.landmarks == 100);
    CHECK(c.seeds == 4);
    CHECK(c.rng_seed == 99);
    CHECK(c.path("graph") == "data/g.tsv");
    CHECK(c.path("embedding").empty());
    CHECK_THROWS_AS(c.set("colour", "blue"), ValidationError);
    CHECK_THROWS_AS(c.set("dims", "ten"), ValidationError);
    CHECK_THROWS_AS(c.set("method", "tsne"), ValidationError);
}

TEST_CASE("cross-field validation") {
    PipelineConfig c;
    CHECK_NOTHROW(validate(c, Stage::embed));
    c.dims = 0;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);
    c.dims = 101;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);
    c.dims = 10;
    c.method = EmbedMethod::l_isomap;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);  // no l
    c.landmarks = 10;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);  // d > l - 1
    c.landmarks = 11;
    CHECK_NOTHROW(validate(c, Stage::embed));
    c.landmark_strategy = LandmarkStrategy::maxmin;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);  // s unset
    c.seeds = 12;
    CHECK_THROWS_AS(validate(c, Stage::embed), ValidationError);
    c.seeds = 2;
    CHECK_NOTHROW(validate(c, Stage::embed));
    c.min_cooc = 0;
    CHECK_THROWS_AS(validate(c, Stage::graph), ValidationError);
}

TEST_CASE("a landmark file replaces selection parameters") {
    PipelineConfig c;
    c.method = EmbedMethod::l_isomap;
    c.set("landmarks_file", "lm.txt");
    CHECK_NOTHROW(validate(c, Stage::embed));
}
