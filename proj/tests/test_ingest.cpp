#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "simmap/error.hpp"
#include "simmap/ingest.hpp"
#include "simmap/parallel.hpp"
#include "support/oracles.hpp"

using namespace simmap;

namespace {

std::uint32_t occ(const ProfileStore& s, std::string_view id) { return s.items().occurrences[*s.items().find(id)]; }

std::uint32_t cooc_of(const CoocMatrix& m, const ProfileStore& s, std::string_view a, std::string_view b) {
    return m.count(*s.items().find(a), *s.items().find(b));
}

}  // namespace

TEST_CASE("parse_profiles counts occurrences per user") {
    std::istringstream in("u1\ta\nu1\tb\nu2\ta\n");
    const auto store = parse_profiles(in);
    CHECK(store.user_count() == 2);
    CHECK(occ(store, "a") == 2);
    CHECK(occ(store, "b") == 1);
}

TEST_CASE("duplicate items within one user count once") {
    std::istringstream in("u1\ta\nu1\ta\n");
    const auto store = parse_profiles(in);
    CHECK(occ(store, "a") == 1);
    CHECK(store.users().front().items.size() == 1);
}

TEST_CASE("profile parsing tolerates CRLF and blank lines") {
    std::istringstream in("u1\ta\r\n\nu2\tb\r\n");
    const auto store = parse_profiles(in);
    CHECK(store.item_count() == 2);
    CHECK(store.items().ids == std::vector<std::string>{"a", "b"});
}

TEST_CASE("malformed profile lines report their line number") {
    std::istringstream one_field("u1\ta\nbroken\n");
    try {
        parse_profiles(one_field, "p.tsv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("p.tsv:2") != std::string::npos);
    }
    std::istringstream three_fields("u1\ta\tx\n");
    CHECK_THROWS_AS(parse_profiles(three_fields), ParseError);
    std::istringstream empty_field("u1\t\n");
    CHECK_THROWS_AS(parse_profiles(empty_field), ParseError);
}

TEST_CASE("empty profile input is an empty-store error") {
    std::istringstream in("");
    CHECK_THROWS_AS(parse_profiles(in), EmptyInputError);
}

TEST_CASE("occurrence totals equal the number of distinct (user, item) pairs") {
    std::mt19937_64 rng(1);
    const auto records = oracle::random_profiles(rng, 1000, 25, 3000);
    const auto store = ProfileStore::from_records(records);
    std::set<std::pair<std::string, std::string>> distinct(records.begin(), records.end());
    std::uint64_t total = 0;
    for (auto c : store.items().occurrences) {
        CHECK(c >= 1);
        total += c;
    }
    CHECK(total == distinct.size());
}

TEST_CASE("count_cooccurrences on small profiles") {
    SUBCASE("single profile") {
        const auto store = ProfileStore::from_records({{"u1", "a"}, {"u1", "b"}, {"u1", "c"}});
        const auto m = count_cooccurrences(store);
        CHECK(cooc_of(m, store, "a", "b") == 1);
        CHECK(cooc_of(m, store, "a", "c") == 1);
        CHECK(cooc_of(m, store, "b", "c") == 1);
        CHECK(m.entries().size() == 3);
    }
    SUBCASE("two profiles sharing a pair") {
        const auto store = ProfileStore::from_records({{"u1", "a"}, {"u1", "b"}, {"u2", "a"}, {"u2", "b"}});
        const auto m = count_cooccurrences(store);
        CHECK(cooc_of(m, store, "a", "b") == 2);
        CHECK(cooc_of(m, store, "b", "a") == 2);
        CHECK(cooc_of(m, store, "a", "a") == 0);
    }
}

TEST_CASE("count_cooccurrences matches the brute-force oracle") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto records = oracle::random_profiles(rng, 200, 10, 60);
        const auto store = ProfileStore::from_records(records);
        const auto m = count_cooccurrences(store);
        const auto expected = oracle::brute_cooc(records);
        REQUIRE(m.entries().size() == expected.size());
        for (const auto& [pair, count] : expected) CHECK(cooc_of(m, store, pair.first, pair.second) == count);
    }
}

TEST_CASE("co-occurrence invariants: bounded by occurrences, no diagonal, positive") {
    std::mt19937_64 rng(3);
    const auto store = ProfileStore::from_records(oracle::random_profiles(rng, 300, 15, 100));
    const auto m = count_cooccurrences(store);
    for (const auto& e : m.entries()) {
        CHECK(e.a < e.b);
        CHECK(e.count >= 1);
        CHECK(e.count <= std::min(store.items().occurrences[e.a], store.items().occurrences[e.b]));
    }
}

TEST_CASE("count_cooccurrences is invariant under record permutation and thread count") {
    std::mt19937_64 rng(4);
    auto records = oracle::random_profiles(rng, 400, 12, 150);
    set_thread_count(1);
    const auto base = count_cooccurrences(ProfileStore::from_records(records));
    for (unsigned threads : {2u, 3u, 7u}) {
        std::shuffle(records.begin(), records.end(), rng);
        set_thread_count(threads);
        CHECK(count_cooccurrences(ProfileStore::from_records(records)) == base);
    }
    set_thread_count(0);
}

TEST_CASE("CoocMatrix rejects malformed entries") {
    CHECK_THROWS_AS(CoocMatrix(3, {{1, 1, 2}}), ContractError);
    CHECK_THROWS_AS(CoocMatrix(3, {{0, 1, 0}}), ContractError);
    CHECK_THROWS_AS(CoocMatrix(3, {{0, 5, 1}}), ContractError);
    CHECK_THROWS_AS(CoocMatrix(3, {{0, 1, 1}, {1, 0, 2}}), ContractError);
}

TEST_CASE("parse_labels") {
    SUBCASE("single label") {
        std::istringstream in("s1\trock\n");
        const auto t = parse_labels(in, LabelKind::genre);
        REQUIRE(t.find("s1"));
        CHECK(t.label_names[t.find("s1")->front()] == "rock");
    }
    SUBCASE("multi-label items keep every label") {
        std::istringstream in("s1\trock\ns1\tpop\ns1\trock\n");
        const auto t = parse_labels(in, LabelKind::genre);
        const auto* l = t.find("s1");
        REQUIRE(l);
        REQUIRE(l->size() == 2);
        CHECK(t.label_names[(*l)[0]] == "rock");
        CHECK(t.label_names[(*l)[1]] == "pop");
    }
    SUBCASE("empty stream is a valid empty table") {
        std::istringstream in("");
        const auto t = parse_labels(in, LabelKind::artist);
        CHECK(t.labels.empty());
        CHECK(t.kind == LabelKind::artist);
        CHECK(t.find("anything") == nullptr);
    }
    SUBCASE("malformed line") {
        std::istringstream in("s1\trock\ns2\n");
        CHECK_THROWS_AS(parse_labels(in, LabelKind::genre), ParseError);
    }
}

TEST_CASE("label kinds parse from CLI text") {
    CHECK(parse_label_kind("artist") == LabelKind::artist);
    CHECK(parse_label_kind("genre") == LabelKind::genre);
    CHECK_THROWS_AS(parse_label_kind("mood"), ValidationError);
}
