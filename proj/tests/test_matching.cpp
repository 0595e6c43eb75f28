#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "kgalign/matching.hpp"
#include "kgalign/rng.hpp"

using namespace kgalign;

namespace {

Matrix make(std::size_t rows, std::size_t cols, std::initializer_list<double> vals) {
    Matrix m(rows, cols);
    std::size_t i = 0;
    for (double v : vals) m.data()[i++] = v;
    return m;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform01();
    return m;
}

// Row-argmax collisions resolved by trading up: u0,u1 both peak at v0,
// u2 at v1; the narrated rounds end in the identity matching.
const Matrix kTradeUp = make(3, 3, {0.9, 0.4, 0.2, 0.8, 0.7, 0.3, 0.1, 0.6, 0.5});

} // namespace

TEST_CASE("preference lists order by similarity with index tie-break") {
    Matrix m = make(2, 2, {0.9, 0.1, 0.2, 0.8});
    PreferenceLists prefs = preference_lists(m);
    CHECK(prefs.source_prefs[0] == std::vector<std::int32_t>{0, 1});
    CHECK(prefs.source_prefs[1] == std::vector<std::int32_t>{1, 0});
    CHECK(prefs.target_prefs[1] == std::vector<std::int32_t>{1, 0});

    Matrix tie = make(1, 3, {0.5, 0.5, 0.5});
    CHECK(preference_lists(tie).source_prefs[0] == std::vector<std::int32_t>{0, 1, 2});

    Matrix tiny = make(1, 1, {0.3});
    PreferenceLists p1 = preference_lists(tiny);
    CHECK(p1.source_prefs[0] == std::vector<std::int32_t>{0});
    CHECK(p1.target_prefs[0] == std::vector<std::int32_t>{0});
}

TEST_CASE("deferred acceptance resolves the trade-up trace") {
    Matching m = deferred_acceptance(preference_lists(kTradeUp));
    CHECK(m.source_to_target == std::vector<std::int32_t>{0, 1, 2});
    CHECK(blocking_pairs(kTradeUp, m).empty());
}

TEST_CASE("deferred acceptance on a diagonal-dominant matrix is first-round identity") {
    Matrix m = make(3, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.1, 0.2, 0.3, 0.7});
    Matching match = deferred_acceptance(preference_lists(m));
    CHECK(match.source_to_target == std::vector<std::int32_t>{0, 1, 2});
}

TEST_CASE("deferred acceptance with fewer sources than targets") {
    Matrix m = make(1, 2, {0.2, 0.9});
    Matching match = deferred_acceptance(preference_lists(m));
    CHECK(match.source_to_target == std::vector<std::int32_t>{1});

    Matrix wide = make(2, 1, {0.2, 0.9});
    CHECK_THROWS_AS(deferred_acceptance(preference_lists(wide)), DataError);
}

TEST_CASE("independent match is the row argmax with collisions allowed") {
    auto ind = independent_match(kTradeUp);
    CHECK(ind == std::vector<std::int32_t>{0, 0, 1});

    Matrix diag = make(2, 2, {0.9, 0.1, 0.2, 0.8});
    CHECK(independent_match(diag) == std::vector<std::int32_t>{0, 1});

    Matrix tiny = make(1, 1, {0.4});
    CHECK(independent_match(tiny) == std::vector<std::int32_t>{0});
}

TEST_CASE("blocking pairs: hand-matched swap") {
    Matrix m = make(2, 2, {0.9, 0.1, 0.1, 0.9});
    Matching swapped{{1, 0}};
    auto bps = blocking_pairs(m, swapped);
    REQUIRE(bps.size() == 2);
    CHECK(bps[0] == BlockingPair{0, 0});
    CHECK(bps[1] == BlockingPair{1, 1});
}

TEST_CASE("blocking pairs: empty matching blocks on every cell") {
    Matrix m = make(2, 2, {0.4, 0.3, 0.2, 0.1});
    Matching empty{{kUnmatched, kUnmatched}};
    CHECK(blocking_pairs(m, empty).size() == 4);
}

TEST_CASE("blocking pairs rejects non-injective matchings") {
    Matrix m = make(2, 2, {0.4, 0.3, 0.2, 0.1});
    Matching collide{{0, 0}};
    CHECK_THROWS_AS(blocking_pairs(m, collide), DataError);
}

TEST_CASE("enumeration oracle") {
    Matrix diag = make(3, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.1, 0.2, 0.3, 0.7});
    auto all = enumerate_stable_matchings(diag);
    REQUIRE(all.size() == 1);
    CHECK(all[0].source_to_target == std::vector<std::int32_t>{0, 1, 2});

    Matrix tiny = make(1, 1, {0.4});
    CHECK(enumerate_stable_matchings(tiny).size() == 1);

    CHECK_THROWS_AS(enumerate_stable_matchings(Matrix(9, 9)), DataError);
    CHECK_THROWS_AS(enumerate_stable_matchings(Matrix(2, 3)), DataError);
}

TEST_CASE("DAA output is stable on random matrices") {
    Rng rng(12021);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 2 + rng.uniform_int(7);
        std::size_t m = n + rng.uniform_int(8 - n + 1);
        Matrix sim = random_matrix(rng, n, m);
        Matching match = deferred_acceptance(preference_lists(sim));
        REQUIRE(match.matched_count() == n);
        REQUIRE(blocking_pairs(sim, match).empty());
    }
}

TEST_CASE("DAA is the source-optimal stable matching") {
    Rng rng(90210);
    for (int round = 0; round < 40; ++round) {
        std::size_t n = 2 + rng.uniform_int(5); // up to 6
        Matrix sim = random_matrix(rng, n, n);
        Matching daa = deferred_acceptance(preference_lists(sim));
        auto stable = enumerate_stable_matchings(sim);
        REQUIRE(!stable.empty());

        bool found = false;
        for (const Matching& s : stable) found = found || s == daa;
        REQUIRE(found);

        // Each source weakly prefers its DAA partner to its partner in
        // any other stable matching.
        for (const Matching& s : stable) {
            for (std::size_t u = 0; u < n; ++u) {
                std::int32_t mine = daa.source_to_target[u];
                std::int32_t other = s.source_to_target[u];
                if (mine == other) continue;
                double vm = sim(u, mine), vo = sim(u, other);
                bool prefers = vm > vo || (vm == vo && mine < other);
                REQUIRE(prefers);
            }
        }
    }
}

TEST_CASE("DAA is invariant under strictly increasing transforms") {
    Rng rng(60601);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 2 + rng.uniform_int(7);
        Matrix sim = random_matrix(rng, n, n);
        Matrix cubed = sim;
        for (double& v : cubed.data()) v = v * v * v;
        Matching a = deferred_acceptance(preference_lists(sim));
        Matching b = deferred_acceptance(preference_lists(cubed));
        REQUIRE(a == b);
    }
}

TEST_CASE("independent and collective agree when argmax is already stable") {
    Rng rng(11);
    int agreements = 0;
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 2 + rng.uniform_int(5);
        Matrix sim = random_matrix(rng, n, n);
        auto ind = independent_match(sim);
        std::set<std::int32_t> targets(ind.begin(), ind.end());
        if (targets.size() != ind.size()) continue; // collision
        Matching as_matching{ind};
        if (!blocking_pairs(sim, as_matching).empty()) continue;
        ++agreements;
        Matching daa = deferred_acceptance(preference_lists(sim));
        REQUIRE(daa == as_matching);
    }
    REQUIRE(agreements > 0);
}

TEST_CASE("trace logging names rounds and proposals") {
    std::ostringstream trace;
    deferred_acceptance(preference_lists(kTradeUp), &trace);
    std::string log = trace.str();
    CHECK(log.find("round 1: source 0 -> target 0: accepted") != std::string::npos);
    CHECK(log.find("rejected") != std::string::npos);
    CHECK(log.find("round 2: source 1 -> target 1: accepted, source 2 released") !=
          std::string::npos);
    CHECK(log.find("round 3: source 2 -> target 2: accepted") != std::string::npos);
}
