#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "kgalign/rng.hpp"
#include "kgalign/strsim.hpp"
#include "oracles.hpp"

using namespace kgalign;
using oracles::lev;

namespace {

std::string random_string(Rng& rng, std::size_t max_len) {
    static const std::vector<std::string> alphabet = {"a", "b", "c", "\xC3\xA9",
                                                      "\xE5\xA5\xBD"};
    std::size_t len = rng.uniform_int(max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_int(alphabet.size())];
    return s;
}

} // namespace

TEST_CASE("levenshtein hand values") {
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("kitten", "sitting") == lev("kitten", "sitting", 1));
}

TEST_CASE("levenshtein counts unicode scalars, not bytes") {
    // Two-byte e-acute against plain e: one substitution.
    CHECK(levenshtein("\xC3\xA9", "e") == 1);
    CHECK(levenshtein_sub2("\xC3\xA9", "e") == 2);
    // Three CJK scalars.
    CHECK(levenshtein("\xE5\xA5\xBD\xE5\xA5\xBD\xE5\xA5\xBD", "") == 3);
}

TEST_CASE("substitution-cost-2 variant hand values") {
    CHECK(levenshtein_sub2("a", "c") == 2);
    CHECK(levenshtein_sub2("ab", "ab") == 0);
    CHECK(levenshtein_sub2("kitten", "sitting") == 5);
    CHECK(levenshtein_sub2("kitten", "sitting") == lev("kitten", "sitting", 2));
}

TEST_CASE("levenshtein ratio hand values") {
    CHECK(levenshtein_ratio("a", "c") == 0.0);
    CHECK(levenshtein_ratio("paris", "paris") == 1.0);
    CHECK(levenshtein_ratio("", "") == 1.0);
    CHECK(levenshtein_ratio("kitten", "sitting") == Catch::Approx(8.0 / 13.0));
}

TEST_CASE("string similarity matrix") {
    Matrix m = string_similarity_matrix({"paris"}, {"paris"});
    REQUIRE(m.rows() == 1);
    CHECK(m(0, 0) == 1.0);

    Matrix folded = string_similarity_matrix({"Paris"}, {"paris"});
    CHECK(folded(0, 0) == 1.0);
    StringSimConfig raw{.normalize_case = false};
    Matrix unfolded = string_similarity_matrix({"Paris"}, {"paris"}, raw);
    CHECK(unfolded(0, 0) < 1.0);

    Matrix grid = string_similarity_matrix({"a", "ab"}, {"a", "b"});
    CHECK(grid(0, 0) == 1.0);
    CHECK(grid(0, 1) == 0.0);
    // Both ("ab","a") and ("ab","b") are one deletion away: ratio 2/3.
    CHECK(grid(1, 0) == Catch::Approx(2.0 / 3.0));
    CHECK(grid(1, 1) == Catch::Approx(2.0 / 3.0));
    CHECK(grid(1, 1) == Catch::Approx((2.0 + 1.0 - static_cast<double>(lev("ab", "b", 2))) / 3.0));
}

TEST_CASE("DP equals memoized recursion on random pairs") {
    Rng rng(20240817);
    for (int i = 0; i < 1000; ++i) {
        std::string a = random_string(rng, 12);
        std::string b = random_string(rng, 12);
        CAPTURE(a, b);
        REQUIRE(levenshtein(a, b) == lev(a, b, 1));
        REQUIRE(levenshtein_sub2(a, b) == lev(a, b, 2));
    }
}

TEST_CASE("distance properties") {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        std::string a = random_string(rng, 10);
        std::string b = random_string(rng, 10);
        CAPTURE(a, b);
        auto d1 = levenshtein(a, b);
        auto d2 = levenshtein_sub2(a, b);
        CHECK(d1 == levenshtein(b, a));
        CHECK(d2 == levenshtein_sub2(b, a));
        CHECK((d1 == 0) == (utf8_decode(a) == utf8_decode(b)));
        CHECK((d2 == 0) == (d1 == 0));
        CHECK(d1 <= d2);
        CHECK(d2 <= 2 * d1);
        double r = levenshtein_ratio(a, b);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        auto la = utf8_decode(a).size();
        auto lb = utf8_decode(b).size();
        CHECK((r == 1.0) == (a == b || (la == 0 && lb == 0)));
        CHECK((r == 0.0) == (d2 == la + lb && la + lb > 0));
    }
}
