#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "kgalign/semantic.hpp"
#include "test_util.hpp"

using namespace kgalign;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("load_word_embeddings") {
    TempDir tmp;
    write_file(tmp.file("v.txt"), "alpha 1 0 0\nbeta 0 1 0\n");
    WordEmbeddingStore store = load_word_embeddings(tmp.file("v.txt"));
    CHECK(store.size() == 2);
    CHECK(store.dim == 3);
    CHECK(store.vectors.at("alpha") == std::vector<double>{1, 0, 0});

    // A header line is consumed, not stored as a word.
    write_file(tmp.file("h.txt"), "2 3\nalpha 1 0 0\nbeta 0 1 0\n");
    WordEmbeddingStore with_header = load_word_embeddings(tmp.file("h.txt"));
    CHECK(with_header.size() == 2);
    CHECK(!with_header.contains("2"));

    write_file(tmp.file("bad.txt"), "alpha 1 0 0\nbeta 0 1\n");
    CHECK_THROWS_WITH(load_word_embeddings(tmp.file("bad.txt")),
                      Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("merge keeps the first store's vectors on collision") {
    WordEmbeddingStore a, b;
    a.dim = b.dim = 2;
    a.vectors["x"] = {1, 0};
    b.vectors["x"] = {0, 1};
    b.vectors["y"] = {1, 1};
    std::size_t collisions = merge_word_embeddings(a, b);
    CHECK(collisions == 1);
    CHECK(a.vectors.at("x") == std::vector<double>{1, 0});
    CHECK(a.vectors.at("y") == std::vector<double>{1, 1});

    WordEmbeddingStore c;
    c.dim = 3;
    CHECK_THROWS_AS(merge_word_embeddings(a, c), DataError);
}

TEST_CASE("tokenize_name") {
    CHECK(tokenize_name("New_York") == std::vector<std::string>{"new", "york"});
    CHECK(tokenize_name("Jean-Luc Picard") ==
          std::vector<std::string>{"jean", "luc", "picard"});
    CHECK(tokenize_name("") == std::vector<std::string>{});
    CHECK(tokenize_name("a.b,c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("name_embedding averages in-vocabulary tokens") {
    WordEmbeddingStore store;
    store.dim = 2;
    store.vectors["alpha"] = {1, 0};
    store.vectors["beta"] = {0, 1};

    NameEmbedding single = name_embedding("alpha", store);
    CHECK(!single.oov);
    CHECK(single.vec == std::vector<double>{1, 0});

    NameEmbedding avg = name_embedding("alpha beta", store);
    CHECK(avg.vec == std::vector<double>{0.5, 0.5});

    // Unknown tokens are skipped from the denominator.
    NameEmbedding skip = name_embedding("alpha unknown", store);
    CHECK(skip.vec == std::vector<double>{1, 0});

    NameEmbedding oov = name_embedding("unknown tokens", store);
    CHECK(oov.oov);
    CHECK(oov.vec == std::vector<double>{0, 0});
}

TEST_CASE("semantic similarity matrix") {
    WordEmbeddingStore store;
    store.dim = 2;
    store.vectors["new"] = {1, 0};
    store.vectors["york"] = {0, 1};
    store.vectors["paris"] = {0.6, 0.8};

    Matrix same = semantic_similarity_matrix({"paris"}, {"paris"}, store);
    CHECK(same(0, 0) == Catch::Approx(1.0));

    Matrix oov = semantic_similarity_matrix({"zzz"}, {"paris"}, store);
    CHECK(oov(0, 0) == 0.0);

    // Averaging is order-invariant over tokens.
    Matrix perm = semantic_similarity_matrix({"new york"}, {"york new"}, store);
    CHECK(perm(0, 0) == Catch::Approx(1.0));

    Matrix mixed = semantic_similarity_matrix({"new", "york"}, {"paris"}, store);
    for (double v : mixed.data()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    CHECK(mixed(0, 0) == Catch::Approx(0.6));
    CHECK(mixed(1, 0) == Catch::Approx(0.8));
}
