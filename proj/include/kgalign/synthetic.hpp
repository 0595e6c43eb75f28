#pragma once
// Synthetic benchmark pairs: a random source KG and an isomorphic copy
// with renamed entities, a fraction of triples dropped and names
// perturbed by random character edits. Gold alignment is the bijection
// between the copies. A deterministic word-vector store over the names
// makes the semantic feature runnable without external files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "kg.hpp"
#include "rng.hpp"
#include "semantic.hpp"

namespace kgalign {

struct SyntheticBenchmark {
    KnowledgeGraph kg1;
    KnowledgeGraph kg2;
    AlignmentSet gold; // bijection between the two entity sets
    std::size_t name_noise = 0;
    double structure_noise = 0.0;
};

namespace detail {

inline std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len) {
    std::size_t len = min_len + rng.uniform_int(max_len - min_len + 1);
    std::string w;
    w.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        w.push_back(static_cast<char>('a' + rng.uniform_int(26)));
    return w;
}

inline std::string underscored(const std::string& name) {
    std::string s = name;
    for (char& c : s)
        if (c == ' ') c = '_';
    return s;
}

// One random character edit: substitute, insert or delete. Characters
// come from a-z; deletion is skipped on very short names.
inline std::string apply_edit(const std::string& name, Rng& rng) {
    std::string s = name;
    int op = static_cast<int>(rng.uniform_int(3));
    if (op == 2 && s.size() <= 2) op = static_cast<int>(rng.uniform_int(2));
    if (op == 0) {
        std::size_t pos = rng.uniform_int(s.size());
        char c;
        do {
            c = static_cast<char>('a' + rng.uniform_int(26));
        } while (c == s[pos]);
        s[pos] = c;
    } else if (op == 1) {
        std::size_t pos = rng.uniform_int(s.size() + 1);
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos),
                 static_cast<char>('a' + rng.uniform_int(26)));
    } else {
        std::size_t pos = rng.uniform_int(s.size());
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return s;
}

} // namespace detail

inline SyntheticBenchmark generate_synthetic_pair(std::size_t n, double triple_density,
                                                  std::size_t name_noise,
                                                  double structure_noise,
                                                  std::uint64_t rng_seed) {
    if (n < 4) throw ConfigError("synthetic benchmark requires n >= 4");
    if (!(triple_density > 0.0)) throw ConfigError("triple_density must be positive");
    if (!(structure_noise >= 0.0 && structure_noise < 1.0))
        throw ConfigError("structure_noise must lie in [0,1)");

    Rng rng(derive_seed(rng_seed, 0));

    // Two-word names drawn from a shared vocabulary; distinct entities
    // overlap in tokens and near-miss spellings, but every full name
    // string is unique.
    const std::size_t vocab_size = std::max<std::size_t>(12, n / 8);
    std::vector<std::string> vocab;
    std::unordered_set<std::string> vocab_used;
    while (vocab.size() < vocab_size) {
        std::string w = detail::random_word(rng, 3, 6);
        if (vocab_used.insert(w).second) vocab.push_back(w);
    }
    std::vector<std::string> names(n);
    std::unordered_set<std::string> used;
    for (std::size_t i = 0; i < n; ++i) {
        for (int tries = 0;; ++tries) {
            if (tries > 1000) throw DataError("could not generate unique names");
            std::string name = vocab[rng.uniform_int(vocab_size)] + " " +
                               vocab[rng.uniform_int(vocab_size)];
            if (used.insert(name).second) {
                names[i] = name;
                break;
            }
        }
    }

    SyntheticBenchmark bench;
    bench.name_noise = name_noise;
    bench.structure_noise = structure_noise;

    const std::size_t n_rel = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))));
    for (std::size_t i = 0; i < n; ++i)
        bench.kg1.entities.push_back("http://kg1.example.org/resource/" +
                                     detail::underscored(names[i]));
    for (std::size_t j = 0; j < n_rel; ++j)
        bench.kg1.relations.push_back("http://kg1.example.org/property/p" +
                                      std::to_string(j));

    const std::size_t n_triples =
        static_cast<std::size_t>(std::llround(triple_density * static_cast<double>(n)));
    std::vector<std::size_t> mentions(n, 0);
    for (std::size_t t = 0; t < n_triples; ++t) {
        std::int32_t h = static_cast<std::int32_t>(rng.uniform_int(n));
        std::int32_t tail;
        do {
            tail = static_cast<std::int32_t>(rng.uniform_int(n));
        } while (tail == h);
        std::int32_t r = static_cast<std::int32_t>(rng.uniform_int(n_rel));
        bench.kg1.triples.push_back({h, r, tail});
        ++mentions[static_cast<std::size_t>(h)];
        ++mentions[static_cast<std::size_t>(tail)];
    }
    // Every entity must appear in at least one triple, or it would vanish
    // when the KG round-trips through a triple file.
    for (std::size_t i = 0; i < n; ++i) {
        if (mentions[i] > 0) continue;
        std::int32_t partner;
        do {
            partner = static_cast<std::int32_t>(rng.uniform_int(n));
        } while (partner == static_cast<std::int32_t>(i));
        std::int32_t r = static_cast<std::int32_t>(rng.uniform_int(n_rel));
        bench.kg1.triples.push_back({static_cast<std::int32_t>(i), r, partner});
        ++mentions[i];
        ++mentions[static_cast<std::size_t>(partner)];
    }

    // Perturbed, still-unique names for kg2.
    std::vector<std::string> names2(n);
    std::unordered_set<std::string> used2;
    for (std::size_t i = 0; i < n; ++i) {
        for (int tries = 0;; ++tries) {
            if (tries > 1000) throw DataError("could not generate unique kg2 names");
            std::string name = names[i];
            for (std::size_t e = 0; e < name_noise; ++e) name = detail::apply_edit(name, rng);
            if (used2.insert(name).second) {
                names2[i] = name;
                break;
            }
        }
    }

    // kg2 lists its entities in a shuffled order.
    std::vector<std::int32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::int32_t>(i);
    rng.shuffle(order);
    std::vector<std::int32_t> position(n); // logical entity -> kg2 index
    for (std::size_t i = 0; i < n; ++i) position[order[i]] = static_cast<std::int32_t>(i);

    for (std::size_t i = 0; i < n; ++i)
        bench.kg2.entities.push_back("http://kg2.example.org/resource/" +
                                     detail::underscored(names2[order[i]]));
    for (std::size_t j = 0; j < n_rel; ++j)
        bench.kg2.relations.push_back("http://kg2.example.org/property/p" +
                                      std::to_string(j));

    // Drop a fraction of kg2's triples, never isolating an entity.
    std::vector<std::size_t> triple_order(bench.kg1.triples.size());
    for (std::size_t t = 0; t < triple_order.size(); ++t) triple_order[t] = t;
    rng.shuffle(triple_order);
    const std::size_t drop_target = static_cast<std::size_t>(std::llround(
        structure_noise * static_cast<double>(bench.kg1.triples.size())));
    std::vector<std::size_t> mentions2 = mentions;
    std::vector<bool> dropped(bench.kg1.triples.size(), false);
    std::size_t drops = 0;
    for (std::size_t idx : triple_order) {
        if (drops == drop_target) break;
        const Triple& t = bench.kg1.triples[idx];
        auto h = static_cast<std::size_t>(t.head);
        auto tl = static_cast<std::size_t>(t.tail);
        if (mentions2[h] < 2 || mentions2[tl] < 2) continue;
        dropped[idx] = true;
        --mentions2[h];
        --mentions2[tl];
        ++drops;
    }
    for (std::size_t idx : triple_order) {
        if (dropped[idx]) continue;
        const Triple& src = bench.kg1.triples[idx];
        bench.kg2.triples.push_back(
            {position[src.head], src.relation, position[src.tail]});
    }

    for (std::size_t i = 0; i < n; ++i)
        bench.gold.pairs.emplace_back(bench.kg1.entities[i],
                                      bench.kg2.entities[position[i]]);
    return bench;
}

// Deterministic unit vector per token over both KGs' names, keyed only by
// (rng_seed, token), so shared tokens share vectors.
inline WordEmbeddingStore synthetic_word_embeddings(const SyntheticBenchmark& bench,
                                                    std::size_t dim,
                                                    std::uint64_t rng_seed) {
    if (dim < 1) throw ConfigError("word-vector dim must be >= 1");
    WordEmbeddingStore store;
    store.dim = dim;
    auto add_tokens = [&](const KnowledgeGraph& kg) {
        for (const std::string& id : kg.entities) {
            for (const std::string& token : tokenize_name(entity_name(id))) {
                if (store.contains(token)) continue;
                Rng rng(derive_seed(rng_seed ^ fnv1a(token), 7));
                std::vector<double> v(dim);
                double norm = 0.0;
                for (double& x : v) {
                    x = rng.normal();
                    norm += x * x;
                }
                norm = std::sqrt(norm);
                if (norm == 0.0) norm = 1.0;
                for (double& x : v) x /= norm;
                store.vectors.emplace(token, std::move(v));
            }
        }
    };
    add_tokens(bench.kg1);
    add_tokens(bench.kg2);
    return store;
}

} // namespace kgalign
