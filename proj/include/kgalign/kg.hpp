#pragma once
// Knowledge-graph ingestion: triple/link file parsing, entity display
// names, the symmetric-normalized adjacency operator, and the seed/test
// split of gold links.
//
// File formats (UTF-8, one record per line, tab-separated):
//   triples:  head \t relation \t tail
//   links:    source_entity \t target_entity

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace kgalign {

struct Triple {
    std::int32_t head;
    std::int32_t relation;
    std::int32_t tail;

    bool operator==(const Triple&) const = default;
};

// Directed graph of (head, relation, tail) triples. Vocabularies are
// indexed in first-appearance order; the entity list has no duplicates.
struct KnowledgeGraph {
    std::vector<std::string> entities;
    std::vector<std::string> relations;
    std::vector<Triple> triples;

    std::size_t num_entities() const { return entities.size(); }
};

// Gold or seed entity pairs; one-to-one on both sides.
struct AlignmentSet {
    std::vector<std::pair<std::string, std::string>> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// Sparse symmetric D^{-1/2}(A+I)D^{-1/2} operator. Entries are sorted by
// (row, col) so that products accumulate in a fixed order.
struct NormalizedAdjacency {
    std::size_t dimension = 0;
    struct Entry {
        std::int32_t row;
        std::int32_t col;
        double weight;
    };
    std::vector<Entry> entries;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace detail

inline KnowledgeGraph parse_triples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open triple file " + path);

    KnowledgeGraph kg;
    std::unordered_map<std::string, std::int32_t> entity_idx;
    std::unordered_map<std::string, std::int32_t> relation_idx;
    auto entity_id = [&](const std::string& e) {
        auto it = entity_idx.find(e);
        if (it != entity_idx.end()) return it->second;
        std::int32_t idx = static_cast<std::int32_t>(kg.entities.size());
        kg.entities.push_back(e);
        entity_idx.emplace(e, idx);
        return idx;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 3)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 3 tab-separated fields, got " +
                            std::to_string(fields.size()));
        std::int32_t h = entity_id(fields[0]);
        std::int32_t r;
        auto rit = relation_idx.find(fields[1]);
        if (rit != relation_idx.end()) {
            r = rit->second;
        } else {
            r = static_cast<std::int32_t>(kg.relations.size());
            kg.relations.push_back(fields[1]);
            relation_idx.emplace(fields[1], r);
        }
        std::int32_t t = entity_id(fields[2]);
        kg.triples.push_back({h, r, t});
    }
    if (kg.triples.empty()) throw DataError(path + ": empty triple file");
    return kg;
}

inline void write_triples(const KnowledgeGraph& kg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (const Triple& t : kg.triples) {
        out << kg.entities[t.head] << '\t' << kg.relations[t.relation] << '\t'
            << kg.entities[t.tail] << '\n';
    }
}

inline AlignmentSet parse_links(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open link file " + path);

    AlignmentSet links;
    std::unordered_set<std::string> seen_src, seen_tgt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 2)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 2 tab-separated fields, got " +
                            std::to_string(fields.size()));
        if (!seen_src.insert(fields[0]).second)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": duplicate source entity " + fields[0]);
        if (!seen_tgt.insert(fields[1]).second)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": duplicate target entity " + fields[1]);
        links.pairs.emplace_back(fields[0], fields[1]);
    }
    return links;
}

inline void write_links(const AlignmentSet& links, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (const auto& [src, tgt] : links.pairs) out << src << '\t' << tgt << '\n';
}

// Deterministic shuffle, then the first round(fraction*n) pairs become the
// seed set and the rest the test set.
inline std::pair<AlignmentSet, AlignmentSet> split_alignment(
    const AlignmentSet& links, double seed_fraction, std::uint64_t rng_seed) {
    if (links.empty()) throw DataError("cannot split an empty alignment set");
    if (!(seed_fraction > 0.0 && seed_fraction < 1.0))
        throw ConfigError("seed_fraction must lie in (0,1), got " +
                          std::to_string(seed_fraction));

    std::vector<std::size_t> order(links.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(rng_seed);
    rng.shuffle(order);

    auto seed_count = static_cast<std::size_t>(
        std::llround(seed_fraction * static_cast<double>(links.size())));
    AlignmentSet seed, test;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& pair = links.pairs[order[i]];
        if (i < seed_count)
            seed.pairs.push_back(pair);
        else
            test.pairs.push_back(pair);
    }
    return {std::move(seed), std::move(test)};
}

namespace detail {

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline std::string percent_decode(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex_value(s[i + 1]);
            int lo = hex_value(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

} // namespace detail

// Display name of an entity id: the local name of a URI (after the last
// '/' or '#'), percent-decoded, underscores as spaces. Non-URI ids pass
// through the same decode/underscore treatment. Total function.
inline std::string entity_name(const std::string& entity_id) {
    std::string local = entity_id;
    if (entity_id.find("://") != std::string::npos) {
        std::size_t slash = entity_id.find_last_of('/');
        std::size_t hash = entity_id.find_last_of('#');
        std::size_t cut = std::string::npos;
        if (slash != std::string::npos) cut = slash;
        if (hash != std::string::npos && (cut == std::string::npos || hash > cut))
            cut = hash;
        if (cut != std::string::npos) local = entity_id.substr(cut + 1);
    }
    local = detail::percent_decode(local);
    std::replace(local.begin(), local.end(), '_', ' ');
    return local;
}

// Binary undirected adjacency over the triples, self-loops added, then
// symmetric degree normalization D^{-1/2}(A+I)D^{-1/2}.
inline NormalizedAdjacency build_normalized_adjacency(const KnowledgeGraph& kg) {
    const std::size_t n = kg.num_entities();
    if (n == 0) throw DataError("cannot build adjacency of an empty graph");

    std::vector<std::vector<std::int32_t>> neighbors(n);
    auto connect = [&](std::int32_t a, std::int32_t b) {
        auto& na = neighbors[a];
        if (std::find(na.begin(), na.end(), b) == na.end()) na.push_back(b);
    };
    for (std::size_t i = 0; i < n; ++i)
        connect(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i));
    for (const Triple& t : kg.triples) {
        if (t.head == t.tail) continue;
        connect(t.head, t.tail);
        connect(t.tail, t.head);
    }

    std::vector<double> inv_sqrt_degree(n);
    for (std::size_t i = 0; i < n; ++i)
        inv_sqrt_degree[i] = 1.0 / std::sqrt(static_cast<double>(neighbors[i].size()));

    NormalizedAdjacency adj;
    adj.dimension = n;
    for (std::size_t i = 0; i < n; ++i) {
        auto& ni = neighbors[i];
        std::sort(ni.begin(), ni.end());
        for (std::int32_t j : ni) {
            adj.entries.push_back({static_cast<std::int32_t>(i), j,
                                   inv_sqrt_degree[i] * inv_sqrt_degree[j]});
        }
    }
    return adj;
}

} // namespace kgalign
