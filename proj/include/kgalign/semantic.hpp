#pragma once
// Entity-name semantics: word-vector store, name tokenization, averaged
// name embeddings and the semantic similarity matrix. Names whose tokens
// are all out of vocabulary embed as zero vectors and score 0 against
// everything.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace kgalign {

struct WordEmbeddingStore {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    bool contains(const std::string& w) const { return vectors.count(w) > 0; }
    std::size_t size() const { return vectors.size(); }
};

// Text format: optional "count dim" header line, then `word v1 ... v_dim`
// per line, space-separated. Dim is inferred from the first vector line.
// Duplicate words keep their first vector.
inline WordEmbeddingStore load_word_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open word-vector file " + path);

    WordEmbeddingStore store;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream iss(line);
        if (first_content_line) {
            first_content_line = false;
            // A header line is exactly two integer tokens.
            std::istringstream probe(line);
            long long count, dim;
            std::string rest;
            if ((probe >> count >> dim) && !(probe >> rest)) continue;
        }
        std::string word;
        iss >> word;
        std::vector<double> vec;
        double v;
        while (iss >> v) vec.push_back(v);
        if (store.dim == 0) {
            if (vec.empty())
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": vector line with no values");
            store.dim = vec.size();
        } else if (vec.size() != store.dim) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(store.dim) + " values, got " +
                            std::to_string(vec.size()));
        }
        store.vectors.emplace(word, std::move(vec));
    }
    return store;
}

// Text dump in the same format load_word_embeddings reads, words sorted
// so the output is byte-stable.
inline void write_word_embeddings(const WordEmbeddingStore& store,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    std::vector<std::string> words;
    words.reserve(store.size());
    for (const auto& [word, vec] : store.vectors) words.push_back(word);
    std::sort(words.begin(), words.end());
    out << words.size() << ' ' << store.dim << '\n';
    char buf[64];
    for (const std::string& word : words) {
        out << word;
        for (double v : store.vectors.at(word)) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

// Concatenate another store into this one; collisions keep the existing
// vector. Returns the number of collisions so callers can warn.
inline std::size_t merge_word_embeddings(WordEmbeddingStore& store,
                                         const WordEmbeddingStore& other) {
    if (store.dim == 0) store.dim = other.dim;
    if (other.dim != 0 && other.dim != store.dim)
        throw DataError("cannot merge word-vector stores of dims " +
                        std::to_string(store.dim) + " and " +
                        std::to_string(other.dim));
    std::size_t collisions = 0;
    for (const auto& [word, vec] : other.vectors) {
        if (!store.vectors.emplace(word, vec).second) ++collisions;
    }
    return collisions;
}

// Lowercase, split on whitespace, '_', '-' and ASCII punctuation; empty
// tokens dropped. Bytes outside ASCII pass through unchanged.
inline std::vector<std::string> tokenize_name(const std::string& name) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : name) {
        bool is_sep = c < 0x80 && (std::isspace(c) || c == '_' || c == '-' ||
                                   std::ispunct(c));
        if (is_sep) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                       : static_cast<char>(c));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

struct NameEmbedding {
    std::vector<double> vec;
    bool oov = false;
};

// Average of the in-vocabulary token vectors; zero vector with oov=true
// when no token is known.
inline NameEmbedding name_embedding(const std::string& name,
                                    const WordEmbeddingStore& store) {
    NameEmbedding out;
    out.vec.assign(store.dim, 0.0);
    std::size_t in_vocab = 0;
    for (const std::string& token : tokenize_name(name)) {
        auto it = store.vectors.find(token);
        if (it == store.vectors.end()) continue;
        ++in_vocab;
        for (std::size_t d = 0; d < store.dim; ++d) out.vec[d] += it->second[d];
    }
    if (in_vocab == 0) {
        out.oov = true;
        return out;
    }
    for (double& v : out.vec) v /= static_cast<double>(in_vocab);
    return out;
}

// Rows = entity count, plus per-row flags for all-OOV names.
struct NameEmbeddingMatrix {
    Matrix values;
    std::vector<bool> oov_flags;
};

inline NameEmbeddingMatrix name_embedding_matrix(
    const std::vector<std::string>& names, const WordEmbeddingStore& store) {
    NameEmbeddingMatrix out;
    out.values = Matrix(names.size(), store.dim);
    out.oov_flags.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        NameEmbedding e = name_embedding(names[i], store);
        out.oov_flags[i] = e.oov;
        for (std::size_t d = 0; d < store.dim; ++d) out.values(i, d) = e.vec[d];
    }
    return out;
}

// Cosine over name embeddings; any pair involving an OOV name scores 0.
inline Matrix semantic_similarity_matrix(const std::vector<std::string>& names1,
                                         const std::vector<std::string>& names2,
                                         const WordEmbeddingStore& store) {
    NameEmbeddingMatrix a = name_embedding_matrix(names1, store);
    NameEmbeddingMatrix b = name_embedding_matrix(names2, store);

    std::vector<double> norm_a(names1.size()), norm_b(names2.size());
    auto row_norm = [&](const Matrix& m, std::size_t i) {
        double s = 0.0;
        for (std::size_t d = 0; d < m.cols(); ++d) s += m(i, d) * m(i, d);
        return std::sqrt(s);
    };
    for (std::size_t i = 0; i < names1.size(); ++i) norm_a[i] = row_norm(a.values, i);
    for (std::size_t j = 0; j < names2.size(); ++j) norm_b[j] = row_norm(b.values, j);

    Matrix m(names1.size(), names2.size());
    for (std::size_t i = 0; i < names1.size(); ++i) {
        for (std::size_t j = 0; j < names2.size(); ++j) {
            if (a.oov_flags[i] || b.oov_flags[j] || norm_a[i] == 0.0 ||
                norm_b[j] == 0.0) {
                m(i, j) = 0.0;
                continue;
            }
            double dot = 0.0;
            for (std::size_t d = 0; d < store.dim; ++d)
                dot += a.values(i, d) * b.values(j, d);
            double cos = dot / (norm_a[i] * norm_b[j]);
            m(i, j) = std::clamp(cos, -1.0, 1.0);
        }
    }
    return m;
}

} // namespace kgalign
