#pragma once
// Levenshtein distance, the modified distance with substitution cost 2,
// the Levenshtein ratio in [0,1], and the string similarity matrix.
// Strings are compared as sequences of Unicode scalar values.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace kgalign {

struct StringSimConfig {
    bool normalize_case = true;
};

// UTF-8 decode to scalar values. Invalid bytes decode as single scalars
// (latin-1 fallback) so the function stays total on arbitrary input.
inline std::vector<char32_t> utf8_decode(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + extra >= s.size()) {
            out.push_back(c);
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!valid) {
            out.push_back(c);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

namespace detail {

inline char32_t fold_case(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    return c;
}

// Two-row DP over scalar sequences. mismatch_cost is 1 for the plain
// distance and 2 for the starred variant; matches always cost 0.
inline std::uint64_t lev_generic(const std::vector<char32_t>& a,
                                 const std::vector<char32_t>& b,
                                 std::uint64_t mismatch_cost) {
    const std::vector<char32_t>& longer = a.size() >= b.size() ? a : b;
    const std::vector<char32_t>& shorter = a.size() >= b.size() ? b : a;
    const std::size_t m = shorter.size();

    std::vector<std::uint64_t> prev(m + 1), curr(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= longer.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::uint64_t del = prev[j] + 1;
            std::uint64_t ins = curr[j - 1] + 1;
            std::uint64_t sub =
                prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : mismatch_cost);
            curr[j] = std::min({del, ins, sub});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

} // namespace detail

inline std::uint64_t levenshtein(const std::string& a, const std::string& b) {
    return detail::lev_generic(utf8_decode(a), utf8_decode(b), 1);
}

inline std::uint64_t levenshtein_sub2(const std::string& a, const std::string& b) {
    return detail::lev_generic(utf8_decode(a), utf8_decode(b), 2);
}

// r = (|a| + |b| - lev*) / (|a| + |b|); 1.0 when both strings are empty.
inline double levenshtein_ratio(const std::string& a, const std::string& b) {
    auto da = utf8_decode(a);
    auto db = utf8_decode(b);
    double total = static_cast<double>(da.size() + db.size());
    if (total == 0.0) return 1.0;
    auto dist = detail::lev_generic(da, db, 2);
    return (total - static_cast<double>(dist)) / total;
}

inline Matrix string_similarity_matrix(const std::vector<std::string>& names1,
                                       const std::vector<std::string>& names2,
                                       const StringSimConfig& config = {}) {
    std::vector<std::vector<char32_t>> rows, cols;
    rows.reserve(names1.size());
    cols.reserve(names2.size());
    auto decode = [&](const std::string& s) {
        auto d = utf8_decode(s);
        if (config.normalize_case)
            for (char32_t& c : d) c = detail::fold_case(c);
        return d;
    };
    for (const auto& s : names1) rows.push_back(decode(s));
    for (const auto& s : names2) cols.push_back(decode(s));

    Matrix m(names1.size(), names2.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double total = static_cast<double>(rows[i].size() + cols[j].size());
            if (total == 0.0) {
                m(i, j) = 1.0;
                continue;
            }
            auto dist = detail::lev_generic(rows[i], cols[j], 2);
            m(i, j) = (total - static_cast<double>(dist)) / total;
        }
    }
    return m;
}

} // namespace kgalign
