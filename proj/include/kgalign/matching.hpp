#pragma once
// Collective alignment as a stable matching problem. Preference lists
// order the opposing side by descending similarity with ascending-index
// tie-breaks, which makes all preferences strict. Deferred acceptance
// produces the source-optimal stable matching; the row-argmax baseline
// and a brute-force enumeration oracle live alongside it.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace kgalign {

struct PreferenceLists {
    std::vector<std::vector<std::int32_t>> source_prefs; // per source: targets, best first
    std::vector<std::vector<std::int32_t>> target_prefs; // per target: sources, best first
};

constexpr std::int32_t kUnmatched = -1;

struct Matching {
    std::vector<std::int32_t> source_to_target; // kUnmatched where unassigned

    std::size_t matched_count() const {
        std::size_t n = 0;
        for (std::int32_t t : source_to_target)
            if (t != kUnmatched) ++n;
        return n;
    }

    bool operator==(const Matching&) const = default;
};

struct BlockingPair {
    std::int32_t source;
    std::int32_t target;

    bool operator==(const BlockingPair&) const = default;
};

namespace detail {

// Strict preference of a source u for target a over target b under the
// (similarity desc, index asc) order; b == kUnmatched loses to anything.
inline bool source_prefers(const Matrix& m, std::int32_t u, std::int32_t a,
                           std::int32_t b) {
    if (b == kUnmatched) return true;
    double va = m(u, a), vb = m(u, b);
    return va > vb || (va == vb && a < b);
}

inline bool target_prefers(const Matrix& m, std::int32_t v, std::int32_t a,
                           std::int32_t b) {
    if (b == kUnmatched) return true;
    double va = m(a, v), vb = m(b, v);
    return va > vb || (va == vb && a < b);
}

} // namespace detail

inline PreferenceLists preference_lists(const Matrix& m) {
    if (m.empty()) throw DataError("preference lists of an empty matrix");
    PreferenceLists prefs;
    prefs.source_prefs.resize(m.rows());
    prefs.target_prefs.resize(m.cols());
    for (std::size_t u = 0; u < m.rows(); ++u) {
        auto& list = prefs.source_prefs[u];
        list.resize(m.cols());
        std::iota(list.begin(), list.end(), 0);
        std::sort(list.begin(), list.end(), [&](std::int32_t a, std::int32_t b) {
            double va = m(u, a), vb = m(u, b);
            return va > vb || (va == vb && a < b);
        });
    }
    for (std::size_t v = 0; v < m.cols(); ++v) {
        auto& list = prefs.target_prefs[v];
        list.resize(m.rows());
        std::iota(list.begin(), list.end(), 0);
        std::sort(list.begin(), list.end(), [&](std::int32_t a, std::int32_t b) {
            double va = m(a, v), vb = m(b, v);
            return va > vb || (va == vb && a < b);
        });
    }
    return prefs;
}

// Proposer-driven rounds with provisional acceptance. Every unmatched
// source proposes once per round, in ascending index order, to the best
// target it has not yet tried; targets keep the proposer they rank
// highest and may trade up. Terminates with all sources matched when
// sources do not outnumber targets.
inline Matching deferred_acceptance(const PreferenceLists& prefs,
                                    std::ostream* trace = nullptr) {
    const std::size_t n_src = prefs.source_prefs.size();
    const std::size_t n_tgt = prefs.target_prefs.size();
    if (n_src == 0) throw DataError("deferred acceptance with no sources");
    if (n_src > n_tgt)
        throw DataError("deferred acceptance requires |sources| <= |targets|");

    // rank_of[v][u]: position of source u in target v's list.
    std::vector<std::int32_t> rank_of(n_tgt * n_src);
    for (std::size_t v = 0; v < n_tgt; ++v)
        for (std::size_t r = 0; r < n_src; ++r)
            rank_of[v * n_src + prefs.target_prefs[v][r]] = static_cast<std::int32_t>(r);

    Matching matching;
    matching.source_to_target.assign(n_src, kUnmatched);
    std::vector<std::int32_t> target_match(n_tgt, kUnmatched);
    std::vector<std::size_t> next_choice(n_src, 0);

    const std::size_t proposal_bound = n_src * n_tgt;
    std::size_t proposals = 0;
    std::size_t round = 0;
    while (true) {
        std::vector<std::int32_t> proposers;
        for (std::size_t u = 0; u < n_src; ++u)
            if (matching.source_to_target[u] == kUnmatched)
                proposers.push_back(static_cast<std::int32_t>(u));
        if (proposers.empty()) break;
        ++round;

        for (std::int32_t u : proposers) {
            if (next_choice[u] >= n_tgt)
                throw DataError("source exhausted its preference list");
            std::int32_t v = prefs.source_prefs[u][next_choice[u]++];
            if (++proposals > proposal_bound)
                throw DataError("proposal bound exceeded");

            std::int32_t incumbent = target_match[v];
            if (incumbent == kUnmatched) {
                target_match[v] = u;
                matching.source_to_target[u] = v;
                if (trace)
                    *trace << "round " << round << ": source " << u << " -> target "
                           << v << ": accepted\n";
            } else if (rank_of[static_cast<std::size_t>(v) * n_src + u] <
                       rank_of[static_cast<std::size_t>(v) * n_src + incumbent]) {
                matching.source_to_target[incumbent] = kUnmatched;
                target_match[v] = u;
                matching.source_to_target[u] = v;
                if (trace)
                    *trace << "round " << round << ": source " << u << " -> target "
                           << v << ": accepted, source " << incumbent << " released\n";
            } else {
                if (trace)
                    *trace << "round " << round << ": source " << u << " -> target "
                           << v << ": rejected\n";
            }
        }
    }
    return matching;
}

// Row argmax per source with ascending-index tie-break; targets may be
// assigned to several sources.
inline std::vector<std::int32_t> independent_match(const Matrix& m) {
    if (m.empty()) throw DataError("independent match of an empty matrix");
    std::vector<std::int32_t> out(m.rows());
    for (std::size_t u = 0; u < m.rows(); ++u) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < m.cols(); ++j)
            if (m(u, j) > m(u, best)) best = j;
        out[u] = static_cast<std::int32_t>(best);
    }
    return out;
}

// All (u, v) that mutually prefer each other over their assigned
// partners; an unmatched side prefers anything. Preference comparisons
// use the same tie-break order as the matcher.
inline std::vector<BlockingPair> blocking_pairs(const Matrix& m,
                                                const Matching& matching) {
    if (matching.source_to_target.size() != m.rows())
        throw DataError("matching size does not match matrix rows");
    std::vector<std::int32_t> target_match(m.cols(), kUnmatched);
    for (std::size_t u = 0; u < m.rows(); ++u) {
        std::int32_t v = matching.source_to_target[u];
        if (v == kUnmatched) continue;
        if (v < 0 || static_cast<std::size_t>(v) >= m.cols())
            throw DataError("matching target out of range");
        if (target_match[v] != kUnmatched)
            throw DataError("matching is not injective");
        target_match[v] = static_cast<std::int32_t>(u);
    }

    std::vector<BlockingPair> out;
    for (std::size_t u = 0; u < m.rows(); ++u) {
        for (std::size_t v = 0; v < m.cols(); ++v) {
            std::int32_t iu = static_cast<std::int32_t>(u);
            std::int32_t iv = static_cast<std::int32_t>(v);
            if (matching.source_to_target[u] == iv) continue;
            if (!detail::source_prefers(m, iu, iv, matching.source_to_target[u]))
                continue;
            if (!detail::target_prefers(m, iv, iu, target_match[v])) continue;
            out.push_back({iu, iv});
        }
    }
    return out;
}

// Brute-force oracle: all permutation matchings with zero blocking pairs.
// Square instances only, n <= 8.
inline std::vector<Matching> enumerate_stable_matchings(const Matrix& m) {
    if (m.rows() != m.cols())
        throw DataError("stable-matching enumeration requires a square matrix");
    if (m.rows() > 8)
        throw DataError("stable-matching enumeration is capped at n = 8");
    std::vector<std::int32_t> perm(m.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Matching> out;
    do {
        Matching candidate{perm};
        if (blocking_pairs(m, candidate).empty()) out.push_back(candidate);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

} // namespace kgalign
