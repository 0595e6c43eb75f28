#pragma once
// Scoring: accuracy over matchings, Hits@k and MRR over similarity
// rankings. Accuracy is defined for matchings (unmatched sources count
// as wrong); the ranking metrics are defined for matrices, never
// fabricated from a matching.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gcn.hpp"
#include "matching.hpp"
#include "matrix.hpp"

namespace kgalign {

struct EvalReport {
    double accuracy = 0.0;
    std::map<int, double> hits_at;
    double mrr = 0.0;
    std::size_t matched = 0;
    std::size_t total = 0;
};

// Fraction of gold pairs (u, g) with match(u) == g.
inline double accuracy(const Matching& matching,
                       const std::vector<IndexPair>& gold) {
    if (gold.empty()) throw DataError("accuracy requires a nonempty gold standard");
    std::size_t correct = 0;
    for (auto [u, g] : gold) {
        if (static_cast<std::size_t>(u) >= matching.source_to_target.size()) continue;
        if (matching.source_to_target[u] == g) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

struct RankingMetrics {
    std::map<int, double> hits_at;
    double mrr = 0.0;
};

// Per gold pair, the gold target's 1-based rank in the row ordered by
// descending similarity with ascending-index tie-break.
inline RankingMetrics hits_and_mrr(const Matrix& m,
                                   const std::vector<IndexPair>& gold,
                                   const std::vector<int>& ks) {
    if (gold.empty()) throw DataError("ranking metrics require a nonempty gold standard");
    RankingMetrics out;
    for (int k : ks) out.hits_at[k] = 0.0;
    for (auto [u, g] : gold) {
        if (static_cast<std::size_t>(u) >= m.rows() ||
            static_cast<std::size_t>(g) >= m.cols())
            throw DataError("gold pair outside matrix bounds");
        double gold_value = m(u, g);
        std::size_t rank = 1;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (static_cast<std::int32_t>(j) == g) continue;
            double v = m(u, j);
            if (v > gold_value || (v == gold_value && static_cast<std::int32_t>(j) < g))
                ++rank;
        }
        for (int k : ks)
            if (rank <= static_cast<std::size_t>(k)) out.hits_at[k] += 1.0;
        out.mrr += 1.0 / static_cast<double>(rank);
    }
    const double n = static_cast<double>(gold.size());
    for (auto& [k, v] : out.hits_at) v /= n;
    out.mrr /= n;
    return out;
}

inline void write_eval_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "accuracy = " << fmt(report.accuracy) << '\n';
    for (const auto& [k, v] : report.hits_at)
        out << "hits@" << k << " = " << fmt(v) << '\n';
    out << "mrr = " << fmt(report.mrr) << '\n';
    out << "matched = " << report.matched << '\n';
    out << "total = " << report.total << '\n';
}

} // namespace kgalign
