#pragma once
// Adaptive feature fusion. Per feature matrix, cells that are the strict
// maximum of both their row and their column become confident
// correspondences. Candidates are filtered (source conflicts across
// features; pairs shared by every feature), the survivors are weighted
// 1/n with a theta damping rule for near-saturated scores, and feature
// weights are the normalized per-feature sums. Fusion itself is a
// weighted linear combination; the schedule fuses semantic+string into a
// textual matrix first, then textual+structural.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace kgalign {

struct ConfidentCorrespondence {
    std::int32_t source;
    std::int32_t target;
    std::size_t feature;
    double score;

    bool operator==(const ConfidentCorrespondence&) const = default;
};

struct FusionConfig {
    double theta1 = 0.98;
    double theta2 = 0.1;
};

struct FusionWeights {
    std::vector<double> weights; // nonnegative, sums to 1
};

// Cells that are strictly greater than every other entry in their row and
// their column. At most one candidate per row and per column.
inline std::vector<ConfidentCorrespondence> confident_correspondences(
    const Matrix& m, std::size_t feature_id = 0) {
    if (m.empty()) throw DataError("confident correspondences of an empty matrix");
    const std::size_t rows = m.rows(), cols = m.cols();

    std::vector<double> row_max(rows), col_max(cols);
    std::vector<std::size_t> row_count(rows, 0), col_count(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        double best = m(i, 0);
        for (std::size_t j = 1; j < cols; ++j)
            if (m(i, j) > best) best = m(i, j);
        row_max[i] = best;
    }
    for (std::size_t j = 0; j < cols; ++j) {
        double best = m(0, j);
        for (std::size_t i = 1; i < rows; ++i)
            if (m(i, j) > best) best = m(i, j);
        col_max[j] = best;
    }
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (m(i, j) == row_max[i]) ++row_count[i];
            if (m(i, j) == col_max[j]) ++col_count[j];
        }

    std::vector<ConfidentCorrespondence> out;
    for (std::size_t i = 0; i < rows; ++i) {
        if (row_count[i] != 1) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            if (m(i, j) == row_max[i] && m(i, j) == col_max[j] && col_count[j] == 1) {
                out.push_back({static_cast<std::int32_t>(i),
                               static_cast<std::int32_t>(j), feature_id, m(i, j)});
            }
        }
    }
    return out;
}

// Filtering rules: (1) a source entity proposed with different targets by
// different features loses all of its candidates everywhere; (2) a pair
// proposed by all k features is dropped everywhere (vacuous for k = 1).
// Target-side conflicts are only counted, not filtered.
inline std::vector<std::vector<ConfidentCorrespondence>> filter_candidates(
    const std::vector<std::vector<ConfidentCorrespondence>>& per_feature,
    std::size_t* target_conflicts = nullptr) {
    const std::size_t k = per_feature.size();

    std::map<std::int32_t, std::set<std::int32_t>> targets_of_source;
    std::map<std::int32_t, std::set<std::int32_t>> sources_of_target;
    std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> pair_count;
    for (const auto& list : per_feature) {
        for (const auto& c : list) {
            targets_of_source[c.source].insert(c.target);
            sources_of_target[c.target].insert(c.source);
            ++pair_count[{c.source, c.target}];
        }
    }

    if (target_conflicts) {
        *target_conflicts = 0;
        for (const auto& [tgt, sources] : sources_of_target)
            if (sources.size() > 1) ++*target_conflicts;
    }

    std::vector<std::vector<ConfidentCorrespondence>> retained(k);
    for (std::size_t f = 0; f < k; ++f) {
        for (const auto& c : per_feature[f]) {
            if (targets_of_source[c.source].size() > 1) continue;
            if (k >= 2 && pair_count[{c.source, c.target}] == k) continue;
            retained[f].push_back(c);
        }
    }
    return retained;
}

// A pair retained by n features contributes 1/n to each of them, except
// that a contribution whose score exceeds theta1 is damped to theta2.
inline std::vector<std::vector<double>> correspondence_weights(
    const std::vector<std::vector<ConfidentCorrespondence>>& retained,
    const FusionConfig& config, std::size_t* damped_contributions = nullptr) {
    if (!(config.theta1 > 0.0 && config.theta1 <= 1.0))
        throw ConfigError("theta1 must lie in (0,1]");
    if (!(config.theta2 > 0.0 && config.theta2 <= 1.0))
        throw ConfigError("theta2 must lie in (0,1]");

    std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> appearances;
    for (const auto& list : retained)
        for (const auto& c : list) ++appearances[{c.source, c.target}];

    if (damped_contributions) *damped_contributions = 0;
    std::vector<std::vector<double>> contributions(retained.size());
    for (std::size_t f = 0; f < retained.size(); ++f) {
        contributions[f].reserve(retained[f].size());
        for (const auto& c : retained[f]) {
            double w;
            if (c.score > config.theta1) {
                w = config.theta2;
                if (damped_contributions) ++*damped_contributions;
            } else {
                w = 1.0 / static_cast<double>(appearances[{c.source, c.target}]);
            }
            contributions[f].push_back(w);
        }
    }
    return contributions;
}

// Normalized per-feature sums of correspondence weights; equal weights
// when nothing was retained anywhere.
inline FusionWeights feature_weights(
    const std::vector<std::vector<double>>& contributions) {
    FusionWeights fw;
    fw.weights.resize(contributions.size(), 0.0);
    double total = 0.0;
    for (std::size_t f = 0; f < contributions.size(); ++f) {
        for (double w : contributions[f]) fw.weights[f] += w;
        total += fw.weights[f];
    }
    if (total == 0.0) {
        double equal = 1.0 / static_cast<double>(contributions.size());
        for (double& w : fw.weights) w = equal;
        return fw;
    }
    for (double& w : fw.weights) w /= total;
    return fw;
}

// Elementwise weighted sum of the feature matrices.
inline Matrix fuse(const std::vector<const Matrix*>& matrices,
                   const FusionWeights& weights) {
    if (matrices.empty()) throw DataError("fuse requires at least one matrix");
    if (matrices.size() != weights.weights.size())
        throw DataError("one weight per matrix is required");
    const std::size_t rows = matrices[0]->rows(), cols = matrices[0]->cols();
    for (const Matrix* m : matrices)
        if (m->rows() != rows || m->cols() != cols)
            throw DataError("fuse requires matrices of identical dimensions");

    Matrix out(rows, cols);
    for (std::size_t f = 0; f < matrices.size(); ++f) {
        double w = weights.weights[f];
        const auto& data = matrices[f]->data();
        for (std::size_t i = 0; i < data.size(); ++i) out.data()[i] += w * data[i];
    }
    return out;
}

struct StageReport {
    std::string stage;
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    std::vector<std::size_t> candidate_counts;
    std::vector<std::size_t> retained_counts;
    std::size_t damped_contributions = 0;
    std::size_t target_conflicts = 0;
    bool fallback_equal = false;
};

struct FusedStage {
    Matrix fused;
    StageReport report;
};

// One full fusion pass: candidates, filtering, weighting, combination.
inline FusedStage fuse_stage(const std::vector<const Matrix*>& matrices,
                             const std::vector<std::string>& names,
                             const FusionConfig& config, const std::string& stage) {
    if (matrices.size() != names.size())
        throw DataError("one name per matrix is required");

    std::vector<std::vector<ConfidentCorrespondence>> candidates;
    candidates.reserve(matrices.size());
    for (std::size_t f = 0; f < matrices.size(); ++f)
        candidates.push_back(confident_correspondences(*matrices[f], f));

    StageReport report;
    report.stage = stage;
    report.feature_names = names;
    for (const auto& list : candidates) report.candidate_counts.push_back(list.size());

    auto retained = filter_candidates(candidates, &report.target_conflicts);
    for (const auto& list : retained) report.retained_counts.push_back(list.size());

    auto contributions =
        correspondence_weights(retained, config, &report.damped_contributions);
    FusionWeights weights = feature_weights(contributions);
    report.weights = weights.weights;

    double total = 0.0;
    for (const auto& list : contributions)
        for (double w : list) total += w;
    report.fallback_equal = total == 0.0;

    return {fuse(matrices, weights), std::move(report)};
}

struct TwoStageResult {
    Matrix fused;
    std::vector<StageReport> stages;
};

// Semantic + string fuse into the textual matrix, which then fuses with
// the structural matrix. Stage 2 treats the textual matrix as one opaque
// feature and recomputes its candidates.
inline TwoStageResult two_stage_fuse(const Matrix& m_struct, const Matrix& m_sem,
                                     const Matrix& m_str, const FusionConfig& config) {
    TwoStageResult result;
    FusedStage textual =
        fuse_stage({&m_sem, &m_str}, {"semantic", "string"}, config, "textual");
    result.stages.push_back(textual.report);
    FusedStage final_stage = fuse_stage({&textual.fused, &m_struct},
                                        {"textual", "structural"}, config, "final");
    result.stages.push_back(final_stage.report);
    result.fused = std::move(final_stage.fused);
    return result;
}

} // namespace kgalign
