#pragma once
// End-to-end alignment of two KGs in memory: split gold links, generate
// the enabled feature matrices over test entities, fuse, match, score.
// The disk-backed pipeline stages and the ablation grid both build on
// these functions. All similarity matrices are restricted to test-split
// entities; rows and columns follow the test-pair order, so the gold
// column of row i is i.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "eval.hpp"
#include "fusion.hpp"
#include "gcn.hpp"
#include "kg.hpp"
#include "matching.hpp"
#include "matrix.hpp"
#include "semantic.hpp"
#include "strsim.hpp"
#include "synthetic.hpp"

namespace kgalign {

struct FeatureSwitches {
    bool structural = true;
    bool semantic = true;
    bool string_sim = true;
    bool adaptive = true;   // adaptive weights vs fixed equal weights
    bool collective = true; // deferred acceptance vs row argmax

    bool any_feature() const { return structural || semantic || string_sim; }
};

struct RunOptions {
    TrainingConfig train;
    FusionConfig fusion;
    StringSimConfig strsim;
    double seed_fraction = 0.3;
    std::uint64_t rng_seed = 42;
    FeatureSwitches switches;
};

// Seed streams hung off the master seed. Stream 10 drives training,
// stream 11 the seed/test split.
constexpr std::uint64_t kTrainSeedStream = 10;
constexpr std::uint64_t kSplitSeedStream = 11;

// Test-split entities resolved to KG indices and display names.
struct TestSlice {
    AlignmentSet seed;
    AlignmentSet test;
    std::vector<std::int32_t> src_indices;
    std::vector<std::int32_t> tgt_indices;
    std::vector<std::string> src_names;
    std::vector<std::string> tgt_names;

    std::vector<IndexPair> gold() const {
        std::vector<IndexPair> g(test.size());
        for (std::size_t i = 0; i < test.size(); ++i)
            g[i] = {static_cast<std::int32_t>(i), static_cast<std::int32_t>(i)};
        return g;
    }
};

inline TestSlice make_test_slice(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                                 const AlignmentSet& links, double seed_fraction,
                                 std::uint64_t rng_seed) {
    TestSlice slice;
    auto [seed, test] =
        split_alignment(links, seed_fraction, derive_seed(rng_seed, kSplitSeedStream));
    if (test.empty())
        throw DataError("seed/test split produced an empty test set");
    slice.seed = std::move(seed);
    slice.test = std::move(test);

    std::unordered_map<std::string, std::int32_t> idx1, idx2;
    for (std::size_t i = 0; i < kg1.entities.size(); ++i)
        idx1.emplace(kg1.entities[i], static_cast<std::int32_t>(i));
    for (std::size_t i = 0; i < kg2.entities.size(); ++i)
        idx2.emplace(kg2.entities[i], static_cast<std::int32_t>(i));
    for (const auto& [src, tgt] : slice.test.pairs) {
        auto it1 = idx1.find(src);
        auto it2 = idx2.find(tgt);
        if (it1 == idx1.end()) throw DataError("link entity not in source KG: " + src);
        if (it2 == idx2.end()) throw DataError("link entity not in target KG: " + tgt);
        slice.src_indices.push_back(it1->second);
        slice.tgt_indices.push_back(it2->second);
        slice.src_names.push_back(entity_name(src));
        slice.tgt_names.push_back(entity_name(tgt));
    }
    return slice;
}

struct StructuralResult {
    Matrix z1;
    Matrix z2;
    Matrix similarity;
};

inline StructuralResult compute_structural(const KnowledgeGraph& kg1,
                                           const KnowledgeGraph& kg2,
                                           const TestSlice& slice,
                                           const TrainingConfig& config) {
    StructuralResult out;
    TrainResult trained = train(kg1, kg2, slice.seed, config);
    out.z1 = std::move(trained.z1);
    out.z2 = std::move(trained.z2);
    out.similarity = cosine_similarity_matrix(select_rows(out.z1, slice.src_indices),
                                              select_rows(out.z2, slice.tgt_indices));
    return out;
}

struct FusionOutcome {
    Matrix fused;
    std::vector<StageReport> stages;
};

// Adaptive schedule: semantic+string fuse into a textual matrix, which
// fuses with the structural one. Disabled features drop out; with
// adaptive weighting off, all enabled matrices combine in one stage with
// equal weights.
inline FusionOutcome compute_fusion(const Matrix* m_struct, const Matrix* m_sem,
                                    const Matrix* m_str, bool adaptive,
                                    const FusionConfig& config) {
    std::vector<const Matrix*> enabled;
    std::vector<std::string> enabled_names;
    if (m_sem) {
        enabled.push_back(m_sem);
        enabled_names.push_back("semantic");
    }
    if (m_str) {
        enabled.push_back(m_str);
        enabled_names.push_back("string");
    }
    if (m_struct) {
        enabled.push_back(m_struct);
        enabled_names.push_back("structural");
    }
    if (enabled.empty()) throw ConfigError("at least one feature must be enabled");

    FusionOutcome out;
    if (!adaptive) {
        FusionWeights equal;
        equal.weights.assign(enabled.size(), 1.0 / static_cast<double>(enabled.size()));
        out.fused = fuse(enabled, equal);
        StageReport report;
        report.stage = "equal";
        report.feature_names = enabled_names;
        report.weights = equal.weights;
        report.candidate_counts.assign(enabled.size(), 0);
        report.retained_counts.assign(enabled.size(), 0);
        out.stages.push_back(std::move(report));
        return out;
    }

    const Matrix* textual = nullptr;
    std::string textual_name;
    Matrix textual_storage;
    if (m_sem && m_str) {
        FusedStage stage =
            fuse_stage({m_sem, m_str}, {"semantic", "string"}, config, "textual");
        out.stages.push_back(stage.report);
        textual_storage = std::move(stage.fused);
        textual = &textual_storage;
        textual_name = "textual";
    } else if (m_sem) {
        textual = m_sem;
        textual_name = "semantic";
    } else if (m_str) {
        textual = m_str;
        textual_name = "string";
    }

    if (textual && m_struct) {
        FusedStage stage = fuse_stage({textual, m_struct}, {textual_name, "structural"},
                                      config, "final");
        out.stages.push_back(stage.report);
        out.fused = std::move(stage.fused);
    } else if (textual) {
        if (out.stages.empty()) {
            FusedStage stage = fuse_stage({textual}, {textual_name}, config, "final");
            out.stages.push_back(stage.report);
            out.fused = std::move(stage.fused);
        } else {
            out.fused = std::move(textual_storage);
        }
    } else {
        FusedStage stage = fuse_stage({m_struct}, {"structural"}, config, "final");
        out.stages.push_back(stage.report);
        out.fused = std::move(stage.fused);
    }
    return out;
}

inline Matching compute_matching(const Matrix& fused, bool collective,
                                 std::ostream* trace = nullptr) {
    if (collective) return deferred_acceptance(preference_lists(fused), trace);
    return Matching{independent_match(fused)};
}

inline EvalReport compute_eval(const Matrix& fused, const Matching& matching,
                               const std::vector<IndexPair>& gold) {
    EvalReport report;
    report.accuracy = accuracy(matching, gold);
    RankingMetrics rm = hits_and_mrr(fused, gold, {1, 10});
    report.hits_at = rm.hits_at;
    report.mrr = rm.mrr;
    report.matched = matching.matched_count();
    report.total = gold.size();
    return report;
}

struct RunArtifacts {
    TestSlice slice;
    std::optional<Matrix> m_struct;
    std::optional<Matrix> m_sem;
    std::optional<Matrix> m_str;
    FusionOutcome fusion;
    Matching matching;
    EvalReport report;
};

inline RunArtifacts run_alignment(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                                  const AlignmentSet& links,
                                  const WordEmbeddingStore& store,
                                  const RunOptions& options) {
    if (!options.switches.any_feature())
        throw ConfigError("at least one feature must be enabled");

    RunArtifacts art;
    art.slice = make_test_slice(kg1, kg2, links, options.seed_fraction,
                                options.rng_seed);

    if (options.switches.structural) {
        TrainingConfig train_cfg = options.train;
        train_cfg.rng_seed = derive_seed(options.rng_seed, kTrainSeedStream);
        art.m_struct =
            compute_structural(kg1, kg2, art.slice, train_cfg).similarity;
    }
    if (options.switches.semantic)
        art.m_sem = semantic_similarity_matrix(art.slice.src_names,
                                               art.slice.tgt_names, store);
    if (options.switches.string_sim)
        art.m_str = string_similarity_matrix(art.slice.src_names,
                                             art.slice.tgt_names, options.strsim);

    art.fusion = compute_fusion(art.m_struct ? &*art.m_struct : nullptr,
                                art.m_sem ? &*art.m_sem : nullptr,
                                art.m_str ? &*art.m_str : nullptr,
                                options.switches.adaptive, options.fusion);
    art.matching = compute_matching(art.fusion.fused, options.switches.collective);
    art.report = compute_eval(art.fusion.fused, art.matching, art.slice.gold());
    return art;
}

struct AblationSwitch {
    std::string name;
    FeatureSwitches switches;
};

inline std::vector<AblationSwitch> default_ablation_switches() {
    std::vector<AblationSwitch> out;
    FeatureSwitches full;
    out.push_back({"full", full});
    FeatureSwitches s = full;
    s.collective = false;
    out.push_back({"wo_c", s});
    s = full;
    s.adaptive = false;
    out.push_back({"wo_aff", s});
    s = full;
    s.structural = false;
    out.push_back({"wo_ms", s});
    s = full;
    s.semantic = false;
    out.push_back({"wo_mn", s});
    s = full;
    s.string_sim = false;
    out.push_back({"wo_ml", s});
    return out;
}

// One full run per switch combination over a prepared benchmark.
inline std::vector<std::pair<std::string, EvalReport>> ablation_grid(
    const KnowledgeGraph& kg1, const KnowledgeGraph& kg2, const AlignmentSet& gold,
    const WordEmbeddingStore& store, const RunOptions& base,
    const std::vector<AblationSwitch>& switches) {
    std::vector<std::pair<std::string, EvalReport>> out;
    out.reserve(switches.size());
    for (const AblationSwitch& sw : switches) {
        if (!sw.switches.any_feature())
            throw ConfigError("ablation switch '" + sw.name + "' disables every feature");
        RunOptions options = base;
        options.switches = sw.switches;
        RunArtifacts art = run_alignment(kg1, kg2, gold, store, options);
        out.emplace_back(sw.name, art.report);
    }
    return out;
}

inline void write_ablation_grid(
    const std::vector<std::pair<std::string, EvalReport>>& grid,
    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    out << "switch\taccuracy\thits@1\thits@10\tmrr\tmatched\ttotal\n";
    for (const auto& [name, report] : grid) {
        out << name << '\t' << fmt(report.accuracy) << '\t'
            << fmt(report.hits_at.count(1) ? report.hits_at.at(1) : 0.0) << '\t'
            << fmt(report.hits_at.count(10) ? report.hits_at.at(10) : 0.0) << '\t'
            << fmt(report.mrr) << '\t' << report.matched << '\t' << report.total
            << '\n';
    }
}

} // namespace kgalign
