#pragma once
// Disk-backed orchestration of the alignment framework. A flat dotted-key
// config file drives either a monolithic run or individual stages that
// persist and reuse artifacts under one output directory:
//
//   z1.bin z2.bin              structural embeddings
//   m_struct.bin m_sem.bin m_str.bin fused.bin   similarity matrices
//   fusion_report.txt matching.tsv daa_trace.log eval_report.txt
//
// A failed stage leaves failure.marker behind; other stages refuse to
// consume artifacts until the failed stage is rerun. A lock file rejects
// concurrent runs against the same directory. Staged execution and a
// monolithic run produce byte-identical artifacts.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "run.hpp"

namespace kgalign {

struct PipelinePaths {
    std::string kg1_triples;
    std::string kg2_triples;
    std::string links;
    std::string word_vectors;
    std::string word_vectors2; // optional second store, first one wins on collision
    std::string output_dir;
};

struct PipelineConfig {
    PipelinePaths paths;
    RunOptions options;
    bool trace = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
    }
}

} // namespace detail

// Flat `key = value` lines; '#' starts a comment; unknown keys are
// rejected. Defaults follow the full-scale parameterization (dim 300,
// margin 3, 300 epochs, 5 negatives, theta1 0.98, theta2 0.1, 30% seed).
inline PipelineConfig parse_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);

    PipelineConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));

        if (key == "paths.kg1_triples") cfg.paths.kg1_triples = value;
        else if (key == "paths.kg2_triples") cfg.paths.kg2_triples = value;
        else if (key == "paths.links") cfg.paths.links = value;
        else if (key == "paths.word_vectors") cfg.paths.word_vectors = value;
        else if (key == "paths.word_vectors2") cfg.paths.word_vectors2 = value;
        else if (key == "paths.output_dir") cfg.paths.output_dir = value;
        else if (key == "train.dim") cfg.options.train.dim = detail::parse_u64(value, key);
        else if (key == "train.margin") cfg.options.train.margin = detail::parse_double(value, key);
        else if (key == "train.epochs") cfg.options.train.epochs = detail::parse_u64(value, key);
        else if (key == "train.negatives")
            cfg.options.train.negatives_per_positive = detail::parse_u64(value, key);
        else if (key == "train.learning_rate")
            cfg.options.train.learning_rate = detail::parse_double(value, key);
        else if (key == "train.train_features")
            cfg.options.train.train_features = detail::parse_bool(value, key);
        else if (key == "fusion.theta1") cfg.options.fusion.theta1 = detail::parse_double(value, key);
        else if (key == "fusion.theta2") cfg.options.fusion.theta2 = detail::parse_double(value, key);
        else if (key == "fusion.adaptive")
            cfg.options.switches.adaptive = detail::parse_bool(value, key);
        else if (key == "split.seed_fraction")
            cfg.options.seed_fraction = detail::parse_double(value, key);
        else if (key == "rng_seed") cfg.options.rng_seed = detail::parse_u64(value, key);
        else if (key == "features.structural")
            cfg.options.switches.structural = detail::parse_bool(value, key);
        else if (key == "features.semantic")
            cfg.options.switches.semantic = detail::parse_bool(value, key);
        else if (key == "features.string")
            cfg.options.switches.string_sim = detail::parse_bool(value, key);
        else if (key == "matcher.collective")
            cfg.options.switches.collective = detail::parse_bool(value, key);
        else if (key == "matcher.trace") cfg.trace = detail::parse_bool(value, key);
        else if (key == "strsim.normalize_case")
            cfg.options.strsim.normalize_case = detail::parse_bool(value, key);
        else
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
    }
    return cfg;
}

inline void validate_pipeline_config(const PipelineConfig& cfg) {
    auto require_file = [](const std::string& p, const std::string& what) {
        if (p.empty()) throw ConfigError(what + " path is not set");
        if (!std::filesystem::exists(p))
            throw ConfigError(what + " file does not exist: " + p);
    };
    require_file(cfg.paths.kg1_triples, "paths.kg1_triples");
    require_file(cfg.paths.kg2_triples, "paths.kg2_triples");
    require_file(cfg.paths.links, "paths.links");
    if (cfg.options.switches.semantic) {
        require_file(cfg.paths.word_vectors, "paths.word_vectors");
        if (!cfg.paths.word_vectors2.empty())
            require_file(cfg.paths.word_vectors2, "paths.word_vectors2");
    }
    if (cfg.paths.output_dir.empty()) throw ConfigError("paths.output_dir is not set");
    if (!cfg.options.switches.any_feature())
        throw ConfigError("at least one feature must be enabled");
    if (!(cfg.options.seed_fraction > 0.0 && cfg.options.seed_fraction < 1.0))
        throw ConfigError("split.seed_fraction must lie in (0,1)");
}

namespace detail {

class OutputLock {
public:
    explicit OutputLock(const std::string& dir) {
        path_ = dir + "/lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw StageError("cannot create lock file " + path_);
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw StageError("output directory is in use by another run: " + dir);
        }
    }
    ~OutputLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

} // namespace detail

inline void write_fusion_report(const std::vector<StageReport>& stages,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const StageReport& r = stages[s];
        std::string prefix = "stage." + std::to_string(s) + ".";
        out << prefix << "name = " << r.stage << '\n';
        for (std::size_t f = 0; f < r.feature_names.size(); ++f) {
            std::string fp = prefix + "feature." + r.feature_names[f] + ".";
            out << fp << "weight = " << fmt(r.weights[f]) << '\n';
            out << fp << "candidates = " << r.candidate_counts[f] << '\n';
            out << fp << "retained = " << r.retained_counts[f] << '\n';
        }
        out << prefix << "damped_contributions = " << r.damped_contributions << '\n';
        out << prefix << "target_conflicts = " << r.target_conflicts << '\n';
        out << prefix << "fallback_equal = " << (r.fallback_equal ? "true" : "false")
            << '\n';
    }
}

// Matched pairs as entity ids, one per line, source order.
inline void write_matching(const Matching& matching, const AlignmentSet& test,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (std::size_t u = 0; u < matching.source_to_target.size(); ++u) {
        std::int32_t v = matching.source_to_target[u];
        if (v == kUnmatched) continue;
        out << test.pairs[u].first << '\t'
            << test.pairs[static_cast<std::size_t>(v)].second << '\n';
    }
}

inline Matching read_matching(const std::string& path, const AlignmentSet& test) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open matching file " + path);
    std::unordered_map<std::string, std::int32_t> src_idx, tgt_idx;
    for (std::size_t i = 0; i < test.size(); ++i) {
        src_idx.emplace(test.pairs[i].first, static_cast<std::int32_t>(i));
        tgt_idx.emplace(test.pairs[i].second, static_cast<std::int32_t>(i));
    }
    Matching matching;
    matching.source_to_target.assign(test.size(), kUnmatched);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 2 tab-separated fields");
        auto su = src_idx.find(line.substr(0, tab));
        auto tv = tgt_idx.find(line.substr(tab + 1));
        if (su == src_idx.end() || tv == tgt_idx.end())
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": entity not in the test split");
        matching.source_to_target[su->second] = tv->second;
    }
    return matching;
}

class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, std::ostream* log = nullptr)
        : config_(std::move(config)), log_(log) {
        validate_pipeline_config(config_);
        std::filesystem::create_directories(config_.paths.output_dir);
    }

    static const std::vector<std::string>& stage_names() {
        static const std::vector<std::string> names = {
            "embed-structural", "embed-semantic", "string-sim",
            "fuse",             "match",          "evaluate"};
        return names;
    }

    std::string artifact(const std::string& name) const {
        return config_.paths.output_dir + "/" + name;
    }

    // All enabled stages in order on a cleaned output directory.
    void run() {
        detail::OutputLock lock(config_.paths.output_dir);
        clear_artifacts();
        for (const std::string& stage : stage_names()) {
            if (!stage_enabled(stage)) continue;
            execute_guarded(stage);
        }
    }

    // One stage against whatever artifacts are already on disk. A failure
    // marker blocks stages downstream of the failed one; the failed stage
    // and its upstream producers stay runnable.
    void run_stage(const std::string& stage) {
        auto it = std::find(stage_names().begin(), stage_names().end(), stage);
        if (it == stage_names().end())
            throw ConfigError("unknown stage '" + stage + "'");
        if (!stage_enabled(stage))
            throw ConfigError("stage '" + stage + "' is disabled by the feature switches");
        detail::OutputLock lock(config_.paths.output_dir);
        std::string marker = artifact("failure.marker");
        if (std::filesystem::exists(marker)) {
            std::ifstream in(marker);
            std::string failed;
            std::getline(in, failed);
            auto failed_it = std::find(stage_names().begin(), stage_names().end(), failed);
            if (failed_it != stage_names().end() && it > failed_it)
                throw StageError("stage '" + failed +
                                 "' failed earlier; rerun it (or a full run) before '" +
                                 stage + "'");
        }
        execute_guarded(stage);
    }

    const PipelineConfig& config() const { return config_; }

private:
    bool stage_enabled(const std::string& stage) const {
        if (stage == "embed-structural") return config_.options.switches.structural;
        if (stage == "embed-semantic") return config_.options.switches.semantic;
        if (stage == "string-sim") return config_.options.switches.string_sim;
        return true;
    }

    void execute_guarded(const std::string& stage) {
        log("stage " + stage);
        try {
            execute(stage);
        } catch (const MissingArtifact&) {
            throw; // nothing ran, nothing to mark stale
        } catch (...) {
            std::ofstream marker(artifact("failure.marker"));
            marker << stage << '\n';
            throw;
        }
        // Success clears the marker only once the failed stage itself has
        // been redone; a repaired upstream artifact is not enough.
        std::string marker = artifact("failure.marker");
        if (std::filesystem::exists(marker)) {
            std::ifstream in(marker);
            std::string failed;
            std::getline(in, failed);
            if (failed == stage) {
                in.close();
                std::filesystem::remove(marker);
            }
        }
    }

    void clear_artifacts() {
        static const char* names[] = {"z1.bin",       "z2.bin",
                                      "m_struct.bin", "m_sem.bin",
                                      "m_str.bin",    "fused.bin",
                                      "fusion_report.txt", "matching.tsv",
                                      "daa_trace.log", "eval_report.txt",
                                      "failure.marker"};
        for (const char* n : names) std::filesystem::remove(artifact(n));
    }

    void execute(const std::string& stage) {
        if (stage == "embed-structural") {
            const Context& ctx = context();
            TrainingConfig train_cfg = config_.options.train;
            train_cfg.rng_seed = derive_seed(config_.options.rng_seed, kTrainSeedStream);
            StructuralResult sr =
                compute_structural(ctx.kg1, ctx.kg2, ctx.slice, train_cfg);
            save_embedding(sr.z1, artifact("z1.bin"));
            save_embedding(sr.z2, artifact("z2.bin"));
            save_matrix(sr.similarity, artifact("m_struct.bin"));
        } else if (stage == "embed-semantic") {
            const Context& ctx = context();
            WordEmbeddingStore store = load_word_embeddings(config_.paths.word_vectors);
            if (!config_.paths.word_vectors2.empty()) {
                std::size_t collisions = merge_word_embeddings(
                    store, load_word_embeddings(config_.paths.word_vectors2));
                if (collisions > 0)
                    log("warning: " + std::to_string(collisions) +
                        " word collisions; first store wins");
            }
            save_matrix(semantic_similarity_matrix(ctx.slice.src_names,
                                                   ctx.slice.tgt_names, store),
                        artifact("m_sem.bin"));
        } else if (stage == "string-sim") {
            const Context& ctx = context();
            save_matrix(string_similarity_matrix(ctx.slice.src_names,
                                                 ctx.slice.tgt_names,
                                                 config_.options.strsim),
                        artifact("m_str.bin"));
        } else if (stage == "fuse") {
            std::optional<Matrix> ms = load_if_enabled("m_struct.bin",
                                                       config_.options.switches.structural,
                                                       "embed-structural");
            std::optional<Matrix> mn = load_if_enabled("m_sem.bin",
                                                       config_.options.switches.semantic,
                                                       "embed-semantic");
            std::optional<Matrix> ml = load_if_enabled("m_str.bin",
                                                       config_.options.switches.string_sim,
                                                       "string-sim");
            FusionOutcome fo = compute_fusion(ms ? &*ms : nullptr, mn ? &*mn : nullptr,
                                              ml ? &*ml : nullptr,
                                              config_.options.switches.adaptive,
                                              config_.options.fusion);
            save_matrix(fo.fused, artifact("fused.bin"));
            write_fusion_report(fo.stages, artifact("fusion_report.txt"));
        } else if (stage == "match") {
            const Context& ctx = context();
            Matrix fused = load_upstream("fused.bin", "fuse");
            Matching matching;
            if (config_.trace && config_.options.switches.collective) {
                std::ofstream trace(artifact("daa_trace.log"));
                matching = compute_matching(fused, true, &trace);
            } else {
                matching =
                    compute_matching(fused, config_.options.switches.collective);
            }
            write_matching(matching, ctx.slice.test, artifact("matching.tsv"));
        } else if (stage == "evaluate") {
            const Context& ctx = context();
            Matrix fused = load_upstream("fused.bin", "fuse");
            if (!std::filesystem::exists(artifact("matching.tsv")))
                throw MissingArtifact("matching.tsv missing; run stage match first");
            Matching matching = read_matching(artifact("matching.tsv"), ctx.slice.test);
            EvalReport report = compute_eval(fused, matching, ctx.slice.gold());
            write_eval_report(report, artifact("eval_report.txt"));
        }
    }

    std::optional<Matrix> load_if_enabled(const std::string& name, bool enabled,
                                          const std::string& producer) {
        if (!enabled) return std::nullopt;
        return load_upstream(name, producer);
    }

    Matrix load_upstream(const std::string& name, const std::string& producer) {
        if (!std::filesystem::exists(artifact(name)))
            throw MissingArtifact(name + " missing; run stage " + producer + " first");
        return load_matrix(artifact(name));
    }

    struct Context {
        KnowledgeGraph kg1;
        KnowledgeGraph kg2;
        AlignmentSet links;
        TestSlice slice;
    };

    const Context& context() {
        if (!context_) {
            Context ctx;
            ctx.kg1 = parse_triples(config_.paths.kg1_triples);
            ctx.kg2 = parse_triples(config_.paths.kg2_triples);
            ctx.links = parse_links(config_.paths.links);
            if (ctx.links.empty())
                throw DataError(config_.paths.links + ": no gold links");
            ctx.slice = make_test_slice(ctx.kg1, ctx.kg2, ctx.links,
                                        config_.options.seed_fraction,
                                        config_.options.rng_seed);
            context_ = std::move(ctx);
        }
        return *context_;
    }

    void log(const std::string& msg) {
        if (log_) *log_ << msg << '\n';
    }

    PipelineConfig config_;
    std::ostream* log_;
    std::optional<Context> context_;
};

} // namespace kgalign
