#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <string>

#include "kgalign/pipeline.hpp"
#include "kgalign/synthetic.hpp"
#include "test_util.hpp"

using namespace kgalign;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

// Synthetic inputs plus a config file on disk; returns the config path.
std::string prepare_inputs(const TempDir& tmp, std::size_t n, std::size_t name_noise,
                           double structure_noise, std::uint64_t seed,
                           const std::string& extra = "") {
    SyntheticBenchmark bench =
        generate_synthetic_pair(n, 2.5, name_noise, structure_noise, seed);
    write_triples(bench.kg1, tmp.file("kg1.tsv"));
    write_triples(bench.kg2, tmp.file("kg2.tsv"));
    write_links(bench.gold, tmp.file("links.tsv"));
    write_word_embeddings(synthetic_word_embeddings(bench, 8, seed),
                          tmp.file("vectors.txt"));

    std::string config;
    config += "paths.kg1_triples = " + tmp.file("kg1.tsv") + "\n";
    config += "paths.kg2_triples = " + tmp.file("kg2.tsv") + "\n";
    config += "paths.links = " + tmp.file("links.tsv") + "\n";
    config += "paths.word_vectors = " + tmp.file("vectors.txt") + "\n";
    config += "paths.output_dir = " + tmp.file("out") + "\n";
    config += "train.dim = 16\n";
    config += "train.epochs = 20\n";
    config += "train.learning_rate = 0.2\n";
    config += "train.margin = 1.0\n";
    config += "rng_seed = 42\n";
    config += extra;
    write_file(tmp.file("run.cfg"), config);
    return tmp.file("run.cfg");
}

} // namespace

TEST_CASE("config parsing: defaults, overrides, errors") {
    TempDir tmp;
    write_file(tmp.file("c.cfg"),
               "# comment\n"
               "paths.output_dir = /tmp/x\n"
               "train.dim = 64   # inline comment\n"
               "fusion.theta1 = 0.9\n"
               "features.semantic = false\n");
    PipelineConfig cfg = parse_pipeline_config(tmp.file("c.cfg"));
    CHECK(cfg.options.train.dim == 64);
    CHECK(cfg.options.train.epochs == 300);
    CHECK(cfg.options.train.margin == 3.0);
    CHECK(cfg.options.train.negatives_per_positive == 5);
    CHECK(cfg.options.fusion.theta1 == 0.9);
    CHECK(cfg.options.fusion.theta2 == 0.1);
    CHECK(cfg.options.seed_fraction == 0.3);
    CHECK(!cfg.options.switches.semantic);
    CHECK(cfg.options.switches.structural);

    write_file(tmp.file("bad1.cfg"), "nonsense.key = 1\n");
    CHECK_THROWS_AS(parse_pipeline_config(tmp.file("bad1.cfg")), ConfigError);
    write_file(tmp.file("bad2.cfg"), "train.dim = lots\n");
    CHECK_THROWS_AS(parse_pipeline_config(tmp.file("bad2.cfg")), ConfigError);
    write_file(tmp.file("bad3.cfg"), "train.dim\n");
    CHECK_THROWS_AS(parse_pipeline_config(tmp.file("bad3.cfg")), ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(tmp.file("missing.cfg")), ConfigError);
}

TEST_CASE("config validation names the missing path") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 12, 0, 0.0, 1);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);
    cfg.paths.word_vectors = tmp.file("gone.txt");
    CHECK_THROWS_WITH(Pipeline(cfg), Catch::Matchers::ContainsSubstring("gone.txt"));

    cfg = parse_pipeline_config(cfg_path);
    cfg.options.switches.structural = false;
    cfg.options.switches.semantic = false;
    cfg.options.switches.string_sim = false;
    CHECK_THROWS_AS(Pipeline(cfg), ConfigError);
}

TEST_CASE("full run writes every artifact and is idempotent") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 16, 1, 0.1, 7);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);

    Pipeline pipeline(cfg);
    pipeline.run();
    for (const char* name :
         {"z1.bin", "z2.bin", "m_struct.bin", "m_sem.bin", "m_str.bin", "fused.bin",
          "fusion_report.txt", "matching.tsv", "eval_report.txt"})
        REQUIRE(std::filesystem::exists(pipeline.artifact(name)));
    CHECK(!std::filesystem::exists(pipeline.artifact("failure.marker")));

    std::string matching_first = read_file(pipeline.artifact("matching.tsv"));
    std::string fused_first = read_file(pipeline.artifact("fused.bin"));
    Pipeline(cfg).run();
    CHECK(read_file(pipeline.artifact("matching.tsv")) == matching_first);
    CHECK(read_file(pipeline.artifact("fused.bin")) == fused_first);
}

TEST_CASE("staged execution equals the monolithic run byte for byte") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 16, 1, 0.1, 13);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);

    Pipeline mono(cfg);
    mono.run();
    std::map<std::string, std::string> bytes;
    for (const char* name : {"m_struct.bin", "m_sem.bin", "m_str.bin", "fused.bin",
                             "fusion_report.txt", "matching.tsv", "eval_report.txt"})
        bytes[name] = read_file(mono.artifact(name));

    // Fresh output dir, stage by stage.
    PipelineConfig staged_cfg = cfg;
    staged_cfg.paths.output_dir = tmp.file("out_staged");
    for (const std::string& stage : Pipeline::stage_names())
        Pipeline(staged_cfg).run_stage(stage);

    Pipeline staged(staged_cfg);
    for (const auto& [name, content] : bytes)
        REQUIRE(read_file(staged.artifact(name)) == content);
}

TEST_CASE("stages demand their upstream artifacts") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 12, 0, 0.0, 3);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);

    CHECK_THROWS_WITH(Pipeline(cfg).run_stage("match"),
                      Catch::Matchers::ContainsSubstring("fuse"));
    CHECK_THROWS_WITH(Pipeline(cfg).run_stage("fuse"),
                      Catch::Matchers::ContainsSubstring("embed-structural"));
    CHECK_THROWS_AS(Pipeline(cfg).run_stage("no-such-stage"), ConfigError);

    // Precondition errors do not leave a failure marker behind.
    CHECK(!std::filesystem::exists(Pipeline(cfg).artifact("failure.marker")));
    Pipeline(cfg).run_stage("embed-structural"); // still runnable
}

TEST_CASE("failure marker blocks other stages until the failed stage reruns") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 12, 0, 0.0, 5);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);

    Pipeline pipeline(cfg);
    pipeline.run();

    // Corrupt one matrix so fuse fails mid-load and marks the directory.
    write_file(pipeline.artifact("m_sem.bin"), "garbage");
    CHECK_THROWS_AS(Pipeline(cfg).run_stage("fuse"), DataError);
    REQUIRE(std::filesystem::exists(pipeline.artifact("failure.marker")));

    // Downstream consumers are blocked and the message names the culprit.
    CHECK_THROWS_WITH(Pipeline(cfg).run_stage("match"),
                      Catch::Matchers::ContainsSubstring("fuse"));
    CHECK_THROWS_WITH(Pipeline(cfg).run_stage("evaluate"),
                      Catch::Matchers::ContainsSubstring("fuse"));

    // Upstream producers stay runnable for repairs, but the marker stands
    // until the failed stage itself succeeds.
    Pipeline(cfg).run_stage("embed-semantic");
    CHECK(std::filesystem::exists(pipeline.artifact("failure.marker")));
    Pipeline(cfg).run_stage("fuse");
    CHECK(!std::filesystem::exists(pipeline.artifact("failure.marker")));
    Pipeline(cfg).run_stage("match");
}

TEST_CASE("zero-noise run reaches exact accuracy") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 20, 0, 0.0, 9);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);
    Pipeline pipeline(cfg);
    pipeline.run();
    std::string report = read_file(pipeline.artifact("eval_report.txt"));
    CHECK(report.find("accuracy = 1\n") != std::string::npos);
}

TEST_CASE("output directory lock rejects concurrent runs") {
    TempDir tmp;
    std::string cfg_path = prepare_inputs(tmp, 12, 0, 0.0, 2);
    PipelineConfig cfg = parse_pipeline_config(cfg_path);
    std::filesystem::create_directories(cfg.paths.output_dir);

    detail::OutputLock holder(cfg.paths.output_dir);
    CHECK_THROWS_AS(Pipeline(cfg).run(), StageError);
}

TEST_CASE("matcher trace writes a proposal log when enabled") {
    TempDir tmp;
    std::string cfg_path =
        prepare_inputs(tmp, 12, 0, 0.0, 4, "matcher.trace = true\n");
    PipelineConfig cfg = parse_pipeline_config(cfg_path);
    Pipeline pipeline(cfg);
    pipeline.run();
    REQUIRE(std::filesystem::exists(pipeline.artifact("daa_trace.log")));
    std::string log = read_file(pipeline.artifact("daa_trace.log"));
    CHECK(log.find("round 1") != std::string::npos);
}

TEST_CASE("a split that leaves no test pairs is rejected") {
    TempDir tmp;
    std::string cfg_path =
        prepare_inputs(tmp, 12, 0, 0.0, 6, "split.seed_fraction = 0.999\n");
    PipelineConfig cfg = parse_pipeline_config(cfg_path);
    CHECK_THROWS_WITH(Pipeline(cfg).run(),
                      Catch::Matchers::ContainsSubstring("empty test set"));
}

TEST_CASE("matching file round-trips through read_matching") {
    AlignmentSet test;
    test.pairs = {{"s0", "t0"}, {"s1", "t1"}, {"s2", "t2"}};
    Matching matching{{2, kUnmatched, 0}};

    TempDir tmp;
    write_matching(matching, test, tmp.file("m.tsv"));
    Matching back = read_matching(tmp.file("m.tsv"), test);
    REQUIRE(back == matching);

    write_file(tmp.file("alien.tsv"), "s0\tzz\n");
    CHECK_THROWS_AS(read_matching(tmp.file("alien.tsv"), test), DataError);
}
