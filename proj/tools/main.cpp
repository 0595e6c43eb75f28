// Command-line front end: monolithic runs, single stages, synthetic
// benchmark generation, ablation grids and evaluation over one config
// file. Exit codes: 0 success, 2 config error, 3 data error, 4 stage
// failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "kgalign/kgalign.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_dir; // overrides paths.output_dir
    std::int64_t seed = -1; // overrides rng_seed when >= 0
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "Path to the config file");
    if (config_required) opt->required();
    cmd->add_option("--output", args.output_dir, "Override the output directory");
    cmd->add_option("--seed", args.seed, "Override the config rng_seed");
    cmd->add_flag("--quiet", args.quiet, "Suppress progress output");
}

kgalign::PipelineConfig load_config(const CommonArgs& args) {
    kgalign::PipelineConfig cfg = kgalign::parse_pipeline_config(args.config_path);
    if (!args.output_dir.empty()) cfg.paths.output_dir = args.output_dir;
    if (args.seed >= 0) cfg.options.rng_seed = static_cast<std::uint64_t>(args.seed);
    return cfg;
}

int run_pipeline(const CommonArgs& args, const std::string& stage) {
    kgalign::PipelineConfig cfg = load_config(args);
    std::ostream* log = args.quiet ? nullptr : &std::cout;
    kgalign::Pipeline pipeline(cfg, log);
    if (stage.empty())
        pipeline.run();
    else
        pipeline.run_stage(stage);
    if (!args.quiet && (stage.empty() || stage == "evaluate")) {
        std::string report = pipeline.artifact("eval_report.txt");
        if (std::filesystem::exists(report)) {
            std::ifstream in(report);
            std::cout << in.rdbuf();
        }
    }
    return 0;
}

struct GenArgs {
    std::string output_dir;
    std::size_t entities = 200;
    double density = 2.5;
    std::size_t name_noise = 0;
    double structure_noise = 0.0;
    std::size_t vector_dim = 16;
    std::uint64_t seed = 42;
    bool quiet = false;
};

int gen_synthetic(const GenArgs& args) {
    namespace fs = std::filesystem;
    fs::create_directories(args.output_dir);
    auto path = [&](const char* name) { return args.output_dir + "/" + name; };

    kgalign::SyntheticBenchmark bench = kgalign::generate_synthetic_pair(
        args.entities, args.density, args.name_noise, args.structure_noise, args.seed);
    kgalign::write_triples(bench.kg1, path("kg1.tsv"));
    kgalign::write_triples(bench.kg2, path("kg2.tsv"));
    kgalign::write_links(bench.gold, path("links.tsv"));
    kgalign::write_word_embeddings(
        kgalign::synthetic_word_embeddings(bench, args.vector_dim, args.seed),
        path("vectors.txt"));

    std::ofstream cfg(path("run.cfg"));
    cfg << "# Generated alongside a synthetic benchmark; training values are\n"
           "# scaled down to match it.\n"
        << "paths.kg1_triples = " << path("kg1.tsv") << "\n"
        << "paths.kg2_triples = " << path("kg2.tsv") << "\n"
        << "paths.links = " << path("links.tsv") << "\n"
        << "paths.word_vectors = " << path("vectors.txt") << "\n"
        << "paths.output_dir = " << args.output_dir << "/out\n"
        << "train.dim = 32\n"
        << "train.epochs = 100\n"
        << "train.margin = 1.0\n"
        << "train.learning_rate = 0.2\n"
        << "rng_seed = " << args.seed << "\n";
    if (!args.quiet)
        std::cout << "benchmark with " << args.entities << " entities written to "
                  << args.output_dir << "\n";
    return 0;
}

int ablate(const CommonArgs& args) {
    kgalign::PipelineConfig cfg = load_config(args);
    kgalign::validate_pipeline_config(cfg);
    std::filesystem::create_directories(cfg.paths.output_dir);

    kgalign::KnowledgeGraph kg1 = kgalign::parse_triples(cfg.paths.kg1_triples);
    kgalign::KnowledgeGraph kg2 = kgalign::parse_triples(cfg.paths.kg2_triples);
    kgalign::AlignmentSet links = kgalign::parse_links(cfg.paths.links);
    kgalign::WordEmbeddingStore store =
        kgalign::load_word_embeddings(cfg.paths.word_vectors);
    if (!cfg.paths.word_vectors2.empty())
        kgalign::merge_word_embeddings(
            store, kgalign::load_word_embeddings(cfg.paths.word_vectors2));

    auto grid = kgalign::ablation_grid(kg1, kg2, links, store, cfg.options,
                                       kgalign::default_ablation_switches());
    std::string grid_path = cfg.paths.output_dir + "/grid.tsv";
    kgalign::write_ablation_grid(grid, grid_path);
    if (!args.quiet) {
        std::ifstream in(grid_path);
        std::cout << in.rdbuf();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph entity alignment toolkit"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* cmd_run = app.add_subcommand("run", "Run every enabled stage");
    add_common(cmd_run, run_args);

    CommonArgs stage_args;
    std::string stage_name;
    CLI::App* cmd_stage = app.add_subcommand("stage", "Run a single stage");
    cmd_stage->add_option("name", stage_name, "embed-structural | embed-semantic | string-sim | fuse | match | evaluate")
        ->required();
    add_common(cmd_stage, stage_args);

    CommonArgs eval_args;
    CLI::App* cmd_eval = app.add_subcommand("evaluate", "Score persisted artifacts");
    add_common(cmd_eval, eval_args);

    GenArgs gen_args;
    CLI::App* cmd_gen =
        app.add_subcommand("gen-synthetic", "Generate a synthetic benchmark KG pair");
    cmd_gen->add_option("--output", gen_args.output_dir, "Directory for the files")
        ->required();
    cmd_gen->add_option("--entities", gen_args.entities, "Entity count per KG");
    cmd_gen->add_option("--density", gen_args.density, "Triples per entity");
    cmd_gen->add_option("--name-noise", gen_args.name_noise,
                        "Character edits per kg2 name");
    cmd_gen->add_option("--structure-noise", gen_args.structure_noise,
                        "Fraction of kg2 triples dropped");
    cmd_gen->add_option("--vector-dim", gen_args.vector_dim, "Synthetic word-vector dim");
    cmd_gen->add_option("--seed", gen_args.seed, "Generator seed");
    cmd_gen->add_flag("--quiet", gen_args.quiet, "Suppress output");

    CommonArgs ablate_args;
    CLI::App* cmd_ablate =
        app.add_subcommand("ablate", "Run the ablation grid over one benchmark");
    add_common(cmd_ablate, ablate_args);

    try {
        app.parse(argc, argv);
        if (cmd_run->parsed()) return run_pipeline(run_args, "");
        if (cmd_stage->parsed()) return run_pipeline(stage_args, stage_name);
        if (cmd_eval->parsed()) return run_pipeline(eval_args, "evaluate");
        if (cmd_gen->parsed()) return gen_synthetic(gen_args);
        if (cmd_ablate->parsed()) return ablate(ablate_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const kgalign::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kgalign::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
