// streamflow command line: reconstruct the mesoscale history of a temporal
// corpus (run), generate synthetic benchmarks (synth), score recovery
// against planted truth (score), and inspect window slicing (windows).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamflow/streamflow.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCorpus = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNoConvergence = 4;

void add_pipeline_flags(CLI::App* cmd, streamflow::RunConfig& config) {
    cmd->add_option("--corpus", config.corpus_path, "Corpus file (JSON Lines)")->required();
    cmd->add_option("--window,-w", config.pipeline.window.width, "Window width in years")
        ->capture_default_str();
    cmd->add_option("--step", config.pipeline.window.step, "Window translation step in years")
        ->capture_default_str();
    cmd->add_option("--min-shared-refs", config.pipeline.min_shared,
                    "Minimum shared references for a coupling edge")
        ->capture_default_str();
    cmd->add_flag("--binarize", config.pipeline.binarize,
                  "Use unit edge weights instead of shared-reference counts");
    cmd->add_option("--detector", config.pipeline.detector, "Community detector")
        ->capture_default_str();
    cmd->add_option("--similarity", config.pipeline.similarity, "Community similarity measure")
        ->capture_default_str();
    cmd->add_option("--link-threshold", config.pipeline.link_threshold,
                    "Minimum similarity for a temporal link")
        ->capture_default_str();
    cmd->add_option("--resolution", config.pipeline.resolution, "Modularity resolution parameter")
        ->capture_default_str();
    cmd->add_option("--max-iterations", config.pipeline.max_iterations,
                    "Correction cap (0 = 10x window count)")
        ->capture_default_str();
    cmd->add_option("--seeds", config.seeds, "Number of detection runs to select from")
        ->capture_default_str();
    cmd->add_option("--seed", config.master_seed, "Master seed (run i uses seed + i)")
        ->capture_default_str();
    cmd->add_option("--out,-o", config.out_dir, "Output directory")->capture_default_str();
}

int cmd_run(const streamflow::RunConfig& config) {
    streamflow::RunSummary s = streamflow::run_pipeline(config);
    std::printf("corpus:            %s\n", config.corpus_path.c_str());
    std::printf("windows:           %zu\n", s.windows);
    std::printf("communities:       %zu\n", s.communities);
    std::printf("streams:           %zu\n", s.streams);
    std::printf("events:            %zu structural, %zu ephemeral (corrected)\n",
                s.structural_events, s.ephemeral_events);
    std::printf("complexity score:  %.6f (seed %llu)\n", s.complexity,
                static_cast<unsigned long long>(s.best_seed));
    for (const streamflow::SeedRun& r : s.runs)
        std::printf("  seed %-6llu C_S = %+.6f  mean final Q = %.6f\n",
                    static_cast<unsigned long long>(r.seed), r.complexity, r.mean_q_final);
    std::printf("artifacts written to %s\n", config.out_dir.c_str());
    return 0;
}

int cmd_synth(const std::string& scenario_path, std::uint64_t seed, const std::string& out_dir) {
    streamflow::Scenario scenario = streamflow::Scenario::from_file(scenario_path);
    auto [records, truth] = streamflow::generate(scenario, seed);

    std::filesystem::create_directories(out_dir);
    std::string corpus_path = (std::filesystem::path(out_dir) / "corpus.jsonl").string();
    std::string truth_path = (std::filesystem::path(out_dir) / "truth.json").string();

    std::string jsonl;
    for (const streamflow::ArticleRecord& r : records) {
        nlohmann::ordered_json j;
        j["id"] = r.id;
        j["year"] = r.year;
        j["authors"] = r.authors;
        j["refs"] = r.refs;
        if (!r.title.empty()) j["title"] = r.title;
        jsonl += j.dump() + "\n";
    }
    streamflow::write_text_file(corpus_path, jsonl);
    streamflow::write_text_file(truth_path, truth.to_json().dump(2) + "\n");

    std::printf("scenario:  %s\n", scenario.name.c_str());
    std::printf("articles:  %zu\n", records.size());
    std::printf("streams:   %zu planted\n", truth.stream_ids.size());
    std::printf("events:    %zu planted\n", truth.events.size());
    std::printf("wrote %s and %s\n", corpus_path.c_str(), truth_path.c_str());
    return 0;
}

int cmd_score(const std::string& truth_path, const std::string& run_dir) {
    using nlohmann::json;
    streamflow::GroundTruth truth = streamflow::GroundTruth::from_file(truth_path);

    std::string desc_path = (std::filesystem::path(run_dir) / "description.json").string();
    std::ifstream in(desc_path);
    if (!in) throw streamflow::IoError("cannot open '" + desc_path + "'");
    json jd;
    try {
        in >> jd;
    } catch (const json::exception& e) {
        throw streamflow::ScenarioError(std::string("bad description.json: ") + e.what());
    }

    // Rebuild the corpus from the run's own configuration, then re-run the
    // deterministic pipeline for the winning seed to recover the in-memory
    // description (artifacts alone do not carry slice graphs).
    streamflow::RunConfig config;
    try {
        const json& jc = jd.at("config");
        config.corpus_path = jc.at("corpus").get<std::string>();
        config.pipeline.window.width = jc.at("window_width").get<int>();
        config.pipeline.window.step = jc.at("window_step").get<int>();
        config.pipeline.min_shared = jc.at("min_shared_refs").get<std::uint32_t>();
        config.pipeline.binarize = jc.at("binarize").get<bool>();
        config.pipeline.detector = jc.at("detector").get<std::string>();
        config.pipeline.similarity = jc.at("similarity").get<std::string>();
        config.pipeline.link_threshold = jc.at("link_threshold").get<double>();
        config.pipeline.resolution = jc.at("resolution").get<double>();
        config.pipeline.max_iterations = jc.at("max_iterations").get<int>();
    } catch (const json::exception& e) {
        throw streamflow::ScenarioError(std::string("description.json lacks a usable config: ") +
                                        e.what());
    }
    std::uint64_t best_seed = jd.at("seed").get<std::uint64_t>();

    streamflow::Corpus corpus(streamflow::parse_corpus_file(config.corpus_path));
    for (const auto& [id, _] : truth.article_stream) {
        try {
            corpus.index_of(id);
        } catch (const streamflow::Error&) {
            throw streamflow::ScenarioError("truth article '" + id +
                                            "' is not in the run's corpus; mismatched corpora?");
        }
    }

    streamflow::Selection sel =
        streamflow::select_best_description(corpus, config.pipeline, {best_seed});
    std::vector<streamflow::Stream> streams =
        streamflow::extract_labeled_streams(sel.best, corpus);
    streamflow::RecoveryScore score =
        streamflow::score_recovery(truth, sel.best, streams, corpus);

    nlohmann::ordered_json out;
    out["event_precision"] = score.event_precision;
    out["event_recall"] = score.event_recall;
    out["membership_agreement"] = score.membership_agreement;
    out["matched_events"] = score.matched_events;
    out["detected_structural_events"] = score.detected_structural;
    out["planted_events"] = score.planted_events;
    std::string report = out.dump(2) + "\n";
    streamflow::write_text_file(
        (std::filesystem::path(run_dir) / "recovery.json").string(), report);
    std::fputs(report.c_str(), stdout);
    return 0;
}

int cmd_windows(const std::string& corpus_path, const streamflow::WindowConfig& wc) {
    streamflow::Corpus corpus(streamflow::parse_corpus_file(corpus_path));
    if (corpus.empty()) throw streamflow::ConfigError("corpus has no records");
    auto windows = streamflow::enumerate_windows(corpus.min_year(), corpus.max_year(), wc);
    std::printf("corpus years %d-%d, %zu articles\n", corpus.min_year(), corpus.max_year(),
                corpus.size());
    for (const streamflow::Window& w : windows) {
        std::size_t n = 0;
        for (const auto& a : corpus.articles())
            if (w.contains(a.year)) ++n;
        std::printf("window %3d: %d-%d  (%zu articles)\n", w.index, w.start_year, w.end_year, n);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesoscale history of temporal networks: windowed community "
                 "detection, split/merge denoising and laminar stream extraction"};
    app.require_subcommand(1);

    streamflow::RunConfig run_config;
    CLI::App* run = app.add_subcommand("run", "Run the full pipeline on a corpus");
    add_pipeline_flags(run, run_config);

    std::string scenario_path, synth_out = "synth-out";
    std::uint64_t synth_seed = 42;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted truth");
    synth->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    synth->add_option("--seed", synth_seed, "Generation seed")->capture_default_str();
    synth->add_option("--out,-o", synth_out, "Output directory")->capture_default_str();

    std::string truth_path, score_run_dir;
    CLI::App* score = app.add_subcommand("score", "Score a run against planted truth");
    score->add_option("--truth", truth_path, "truth.json from synth")->required();
    score->add_option("--run", score_run_dir, "Output directory of a previous run")->required();

    std::string windows_corpus;
    streamflow::WindowConfig windows_config;
    CLI::App* windows = app.add_subcommand("windows", "Show the window slicing of a corpus");
    windows->add_option("--corpus", windows_corpus, "Corpus file (JSON Lines)")->required();
    windows->add_option("--window,-w", windows_config.width, "Window width in years")
        ->capture_default_str();
    windows->add_option("--step", windows_config.step, "Window translation step in years")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (synth->parsed()) return cmd_synth(scenario_path, synth_seed, synth_out);
        if (score->parsed()) return cmd_score(truth_path, score_run_dir);
        if (windows->parsed()) return cmd_windows(windows_corpus, windows_config);
    } catch (const streamflow::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCorpus;
    } catch (const streamflow::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCorpus;
    } catch (const streamflow::DuplicateIdError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCorpus;
    } catch (const streamflow::ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConvergence;
    } catch (const streamflow::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const streamflow::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const streamflow::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
