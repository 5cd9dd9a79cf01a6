#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqad/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string dataset;
    std::string kind = "mvtec";
    std::vector<std::string> categories;
    std::string method = "superpixel";
    std::string backend = "oracle";
    std::string model = "gpt-4-vision-preview";
    std::string out;
    std::string cache;
    std::string masks;
    int workers = 1;
    int grid_rows = 8, grid_cols = 8;
    int slic_segments = 60;
    double slic_compactness = 20.0;
    int slic_iterations = 10;
    int min_area = 600;
    int max_area = 120000;
    double constant_score = 0.5;
    double rpm = 0.0;
    std::string base_url = "https://api.openai.com";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_backend) {
    cmd->add_option("--dataset", o.dataset, "Dataset root directory or manifest CSV")->required();
    cmd->add_option("--kind", o.kind, "Dataset kind: mvtec|manifest|synthetic");
    cmd->add_option("--categories", o.categories, "Restrict to these categories");
    cmd->add_option("--method", o.method, "Division method: grid|superpixel|imported");
    cmd->add_option("--out", o.out, "Output directory")->required();
    cmd->add_option("--workers", o.workers, "Concurrent sample workers");
    cmd->add_option("--masks", o.masks, "Imported division masks root ({masks}/{sample_id}/*.png)");
    cmd->add_option("--grid-rows", o.grid_rows, "Grid rows");
    cmd->add_option("--grid-cols", o.grid_cols, "Grid columns");
    cmd->add_option("--segments", o.slic_segments, "Superpixel segment count");
    cmd->add_option("--compactness", o.slic_compactness, "Superpixel compactness");
    cmd->add_option("--iterations", o.slic_iterations, "Superpixel iterations");
    cmd->add_option("--min-area", o.min_area, "Region area lower bound");
    cmd->add_option("--max-area", o.max_area, "Region area upper bound");
    if (needs_backend) {
        cmd->add_option("--backend", o.backend, "Backend: live|replay|oracle|constant");
        cmd->add_option("--model", o.model, "Model identifier for live queries and cache keys");
        cmd->add_option("--cache", o.cache, "Recorded cache file for the replay backend");
        cmd->add_option("--constant-score", o.constant_score, "Score for the constant backend");
        cmd->add_option("--rpm", o.rpm, "Live requests-per-minute limit (0 = unlimited)");
        cmd->add_option("--base-url", o.base_url, "Live API base URL");
    }
}

vqad::RunConfig to_config(const CommonOpts& o) {
    vqad::RunConfig cfg;
    cfg.dataset.root = o.dataset;
    cfg.dataset.kind = vqad::dataset_kind_from_string(o.kind);
    cfg.dataset.categories = o.categories;
    cfg.division.method = vqad::division_method_from_string(o.method);
    cfg.division.grid_rows = o.grid_rows;
    cfg.division.grid_cols = o.grid_cols;
    cfg.division.slic_segments = o.slic_segments;
    cfg.division.slic_compactness = o.slic_compactness;
    cfg.division.slic_iterations = o.slic_iterations;
    cfg.division.min_area = o.min_area;
    cfg.division.max_area = o.max_area;
    cfg.backend = vqad::backend_kind_from_string(o.backend);
    cfg.model_id = o.model;
    cfg.constant_score = o.constant_score;
    cfg.out_dir = o.out;
    cfg.cache_path = o.cache;
    cfg.masks_root = o.masks;
    cfg.workers = o.workers;
    cfg.live.requests_per_minute = o.rpm;
    cfg.live.base_url = o.base_url;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot visual anomaly detection through region-grounded VQA backends"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --config appear after the subcommand name
    app.set_config("--config", "", "TOML config file; keys live in a [subcommand] section, flags override");

    CommonOpts divide_opts, run_opts, trials_opts;
    std::string eval_dir, viz_dir;
    int trials_n = 2;

    auto* divide = app.add_subcommand("divide", "Write fused overlays and region-id rasters");
    add_common(divide, divide_opts, false);

    auto* run = app.add_subcommand("run", "Full pipeline: divide, prompt, query, parse, map");
    add_common(run, run_opts, true);

    auto* eval = app.add_subcommand("eval", "Compute the metric report for a completed run");
    eval->add_option("run_dir", eval_dir, "Run directory produced by `run`")->required();

    auto* viz = app.add_subcommand("visualize", "Write side-by-side panels for a completed run");
    viz->add_option("run_dir", viz_dir, "Run directory produced by `run`")->required();

    auto* trials = app.add_subcommand("trials", "Repeat the pipeline and report output stability");
    add_common(trials, trials_opts, true);
    trials->add_option("--trials", trials_n, "Number of repetitions");

    vqad::SynthConfig synth_cfg;
    std::string synth_out;
    int defect_min = 0, defect_max = 2, radius_min = 6, radius_max = 20;
    std::string synth_background = "noise";
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic defect dataset");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", synth_cfg.seed, "RNG seed");
    synth->add_option("--count", synth_cfg.image_count, "Number of images");
    synth->add_option("--size", synth_cfg.image_size, "Image side length");
    synth->add_option("--defects-min", defect_min, "Minimum defects per image");
    synth->add_option("--defects-max", defect_max, "Maximum defects per image");
    synth->add_option("--radius-min", radius_min, "Minimum defect radius");
    synth->add_option("--radius-max", radius_max, "Maximum defect radius");
    synth->add_option("--background", synth_background, "Background: flat|noise");

    CLI11_PARSE(app, argc, argv);

    try {
        if (divide->parsed()) {
            vqad::cmd_divide(to_config(divide_opts));
        } else if (run->parsed()) {
            const auto summary = vqad::cmd_run(to_config(run_opts));
            std::printf("processed %d samples, %d failed; outputs in %s\n", summary.total,
                        summary.failed, summary.run_dir.string().c_str());
        } else if (eval->parsed()) {
            const auto report = vqad::cmd_eval(eval_dir);
            std::fputs(vqad::report_csv_string(report).c_str(), stdout);
        } else if (viz->parsed()) {
            vqad::cmd_visualize(viz_dir);
        } else if (trials->parsed()) {
            const auto report = vqad::cmd_trials(to_config(trials_opts), trials_n);
            std::printf("stability report: %s\n", report.stability_csv.string().c_str());
        } else if (synth->parsed()) {
            synth_cfg.defect_count_range = {defect_min, defect_max};
            synth_cfg.defect_radius_range = {radius_min, radius_max};
            synth_cfg.background = synth_background == "flat" ? vqad::SynthConfig::Background::flat
                                                              : vqad::SynthConfig::Background::noise;
            const auto manifest = vqad::generate_synthetic(synth_cfg, synth_out);
            std::printf("manifest: %s\n", manifest.string().c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
