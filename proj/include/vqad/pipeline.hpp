#pragma once

#include <filesystem>
#include <string>

#include "vqad/backend.hpp"
#include "vqad/data.hpp"
#include "vqad/metrics.hpp"
#include "vqad/regionize.hpp"

namespace vqad {

enum class BackendKind { live, replay, oracle, constant };

BackendKind backend_kind_from_string(const std::string& name);
std::string to_string(BackendKind k);

struct RunConfig {
    DatasetSpec dataset;
    DivisionConfig division;
    BackendKind backend = BackendKind::oracle;
    std::string model_id = "gpt-4-vision-preview";
    double constant_score = 0.5;
    std::filesystem::path out_dir;
    std::filesystem::path cache_path; // replay source
    std::filesystem::path masks_root; // imported divisions: {masks_root}/{sample_id}/*.png
    int workers = 1;
    int working_resolution = kWorkingResolution;
    LiveConfig live;

    void validate() const;
};

// Per-image fused overlay and 16-bit region-id raster under out_dir.
void cmd_divide(const RunConfig& cfg);

struct RunSummary {
    int total = 0;
    int failed = 0;
    std::filesystem::path run_dir;
};

// Full pipeline per sample: divide -> prompt -> query -> parse -> map.
// Persists raw responses, warnings, score JSON, 16-bit anomaly maps, a run
// ledger, and a response cache usable for replay. Individual sample failures
// are recorded and skipped; more than 10% failures aborts.
RunSummary cmd_run(const RunConfig& cfg);

// Per-category and Average metric rows from a completed run directory;
// writes report.csv and report.json there.
EvalReport cmd_eval(const std::filesystem::path& run_dir);

// Side-by-side panels: input | overlay | red-shaded anomaly map | GT mask.
void cmd_visualize(const std::filesystem::path& run_dir);

struct TrialsReport {
    int trials = 0;
    std::filesystem::path stability_csv;
};

// Repeats the pipeline n times per image; reports per-image standard
// deviation of the image score and mean pairwise Jaccard of mentioned
// region-id sets. Only meaningful for live or constant backends.
TrialsReport cmd_trials(const RunConfig& cfg, int n);

} // namespace vqad
