#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vqad/image.hpp"
#include "vqad/scores.hpp"

namespace vqad {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> labels; // 0 or 1
};

// Mann-Whitney AU-ROC: (concordant + 0.5 * tied) / (P * N).
double auroc(const ScoredSet& s);

// Sum of (delta recall * precision) over descending-score cut points, tied
// scores processed as one group.
double average_precision(const ScoredSet& s);

// Maximum F1 over thresholds at every distinct score (positive when
// score >= threshold).
double f1_max(const ScoredSet& s);

struct ProCurve {
    std::vector<std::pair<double, double>> points; // (FPR, mean PRO), FPR ascending
    double integration_limit = 0.3;
};

// Per-region-overlap vs FPR, integrated to `limit` and normalized. GT
// components use 8-connectivity; thresholds sweep the union of 200 score
// quantiles; prediction at threshold t is score > t.
double aupro(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts, double limit = 0.3);

// Same metric on an explicit descending threshold set.
double aupro_with_thresholds(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts,
                             const std::vector<float>& thresholds, double limit,
                             ProCurve* curve_out = nullptr);

struct PixelMetrics {
    double auroc = 0.0;
    double ap = 0.0;
    double f1max = 0.0;
};

// Metrics over the flattened pixel population. Exact when the population is
// at most 2^24 pixels; larger populations use a 16384-bin score histogram
// (absolute deviation <= 1e-3).
PixelMetrics pixel_metrics(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts);
PixelMetrics pixel_metrics_exact(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts);
PixelMetrics pixel_metrics_histogram(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts);

struct CategoryRow {
    std::string category;
    double image_auroc = 0.0, image_ap = 0.0, image_f1max = 0.0;
    double pixel_auroc = 0.0, pixel_ap = 0.0, pixel_f1max = 0.0;
    double aupro = 0.0;
};

struct EvalReport {
    std::vector<CategoryRow> rows;
    CategoryRow average; // unweighted mean, category = "Average"
};

EvalReport aggregate(std::vector<CategoryRow> rows);

// CSV and JSON renderings carry identical content: the 7 metric columns as
// one-decimal percentages, one row per category plus the Average row.
void write_report_csv(const EvalReport& report, const std::filesystem::path& file);
void write_report_json(const EvalReport& report, const std::filesystem::path& file);
std::string report_csv_string(const EvalReport& report);
std::string report_json_string(const EvalReport& report);

} // namespace vqad
