#include "vqad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vqad/error.hpp"
#include "vqad/kernels/kernels.hpp"

namespace vqad {

namespace {

struct Counts {
    std::int64_t pos = 0;
    std::int64_t neg = 0;
};

Counts count_classes(const ScoredSet& s) {
    if (s.scores.size() != s.labels.size())
        raise(errc::invalid_input, "ScoredSet: scores/labels length mismatch");
    Counts c;
    for (int l : s.labels)
        (l ? c.pos : c.neg)++;
    return c;
}

// Indices sorted by descending score; tied scores grouped.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

} // namespace

double auroc(const ScoredSet& s) {
    const Counts c = count_classes(s);
    if (c.pos == 0 || c.neg == 0)
        raise(errc::undefined_metric, "auroc needs at least one positive and one negative");

    const auto idx = descending_order(s.scores);
    // Mann-Whitney with 0.5 credit for ties, accumulated per tie group.
    double concordant = 0;
    std::int64_t neg_seen = 0; // negatives with strictly higher score
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        std::int64_t group_pos = 0, group_neg = 0;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) {
            (s.labels[idx[j]] ? group_pos : group_neg)++;
            ++j;
        }
        concordant += static_cast<double>(group_pos) *
                      (static_cast<double>(c.neg - neg_seen - group_neg) + 0.5 * group_neg);
        neg_seen += group_neg;
        i = j;
    }
    return concordant / (static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

double average_precision(const ScoredSet& s) {
    const Counts c = count_classes(s);
    if (c.pos == 0)
        raise(errc::undefined_metric, "average_precision needs at least one positive");

    const auto idx = descending_order(s.scores);
    double ap = 0;
    std::int64_t tp = 0, fp = 0;
    double prev_recall = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) {
            (s.labels[idx[j]] ? tp : fp)++;
            ++j;
        }
        const double recall = static_cast<double>(tp) / c.pos;
        const double precision = static_cast<double>(tp) / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double f1_max(const ScoredSet& s) {
    const Counts c = count_classes(s);
    if (c.pos == 0)
        raise(errc::undefined_metric, "f1_max needs at least one positive");

    const auto idx = descending_order(s.scores);
    double best = 0;
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) {
            (s.labels[idx[j]] ? tp : fp)++;
            ++j;
        }
        // Threshold at this score: everything seen so far predicts positive.
        const double f1 = 2.0 * tp / (static_cast<double>(tp + fp) + c.pos);
        best = std::max(best, f1);
        i = j;
    }
    return best;
}

namespace {

// 8-connected components over all GT masks; returns per-component pixel
// index lists (indices into the per-image flattened rasters).
struct GtComponents {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> comps; // (image, pixel)
    std::int64_t gt_pixels = 0;
};

GtComponents gt_components(const std::vector<Mask>& gts) {
    GtComponents out;
    for (std::size_t img = 0; img < gts.size(); ++img) {
        const Mask& gt = gts[img];
        const int w = gt.width, h = gt.height;
        std::vector<std::uint8_t> seen(gt.data.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t start = 0; start < gt.data.size(); ++start) {
            if (!gt.data[start] || seen[start])
                continue;
            out.comps.emplace_back();
            auto& comp = out.comps.back();
            seen[start] = 1;
            stack.push_back(start);
            while (!stack.empty()) {
                const std::size_t i = stack.back();
                stack.pop_back();
                comp.emplace_back(img, i);
                ++out.gt_pixels;
                const int x = static_cast<int>(i % w);
                const int y = static_cast<int>(i / w);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy)
                            continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                        if (gt.data[j] && !seen[j]) {
                            seen[j] = 1;
                            stack.push_back(j);
                        }
                    }
                }
            }
        }
    }
    return out;
}

void check_paired(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts) {
    if (maps.size() != gts.size() || maps.empty())
        raise(errc::invalid_input, "anomaly maps and GT masks must pair up");
    for (std::size_t i = 0; i < maps.size(); ++i)
        if (maps[i].width != gts[i].width || maps[i].height != gts[i].height)
            raise(errc::invalid_input, "anomaly map and GT mask dimensions disagree");
}

} // namespace

double aupro_with_thresholds(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts,
                             const std::vector<float>& thresholds, double limit, ProCurve* curve_out) {
    check_paired(maps, gts);
    const GtComponents gc = gt_components(gts);
    if (gc.comps.empty())
        raise(errc::undefined_metric, "aupro needs at least one GT component");

    std::int64_t total_pixels = 0;
    for (const auto& m : maps)
        total_pixels += static_cast<std::int64_t>(m.scores.size());
    const std::int64_t negatives = total_pixels - gc.gt_pixels;
    if (negatives <= 0)
        raise(errc::undefined_metric, "aupro needs at least one non-GT pixel");

    // Component scores gathered once; the per-threshold sweep then counts
    // score > t within each component and over all pixels.
    std::vector<std::vector<float>> comp_scores(gc.comps.size());
    for (std::size_t c = 0; c < gc.comps.size(); ++c) {
        comp_scores[c].reserve(gc.comps[c].size());
        for (const auto& [img, px] : gc.comps[c])
            comp_scores[c].push_back(maps[img].scores[px]);
    }

    const auto& kt = kernels::active();
    std::vector<std::pair<double, double>> points; // (FPR, PRO)
    for (const float t : thresholds) {
        double pro_sum = 0;
        std::int64_t pred_gt = 0;
        for (const auto& cs : comp_scores) {
            const std::size_t hit = kt.count_gt(cs.data(), cs.size(), t);
            pro_sum += static_cast<double>(hit) / cs.size();
            pred_gt += static_cast<std::int64_t>(hit);
        }
        std::int64_t pred_total = 0;
        for (const auto& m : maps)
            pred_total += static_cast<std::int64_t>(kt.count_gt(m.scores.data(), m.scores.size(), t));
        const double fpr = static_cast<double>(pred_total - pred_gt) / negatives;
        points.emplace_back(fpr, pro_sum / gc.comps.size());
    }

    std::sort(points.begin(), points.end());
    // Collapse equal FPRs to the best PRO reached there.
    std::vector<std::pair<double, double>> curve;
    for (const auto& p : points) {
        if (!curve.empty() && curve.back().first == p.first)
            curve.back().second = std::max(curve.back().second, p.second);
        else
            curve.push_back(p);
    }
    if (curve.empty() || curve.front().first > 0.0)
        curve.insert(curve.begin(), {0.0, 0.0});

    if (curve_out) {
        curve_out->points = curve;
        curve_out->integration_limit = limit;
    }

    // Trapezoid up to the limit; the curve extends flat past its last point.
    double area = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto [x0, y0] = curve[i - 1];
        auto [x1, y1] = curve[i];
        if (x0 >= limit)
            break;
        if (x1 > limit) {
            y1 = y0 + (y1 - y0) * (limit - x0) / (x1 - x0);
            x1 = limit;
        }
        area += 0.5 * (y0 + y1) * (x1 - x0);
    }
    const double last_x = std::min(curve.back().first, limit);
    if (last_x < limit)
        area += curve.back().second * (limit - last_x);
    return area / limit;
}

double aupro(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts, double limit) {
    check_paired(maps, gts);
    // Thresholds: union of 200 nearest-rank quantiles of the pooled scores.
    std::vector<float> pool;
    std::int64_t total = 0;
    for (const auto& m : maps)
        total += static_cast<std::int64_t>(m.scores.size());
    pool.reserve(total);
    for (const auto& m : maps)
        pool.insert(pool.end(), m.scores.begin(), m.scores.end());
    std::sort(pool.begin(), pool.end());

    std::vector<float> thresholds;
    thresholds.reserve(200);
    for (int i = 0; i < 200; ++i) {
        const std::size_t rank = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) / 199.0 * (pool.size() - 1)));
        thresholds.push_back(pool[rank]);
    }
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    return aupro_with_thresholds(maps, gts, thresholds, limit, nullptr);
}

namespace {

constexpr std::int64_t kExactPixelLimit = std::int64_t{1} << 24;
constexpr int kHistogramBins = 16384;

struct BinnedCounts {
    std::vector<std::int64_t> pos;
    std::vector<std::int64_t> neg;
    std::int64_t pos_total = 0;
    std::int64_t neg_total = 0;
};

// Metrics on grouped counts, iterating score groups in descending order.
PixelMetrics metrics_from_groups(const BinnedCounts& b) {
    if (b.pos_total == 0 || b.neg_total == 0)
        raise(errc::undefined_metric, "pixel metrics need both classes present");

    double concordant = 0;
    std::int64_t neg_above = 0;
    double ap = 0;
    double prev_recall = 0;
    std::int64_t tp = 0, fp = 0;
    double best_f1 = 0;
    for (std::size_t g = b.pos.size(); g-- > 0;) {
        const std::int64_t p = b.pos[g], n = b.neg[g];
        if (p == 0 && n == 0)
            continue;
        concordant += static_cast<double>(p) *
                      (static_cast<double>(b.neg_total - neg_above - n) + 0.5 * static_cast<double>(n));
        neg_above += n;
        tp += p;
        fp += n;
        const double recall = static_cast<double>(tp) / b.pos_total;
        const double precision = static_cast<double>(tp) / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        best_f1 = std::max(best_f1, 2.0 * tp / (static_cast<double>(tp + fp) + b.pos_total));
    }
    PixelMetrics out;
    out.auroc = concordant / (static_cast<double>(b.pos_total) * static_cast<double>(b.neg_total));
    out.ap = ap;
    out.f1max = best_f1;
    return out;
}

} // namespace

PixelMetrics pixel_metrics_exact(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts) {
    check_paired(maps, gts);
    std::vector<std::pair<float, std::uint8_t>> all;
    std::size_t total = 0;
    for (const auto& m : maps)
        total += m.scores.size();
    all.reserve(total);
    for (std::size_t i = 0; i < maps.size(); ++i)
        for (std::size_t j = 0; j < maps[i].scores.size(); ++j)
            all.emplace_back(maps[i].scores[j], gts[i].data[j]);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // Distinct scores become groups; reuse the grouped-count path.
    BinnedCounts b;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        std::int64_t p = 0, n = 0;
        while (j < all.size() && all[j].first == all[i].first) {
            (all[j].second ? p : n)++;
            ++j;
        }
        b.pos.push_back(p);
        b.neg.push_back(n);
        b.pos_total += p;
        b.neg_total += n;
        i = j;
    }
    return metrics_from_groups(b);
}

PixelMetrics pixel_metrics_histogram(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts) {
    check_paired(maps, gts);
    BinnedCounts b;
    b.pos.assign(kHistogramBins, 0);
    b.neg.assign(kHistogramBins, 0);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = 0; j < maps[i].scores.size(); ++j) {
            const float s = maps[i].scores[j];
            const int bin = std::min(kHistogramBins - 1,
                                     std::max(0, static_cast<int>(s * kHistogramBins)));
            if (gts[i].data[j]) {
                ++b.pos[bin];
                ++b.pos_total;
            } else {
                ++b.neg[bin];
                ++b.neg_total;
            }
        }
    }
    return metrics_from_groups(b);
}

PixelMetrics pixel_metrics(const std::vector<AnomalyMap>& maps, const std::vector<Mask>& gts) {
    check_paired(maps, gts);
    std::int64_t total = 0;
    for (const auto& m : maps)
        total += static_cast<std::int64_t>(m.scores.size());
    return total <= kExactPixelLimit ? pixel_metrics_exact(maps, gts) : pixel_metrics_histogram(maps, gts);
}

EvalReport aggregate(std::vector<CategoryRow> rows) {
    if (rows.empty())
        raise(errc::invalid_input, "aggregate: no category rows");
    EvalReport report;
    report.rows = std::move(rows);
    CategoryRow avg;
    avg.category = "Average";
    for (const auto& r : report.rows) {
        avg.image_auroc += r.image_auroc;
        avg.image_ap += r.image_ap;
        avg.image_f1max += r.image_f1max;
        avg.pixel_auroc += r.pixel_auroc;
        avg.pixel_ap += r.pixel_ap;
        avg.pixel_f1max += r.pixel_f1max;
        avg.aupro += r.aupro;
    }
    const double inv = 1.0 / report.rows.size();
    avg.image_auroc *= inv;
    avg.image_ap *= inv;
    avg.image_f1max *= inv;
    avg.pixel_auroc *= inv;
    avg.pixel_ap *= inv;
    avg.pixel_f1max *= inv;
    avg.aupro *= inv;
    report.average = avg;
    return report;
}

} // namespace vqad
