#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace vqad {

/// Parsed per-region anomaly scores; keys reference region ids of the
/// associated RegionMap, values are clamped to [0, 1].
struct RegionScores {
    std::map<std::uint16_t, double> entries;

    bool empty() const { return entries.empty(); }

    bool operator==(const RegionScores&) const = default;
};

/// Per-pixel anomaly scores in [0, 1]; every pixel of a region holds that
/// region's score, background holds 0.
struct AnomalyMap {
    int width = 0;
    int height = 0;
    std::vector<float> scores;

    AnomalyMap() = default;
    AnomalyMap(int w, int h) : width(w), height(h), scores(static_cast<std::size_t>(w) * h, 0.0f) {}

    float at(int x, int y) const { return scores[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const AnomalyMap&) const = default;
};

} // namespace vqad
