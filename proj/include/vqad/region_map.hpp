#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vqad/image.hpp"

namespace vqad {

struct RegionRecord {
    std::uint16_t id = 0;
    int area = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    int anchor_x = 0, anchor_y = 0; // interior pixel used for numeral placement

    bool operator==(const RegionRecord&) const = default;
};

/// Per-pixel region labeling. Label 0 is background; region ids run
/// contiguously from 1 and each region is 4-connected.
struct RegionMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> labels;
    std::vector<RegionRecord> regions;

    int region_count() const { return static_cast<int>(regions.size()); }
    std::uint16_t label_at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

    // Throws errc::invalid_input when any structural invariant is violated:
    // label range, contiguous ids, record/raster agreement, 4-connectivity,
    // anchors inside their regions.
    void validate() const;
};

// Rebuilds per-region records (area, bbox, anchor) from a label raster whose
// nonzero labels are contiguous 1..K.
std::vector<RegionRecord> build_region_records(const std::vector<std::uint16_t>& labels, int width, int height);

RegionMap make_region_map(int width, int height, std::vector<std::uint16_t> labels);

// L1 distance from each pixel to the nearest differently-labeled pixel or to
// the frame edge. Pixels on a label boundary get 1.
std::vector<std::int32_t> boundary_distance(const std::vector<std::uint16_t>& labels, int width, int height);

// Interior pixel of region `id` maximizing boundary distance; ties broken by
// smallest (y, x).
std::pair<int, int> label_anchor(const RegionMap& rm, std::uint16_t id);

} // namespace vqad
