#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vqad/image.hpp"
#include "vqad/region_map.hpp"

namespace vqad {

enum class DivisionMethod { grid, superpixel, imported };

DivisionMethod division_method_from_string(const std::string& name);
std::string to_string(DivisionMethod m);

struct DivisionConfig {
    DivisionMethod method = DivisionMethod::superpixel;
    int grid_rows = 8;
    int grid_cols = 8;
    int slic_segments = 60;
    double slic_compactness = 20.0;
    int slic_iterations = 10;
    int min_area = 600;
    int max_area = 120000;
    std::array<std::uint8_t, 3> border_color{255, 255, 255};

    void validate() const; // throws errc::invalid_input
};

// rows x cols rectangular tiling; the trailing remainder columns/rows are one
// pixel wider so cell sizes differ by at most 1. Ids are row-major from 1.
RegionMap grid_divide(int width, int height, int rows, int cols);

// Localized k-means over CIELAB + position. Optional per-iteration energy
// trace (sum of squared distances after each assign+update round).
struct SlicTrace {
    std::vector<double> iteration_energy;
};
RegionMap slic_divide(const ImageBuffer& img, const DivisionConfig& cfg, SlicTrace* trace = nullptr);

// Rasterizes masks in file order (later masks overwrite earlier on overlap);
// each mask's 4-connected components become separate regions.
RegionMap import_regions(const std::vector<Mask>& masks);

// Regions outside [min_area, max_area] drop to background; survivors are
// renumbered contiguously from 1 preserving order.
RegionMap filter_regions(const RegionMap& rm, int min_area, int max_area);

// 1 where a region pixel has a 4-neighbor with a different label or sits on
// the frame edge.
std::vector<std::uint8_t> boundary_mask(const RegionMap& rm);

// Draws region ids as 5x7 digit glyphs (black on a 1-px white halo), centered
// on each region's anchor and clipped to the region bbox. Returns the set of
// painted pixel offsets.
std::vector<std::size_t> draw_region_labels(ImageBuffer& img, const RegionMap& rm);

// Boundary recoloring plus numeral glyphs; all other pixels are bit-identical
// to the input.
ImageBuffer render_overlay(const ImageBuffer& img, const RegionMap& rm, const DivisionConfig& cfg);

} // namespace vqad
