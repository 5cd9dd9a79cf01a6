#include "vqad/regionize.hpp"

#include <algorithm>

#include "vqad/error.hpp"

namespace vqad {

DivisionMethod division_method_from_string(const std::string& name) {
    if (name == "grid") return DivisionMethod::grid;
    if (name == "superpixel") return DivisionMethod::superpixel;
    if (name == "imported") return DivisionMethod::imported;
    raise(errc::invalid_input, "unknown division method: " + name);
}

std::string to_string(DivisionMethod m) {
    switch (m) {
    case DivisionMethod::grid: return "grid";
    case DivisionMethod::superpixel: return "superpixel";
    case DivisionMethod::imported: return "imported";
    }
    return "?";
}

void DivisionConfig::validate() const {
    if (min_area >= max_area)
        raise(errc::invalid_input, "DivisionConfig: min_area must be below max_area");
    if (slic_segments < 2)
        raise(errc::invalid_input, "DivisionConfig: slic_segments must be at least 2");
    if (slic_compactness <= 0)
        raise(errc::invalid_input, "DivisionConfig: slic_compactness must be positive");
    if (slic_iterations < 1)
        raise(errc::invalid_input, "DivisionConfig: slic_iterations must be at least 1");
    if (grid_rows < 1 || grid_cols < 1)
        raise(errc::invalid_input, "DivisionConfig: grid shape must be at least 1x1");
}

namespace {

// Cell edges for `count` cells across `extent`: the trailing `extent % count`
// cells are one pixel wider.
std::vector<int> cell_edges(int extent, int count) {
    const int base = extent / count;
    const int rem = extent % count;
    std::vector<int> edges(count + 1, 0);
    for (int i = 1; i <= count; ++i)
        edges[i] = edges[i - 1] + base + (i > count - rem ? 1 : 0);
    return edges;
}

} // namespace

RegionMap grid_divide(int width, int height, int rows, int cols) {
    if (width <= 0 || height <= 0)
        raise(errc::invalid_input, "grid_divide: empty frame");
    if (rows < 1 || cols < 1 || rows > height || cols > width)
        raise(errc::invalid_input, "grid_divide: grid shape exceeds frame dimensions");

    const auto xs = cell_edges(width, cols);
    const auto ys = cell_edges(height, rows);
    std::vector<std::uint16_t> labels(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::uint16_t id = static_cast<std::uint16_t>(r * cols + c + 1);
            for (int y = ys[r]; y < ys[r + 1]; ++y)
                for (int x = xs[c]; x < xs[c + 1]; ++x)
                    labels[static_cast<std::size_t>(y) * width + x] = id;
        }
    }
    return make_region_map(width, height, std::move(labels));
}

namespace {

// 4-connected component labeling restricted to pixels where owner == index.
// Appends one region per component, in scan order.
void append_components(const std::vector<int>& owner, int index, int width, int height,
                       std::vector<std::uint16_t>& labels, int& next_id) {
    const std::size_t n = owner.size();
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (owner[start] != index || labels[start] != 0)
            continue;
        if (next_id > 65535)
            raise(errc::invalid_input, "import_regions: more than 65535 regions");
        const std::uint16_t id = static_cast<std::uint16_t>(next_id++);
        labels[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % width);
            const int y = static_cast<int>(i / width);
            const std::array<std::pair<int, int>, 4> nbrs{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= width || ny >= height)
                    continue;
                const std::size_t j = static_cast<std::size_t>(ny) * width + nx;
                if (owner[j] == index && labels[j] == 0) {
                    labels[j] = id;
                    stack.push_back(j);
                }
            }
        }
    }
}

} // namespace

RegionMap import_regions(const std::vector<Mask>& masks) {
    if (masks.empty()) {
        RegionMap rm;
        rm.width = kWorkingResolution;
        rm.height = kWorkingResolution;
        rm.labels.assign(static_cast<std::size_t>(rm.width) * rm.height, 0);
        return rm;
    }
    const int width = masks.front().width;
    const int height = masks.front().height;
    for (const auto& m : masks)
        if (m.width != width || m.height != height)
            raise(errc::invalid_input, "import_regions: mask dimensions disagree");

    // Later masks overwrite earlier ones, then each mask's surviving pixels
    // split into 4-connected components.
    std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
    for (std::size_t m = 0; m < masks.size(); ++m)
        for (std::size_t i = 0; i < owner.size(); ++i)
            if (masks[m].data[i])
                owner[i] = static_cast<int>(m);

    std::vector<std::uint16_t> labels(owner.size(), 0);
    int next_id = 1;
    for (std::size_t m = 0; m < masks.size(); ++m)
        append_components(owner, static_cast<int>(m), width, height, labels, next_id);
    return make_region_map(width, height, std::move(labels));
}

RegionMap filter_regions(const RegionMap& rm, int min_area, int max_area) {
    std::vector<std::uint16_t> remap(rm.regions.size() + 1, 0);
    std::uint16_t next = 1;
    for (const auto& r : rm.regions)
        if (r.area >= min_area && r.area <= max_area)
            remap[r.id] = next++;

    std::vector<std::uint16_t> labels(rm.labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = remap[rm.labels[i]];
    return make_region_map(rm.width, rm.height, std::move(labels));
}

std::vector<std::uint8_t> boundary_mask(const RegionMap& rm) {
    const int w = rm.width, h = rm.height;
    std::vector<std::uint8_t> out(rm.labels.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const std::uint16_t id = rm.labels[i];
            if (id == 0)
                continue;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
                out[i] = 1;
                continue;
            }
            if (rm.labels[i - 1] != id || rm.labels[i + 1] != id || rm.labels[i - w] != id ||
                rm.labels[i + w] != id)
                out[i] = 1;
        }
    }
    return out;
}

ImageBuffer render_overlay(const ImageBuffer& img, const RegionMap& rm, const DivisionConfig& cfg) {
    if (img.width != rm.width || img.height != rm.height)
        raise(errc::invalid_input, "render_overlay: image and region map dimensions disagree");

    ImageBuffer out = img;
    const auto boundary = boundary_mask(rm);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        if (boundary[i]) {
            out.pixels[3 * i] = cfg.border_color[0];
            out.pixels[3 * i + 1] = cfg.border_color[1];
            out.pixels[3 * i + 2] = cfg.border_color[2];
        }
    }
    draw_region_labels(out, rm);
    return out;
}

} // namespace vqad
