#include "vqad/region_map.hpp"

#include <algorithm>
#include <limits>

#include "vqad/error.hpp"

namespace vqad {

std::vector<std::int32_t> boundary_distance(const std::vector<std::uint16_t>& labels, int width, int height) {
    const std::size_t n = labels.size();
    const std::int32_t inf = std::numeric_limits<std::int32_t>::max() / 4;
    std::vector<std::int32_t> dist(n, inf);

    // Two-pass L1 chamfer. A neighbor with a different label contributes
    // distance 1; a same-label neighbor chains its own distance. The nearest
    // differently-labeled pixel always lies on a label-pure monotone path,
    // so the two passes are exact for the L1 metric.
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            std::int32_t d = inf;
            if (x == 0 || y == 0)
                d = 1;
            if (x > 0) {
                const std::size_t j = i - 1;
                d = std::min(d, labels[j] != labels[i] ? 1 : dist[j] + 1);
            }
            if (y > 0) {
                const std::size_t j = i - width;
                d = std::min(d, labels[j] != labels[i] ? 1 : dist[j] + 1);
            }
            dist[i] = d;
        }
    }
    for (int y = height - 1; y >= 0; --y) {
        for (int x = width - 1; x >= 0; --x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            std::int32_t d = dist[i];
            if (x == width - 1 || y == height - 1)
                d = std::min(d, 1);
            if (x < width - 1) {
                const std::size_t j = i + 1;
                d = std::min(d, labels[j] != labels[i] ? 1 : dist[j] + 1);
            }
            if (y < height - 1) {
                const std::size_t j = i + width;
                d = std::min(d, labels[j] != labels[i] ? 1 : dist[j] + 1);
            }
            dist[i] = d;
        }
    }
    return dist;
}

std::vector<RegionRecord> build_region_records(const std::vector<std::uint16_t>& labels, int width, int height) {
    std::uint16_t max_label = 0;
    for (std::uint16_t v : labels)
        max_label = std::max(max_label, v);

    std::vector<RegionRecord> records(max_label);
    for (std::uint16_t id = 1; id <= max_label; ++id) {
        auto& r = records[id - 1];
        r.id = id;
        r.min_x = width;
        r.min_y = height;
        r.max_x = -1;
        r.max_y = -1;
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::uint16_t id = labels[static_cast<std::size_t>(y) * width + x];
            if (id == 0)
                continue;
            auto& r = records[id - 1];
            ++r.area;
            r.min_x = std::min(r.min_x, x);
            r.min_y = std::min(r.min_y, y);
            r.max_x = std::max(r.max_x, x);
            r.max_y = std::max(r.max_y, y);
        }
    }
    for (const auto& r : records)
        if (r.area == 0)
            raise(errc::invalid_input, "label raster has a gap: id " + std::to_string(r.id) + " never appears");

    // Anchor: maximal boundary distance, ties to the smallest (y, x).
    const auto dist = boundary_distance(labels, width, height);
    std::vector<std::int32_t> best(max_label, 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const std::uint16_t id = labels[i];
            if (id == 0)
                continue;
            if (dist[i] > best[id - 1]) {
                best[id - 1] = dist[i];
                records[id - 1].anchor_x = x;
                records[id - 1].anchor_y = y;
            }
        }
    }
    return records;
}

RegionMap make_region_map(int width, int height, std::vector<std::uint16_t> labels) {
    if (width <= 0 || height <= 0 || labels.size() != static_cast<std::size_t>(width) * height)
        raise(errc::invalid_input, "make_region_map: dimension/label size mismatch");
    RegionMap rm;
    rm.width = width;
    rm.height = height;
    rm.labels = std::move(labels);
    rm.regions = build_region_records(rm.labels, width, height);
    return rm;
}

std::pair<int, int> label_anchor(const RegionMap& rm, std::uint16_t id) {
    if (id == 0 || id > rm.regions.size())
        raise(errc::invalid_input, "label_anchor: unknown region id " + std::to_string(id));
    const auto& r = rm.regions[id - 1];
    return {r.anchor_x, r.anchor_y};
}

void RegionMap::validate() const {
    if (width <= 0 || height <= 0 || labels.size() != static_cast<std::size_t>(width) * height)
        raise(errc::invalid_input, "RegionMap: dimension/label size mismatch");

    const std::size_t k = regions.size();
    for (std::size_t i = 0; i < k; ++i)
        if (regions[i].id != i + 1)
            raise(errc::invalid_input, "RegionMap: region ids not contiguous from 1");

    for (std::uint16_t v : labels)
        if (v > k)
            raise(errc::invalid_input, "RegionMap: label " + std::to_string(v) + " out of range");

    const auto rebuilt = build_region_records(labels, width, height);
    if (rebuilt.size() != k)
        raise(errc::invalid_input, "RegionMap: region count disagrees with raster");
    for (std::size_t i = 0; i < k; ++i) {
        const auto& a = regions[i];
        const auto& b = rebuilt[i];
        if (a.area != b.area || a.min_x != b.min_x || a.min_y != b.min_y || a.max_x != b.max_x ||
            a.max_y != b.max_y)
            raise(errc::invalid_input, "RegionMap: record for id " + std::to_string(a.id) + " disagrees with raster");
        if (a.anchor_x < 0 || a.anchor_x >= width || a.anchor_y < 0 || a.anchor_y >= height ||
            label_at(a.anchor_x, a.anchor_y) != a.id)
            raise(errc::invalid_input, "RegionMap: anchor of id " + std::to_string(a.id) + " outside its region");
    }

    // 4-connectivity: one BFS per region must cover its full area.
    std::vector<std::uint8_t> seen(labels.size(), 0);
    std::vector<std::size_t> stack;
    std::vector<int> covered(k, 0);
    for (std::size_t start = 0; start < labels.size(); ++start) {
        const std::uint16_t id = labels[start];
        if (id == 0 || seen[start])
            continue;
        if (covered[id - 1] > 0)
            raise(errc::invalid_input, "RegionMap: region " + std::to_string(id) + " is not 4-connected");
        stack.push_back(start);
        seen[start] = 1;
        int count = 0;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++count;
            const int x = static_cast<int>(i % width);
            const int y = static_cast<int>(i / width);
            const std::array<std::pair<int, int>, 4> nbrs{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= width || ny >= height)
                    continue;
                const std::size_t j = static_cast<std::size_t>(ny) * width + nx;
                if (!seen[j] && labels[j] == id) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        covered[id - 1] = count;
    }
}

} // namespace vqad
