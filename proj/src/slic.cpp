#include <algorithm>
#include <cmath>
#include <limits>

#include "vqad/color.hpp"
#include "vqad/error.hpp"
#include "vqad/kernels/kernels.hpp"
#include "vqad/regionize.hpp"

namespace vqad {

namespace {

struct Center {
    float l = 0, a = 0, b = 0, x = 0, y = 0;
};

// Lab-space gradient magnitude; used only for the 3x3 seed perturbation.
float gradient_at(const LabPlanes& lab, int x, int y) {
    const int w = lab.width, h = lab.height;
    const int xl = std::max(0, x - 1), xr = std::min(w - 1, x + 1);
    const int yu = std::max(0, y - 1), yd = std::min(h - 1, y + 1);
    auto at = [&](const std::vector<float>& p, int px, int py) {
        return p[static_cast<std::size_t>(py) * w + px];
    };
    float g = 0;
    for (const auto* plane : {&lab.L, &lab.A, &lab.B}) {
        const float gx = at(*plane, xr, y) - at(*plane, xl, y);
        const float gy = at(*plane, x, yd) - at(*plane, x, yu);
        g += gx * gx + gy * gy;
    }
    return g;
}

std::vector<Center> init_centers(const LabPlanes& lab, int k) {
    const int w = lab.width, h = lab.height;
    int nx = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k) * w / h))));
    nx = std::min(nx, w);
    int ny = std::max(1, static_cast<int>(std::ceil(static_cast<double>(k) / nx)));
    ny = std::min(ny, h);

    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int cx = static_cast<int>((i + 0.5) * w / nx);
            int cy = static_cast<int>((j + 0.5) * h / ny);
            cx = std::clamp(cx, 0, w - 1);
            cy = std::clamp(cy, 0, h - 1);

            // Move to the lowest-gradient pixel in the 3x3 neighborhood;
            // strict improvement keeps the seed put on flat patches.
            float best_g = gradient_at(lab, cx, cy);
            int bx = cx, by = cy;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int px = cx + dx, py = cy + dy;
                    if (px < 0 || py < 0 || px >= w || py >= h)
                        continue;
                    const float g = gradient_at(lab, px, py);
                    if (g < best_g) {
                        best_g = g;
                        bx = px;
                        by = py;
                    }
                }
            }
            const std::size_t idx = static_cast<std::size_t>(by) * w + bx;
            centers.push_back({lab.L[idx], lab.A[idx], lab.B[idx],
                               static_cast<float>(bx), static_cast<float>(by)});
        }
    }
    return centers;
}

double energy(const LabPlanes& lab, const std::vector<Center>& centers,
              const std::vector<std::int32_t>& assignment, float spatial_w) {
    const int w = lab.width;
    double total = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const Center& c = centers[assignment[i]];
        const float dl = lab.L[i] - c.l;
        const float da = lab.A[i] - c.a;
        const float db = lab.B[i] - c.b;
        const float dx = static_cast<float>(i % w) - c.x;
        const float dy = static_cast<float>(i / w) - c.y;
        total += static_cast<double>(dl) * dl + static_cast<double>(da) * da +
                 static_cast<double>(db) * db +
                 (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * spatial_w;
    }
    return total;
}

// Orphan components merge into the adjacent region with the largest current
// area, in component scan order.
std::vector<std::uint16_t> enforce_connectivity(std::vector<std::int32_t> assignment, int w, int h,
                                                int cluster_count) {
    const std::size_t n = assignment.size();

    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::int64_t> comp_area;
    std::vector<std::int32_t> comp_cluster;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] >= 0)
            continue;
        const std::int32_t cid = static_cast<std::int32_t>(comp_area.size());
        const std::int32_t cluster = assignment[start];
        comp_area.push_back(0);
        comp_cluster.push_back(cluster);
        comp[start] = cid;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++comp_area[cid];
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            const std::array<std::pair<int, int>, 4> nbrs{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                    continue;
                const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (comp[j] < 0 && assignment[j] == cluster) {
                    comp[j] = cid;
                    stack.push_back(j);
                }
            }
        }
    }

    // Keep each cluster's largest component (first wins on area ties).
    std::vector<std::int32_t> keeper(cluster_count, -1);
    for (std::size_t c = 0; c < comp_area.size(); ++c) {
        const std::int32_t cluster = comp_cluster[c];
        if (keeper[cluster] < 0 || comp_area[c] > comp_area[keeper[cluster]])
            keeper[cluster] = static_cast<std::int32_t>(c);
    }

    // Current owner component per pixel; orphans reassign into neighbors.
    std::vector<std::int32_t> owner = comp;
    std::vector<std::int64_t> owner_area = comp_area;
    std::vector<std::vector<std::size_t>> comp_pixels(comp_area.size());
    for (std::size_t i = 0; i < n; ++i)
        comp_pixels[comp[i]].push_back(i);

    for (std::size_t c = 0; c < comp_area.size(); ++c) {
        if (keeper[comp_cluster[c]] == static_cast<std::int32_t>(c))
            continue;
        // Largest adjacent surviving component; ties to the smallest id.
        std::int32_t target = -1;
        for (const std::size_t i : comp_pixels[c]) {
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            const std::array<std::pair<int, int>, 4> nbrs{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                    continue;
                const std::int32_t oc = owner[static_cast<std::size_t>(ny) * w + nx];
                if (oc == static_cast<std::int32_t>(c) || oc == target)
                    continue;
                if (target < 0 || owner_area[oc] > owner_area[target] ||
                    (owner_area[oc] == owner_area[target] && oc < target))
                    target = oc;
            }
        }
        if (target < 0)
            continue; // single component covering the frame
        for (const std::size_t i : comp_pixels[c])
            owner[i] = target;
        owner_area[target] += comp_area[c];
        comp_pixels[target].insert(comp_pixels[target].end(), comp_pixels[c].begin(), comp_pixels[c].end());
        comp_pixels[c].clear();
        comp_area[c] = 0;
    }

    // Renumber surviving components 1..K in scan order of first appearance.
    std::vector<std::uint16_t> labels(n, 0);
    std::vector<std::uint16_t> relabel(comp_area.size(), 0);
    std::uint16_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t oc = owner[i];
        if (relabel[oc] == 0) {
            if (next == 65535)
                raise(errc::invalid_input, "slic_divide: more than 65535 regions");
            relabel[oc] = ++next;
        }
        labels[i] = relabel[oc];
    }
    return labels;
}

} // namespace

RegionMap slic_divide(const ImageBuffer& img, const DivisionConfig& cfg, SlicTrace* trace) {
    cfg.validate();
    if (img.empty())
        raise(errc::invalid_input, "slic_divide: empty image");
    const int w = img.width, h = img.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (static_cast<std::size_t>(cfg.slic_segments) > n)
        raise(errc::invalid_input, "slic_divide: more segments than pixels");

    const LabPlanes lab = rgb_to_lab(img);
    std::vector<Center> centers = init_centers(lab, cfg.slic_segments);
    const int k = static_cast<int>(centers.size());

    const float s = static_cast<float>(std::sqrt(static_cast<double>(n) / cfg.slic_segments));
    const float m = static_cast<float>(cfg.slic_compactness);
    const float spatial_w = (m / s) * (m / s);
    const int window = std::max(1, static_cast<int>(std::ceil(s)));

    // Initial assignment: nearest center in the plane, ties to the lowest
    // index. Keeps every pixel's current center defined from iteration one.
    std::vector<std::int32_t> assignment(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const float px = static_cast<float>(i % w);
        const float py = static_cast<float>(i / w);
        float best = std::numeric_limits<float>::infinity();
        std::int32_t best_c = 0;
        for (int c = 0; c < k; ++c) {
            const float dx = px - centers[c].x;
            const float dy = py - centers[c].y;
            const float d = dx * dx + dy * dy;
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        assignment[i] = best_c;
    }

    const auto& kt = kernels::active();
    std::vector<float> best_dist(n);
    std::vector<double> sum_l(k), sum_a(k), sum_b(k), sum_x(k), sum_y(k);
    std::vector<std::int64_t> count(k);

    for (int iter = 0; iter < cfg.slic_iterations; ++iter) {
        // Seed each pixel with the distance to its current center so the
        // incumbent always competes, even when no window covers the pixel.
        for (std::size_t i = 0; i < n; ++i) {
            const Center& c = centers[assignment[i]];
            const float dl = lab.L[i] - c.l;
            const float da = lab.A[i] - c.a;
            const float db = lab.B[i] - c.b;
            const float dx = static_cast<float>(i % w) - c.x;
            const float dy = static_cast<float>(i / w) - c.y;
            const float color = (dl * dl + da * da) + db * db;
            best_dist[i] = color + (dx * dx + dy * dy) * spatial_w;
        }

        for (int c = 0; c < k; ++c) {
            const int x0 = std::max(0, static_cast<int>(centers[c].x) - window);
            const int x1 = std::min(w, static_cast<int>(centers[c].x) + window + 1);
            const int y0 = std::max(0, static_cast<int>(centers[c].y) - window);
            const int y1 = std::min(h, static_cast<int>(centers[c].y) + window + 1);
            for (int y = y0; y < y1; ++y)
                kt.slic_assign_row(lab.L.data(), lab.A.data(), lab.B.data(), x0, x1, y, w,
                                   centers[c].l, centers[c].a, centers[c].b, centers[c].x,
                                   centers[c].y, spatial_w, best_dist.data(), assignment.data(), c);
        }

        std::fill(sum_l.begin(), sum_l.end(), 0.0);
        std::fill(sum_a.begin(), sum_a.end(), 0.0);
        std::fill(sum_b.begin(), sum_b.end(), 0.0);
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_y.begin(), sum_y.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::int32_t c = assignment[i];
            sum_l[c] += lab.L[i];
            sum_a[c] += lab.A[i];
            sum_b[c] += lab.B[i];
            sum_x[c] += static_cast<double>(i % w);
            sum_y[c] += static_cast<double>(i / w);
            ++count[c];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] == 0)
                continue; // emptied cluster keeps its last position
            const double inv = 1.0 / count[c];
            centers[c].l = static_cast<float>(sum_l[c] * inv);
            centers[c].a = static_cast<float>(sum_a[c] * inv);
            centers[c].b = static_cast<float>(sum_b[c] * inv);
            centers[c].x = static_cast<float>(sum_x[c] * inv);
            centers[c].y = static_cast<float>(sum_y[c] * inv);
        }

        if (trace)
            trace->iteration_energy.push_back(energy(lab, centers, assignment, spatial_w));
    }

    auto labels = enforce_connectivity(std::move(assignment), w, h, k);
    return make_region_map(w, h, std::move(labels));
}

} // namespace vqad
