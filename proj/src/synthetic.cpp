#include <algorithm>
#include <fstream>
#include <random>

#include "vqad/data.hpp"
#include "vqad/error.hpp"
#include "vqad/image.hpp"
#include "vqad/png_io.hpp"

namespace vqad {

namespace fs = std::filesystem;

namespace {

struct Defect {
    int cx, cy, rx, ry;
    int delta; // +-40
};

bool inside(const Defect& d, int x, int y) {
    const double nx = static_cast<double>(x - d.cx) / d.rx;
    const double ny = static_cast<double>(y - d.cy) / d.ry;
    return nx * nx + ny * ny <= 1.0;
}

} // namespace

fs::path generate_synthetic(const SynthConfig& cfg, const fs::path& out_dir) {
    if (cfg.image_count < 1 || cfg.image_size < 8)
        raise(errc::invalid_input, "generate_synthetic: bad image count or size");
    if (cfg.defect_count_range.first < 0 || cfg.defect_count_range.second < cfg.defect_count_range.first)
        raise(errc::invalid_input, "generate_synthetic: bad defect count range");
    if (cfg.defect_radius_range.first < 1 || cfg.defect_radius_range.second < cfg.defect_radius_range.first)
        raise(errc::invalid_input, "generate_synthetic: bad defect radius range");

    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    fs::create_directories(out_dir / "masks", ec);
    if (!fs::is_directory(out_dir / "images") || !fs::is_directory(out_dir / "masks"))
        raise(errc::io, "cannot create output directories under " + out_dir.string());

    std::mt19937_64 rng(cfg.seed);
    const int size = cfg.image_size;
    // Noise range keeps +-40 defects clear of clamping.
    std::uniform_int_distribution<int> noise(60, 190);
    std::uniform_int_distribution<int> defect_count(cfg.defect_count_range.first, cfg.defect_count_range.second);
    std::uniform_int_distribution<int> radius(cfg.defect_radius_range.first, cfg.defect_radius_range.second);
    const int margin = cfg.defect_radius_range.second + 2;
    const int center_lo = std::clamp(margin, 0, size - 1);
    const int center_hi = std::clamp(size - 1 - margin, center_lo, size - 1);
    std::uniform_int_distribution<int> center(center_lo, center_hi);
    std::uniform_int_distribution<int> sign(0, 1);

    const fs::path manifest_path = out_dir / "manifest.csv";
    std::ofstream manifest(manifest_path, std::ios::binary | std::ios::trunc);
    if (!manifest)
        raise(errc::io, "cannot write " + manifest_path.string());
    manifest << "category,image_path,label,mask_path\n";

    for (int n = 0; n < cfg.image_count; ++n) {
        ImageBuffer img(size, size);
        if (cfg.background == SynthConfig::Background::flat) {
            for (auto& b : img.pixels)
                b = 128;
        } else {
            for (std::size_t i = 0; i < img.pixel_count(); ++i) {
                const std::uint8_t v = static_cast<std::uint8_t>(noise(rng));
                img.pixels[3 * i] = img.pixels[3 * i + 1] = img.pixels[3 * i + 2] = v;
            }
        }

        std::vector<Defect> defects;
        const int count = defect_count(rng);
        for (int d = 0; d < count; ++d) {
            Defect def;
            def.cx = center(rng);
            def.cy = center(rng);
            def.rx = radius(rng);
            def.ry = radius(rng);
            def.delta = sign(rng) ? 40 : -40;
            defects.push_back(def);
        }

        // First covering defect wins per pixel, so overlapping defects with
        // opposite signs cannot cancel back to the background value.
        Mask mask(size, size);
        for (const auto& def : defects) {
            for (int y = std::max(0, def.cy - def.ry); y <= std::min(size - 1, def.cy + def.ry); ++y) {
                for (int x = std::max(0, def.cx - def.rx); x <= std::min(size - 1, def.cx + def.rx); ++x) {
                    if (!inside(def, x, y) || mask.at(x, y))
                        continue;
                    mask.set(x, y, 1);
                    auto* px = img.at(x, y);
                    for (int c = 0; c < 3; ++c) {
                        const int v = px[c] + def.delta;
                        px[c] = static_cast<std::uint8_t>(std::min(255, std::max(0, v)));
                    }
                }
            }
        }

        char name[32];
        std::snprintf(name, sizeof(name), "img_%03d", n);
        const bool anomalous = mask.any();
        const std::string image_rel = std::string("images/") + name + ".png";
        png::write_rgb8(out_dir / image_rel, img);
        if (anomalous) {
            const std::string mask_rel = std::string("masks/") + name + "_mask.png";
            png::write_mask(out_dir / mask_rel, mask);
            manifest << "synthetic," << image_rel << ",anomaly," << mask_rel << "\n";
        } else {
            manifest << "synthetic," << image_rel << ",normal,\n";
        }
    }
    manifest.flush();
    return manifest_path;
}

} // namespace vqad
