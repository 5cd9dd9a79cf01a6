#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace vqad {

// Default side length images are stretched to before division and prompting.
inline constexpr int kWorkingResolution = 768;

/// Row-major 8-bit RGB raster.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // 3 bytes per pixel

    ImageBuffer() = default;
    ImageBuffer(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    static ImageBuffer filled(int w, int h, std::array<std::uint8_t, 3> rgb);

    bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* at(int x, int y) const { return pixels.data() + offset(x, y); }
    std::uint8_t* at(int x, int y) { return pixels.data() + offset(x, y); }

    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        auto* p = at(x, y);
        p[0] = rgb[0];
        p[1] = rgb[1];
        p[2] = rgb[2];
    }

    bool operator==(const ImageBuffer&) const = default;
};

/// Binary raster; values are strictly 0 or 1.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    bool empty() const { return width <= 0 || height <= 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }

    bool any() const;

    bool operator==(const Mask&) const = default;
};

// Bilinear stretch to size x size. Aspect ratio is not preserved; the whole
// frame is resampled with half-pixel-center sampling and clamped edges.
ImageBuffer resize_to_working(const ImageBuffer& img, int size);

// Nearest-neighbor stretch for binary masks; output stays strictly binary.
Mask resize_mask_nearest(const Mask& mask, int size);

} // namespace vqad
