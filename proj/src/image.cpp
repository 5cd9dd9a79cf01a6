#include "vqad/image.hpp"

#include <algorithm>
#include <cmath>

#include "vqad/error.hpp"

namespace vqad {

ImageBuffer ImageBuffer::filled(int w, int h, std::array<std::uint8_t, 3> rgb) {
    ImageBuffer img(w, h);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = rgb[0];
        img.pixels[i + 1] = rgb[1];
        img.pixels[i + 2] = rgb[2];
    }
    return img;
}

bool Mask::any() const {
    return std::any_of(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; });
}

ImageBuffer resize_to_working(const ImageBuffer& img, int size) {
    if (img.empty())
        raise(errc::invalid_input, "resize_to_working: empty input image");
    if (size <= 0)
        raise(errc::invalid_input, "resize_to_working: target size must be positive");
    if (img.width == size && img.height == size)
        return img;

    ImageBuffer out(size, size);
    const double sx = static_cast<double>(img.width) / size;
    const double sy = static_cast<double>(img.height) / size;

    for (int oy = 0; oy < size; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < size; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;

            const std::uint8_t* p00 = img.at(x0, y0);
            const std::uint8_t* p01 = img.at(x1, y0);
            const std::uint8_t* p10 = img.at(x0, y1);
            const std::uint8_t* p11 = img.at(x1, y1);
            std::uint8_t* dst = out.at(ox, oy);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + (p01[c] - p00[c]) * wx;
                const double bot = p10[c] + (p11[c] - p10[c]) * wx;
                const double v = top + (bot - top) * wy;
                dst[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return out;
}

Mask resize_mask_nearest(const Mask& mask, int size) {
    if (mask.empty())
        raise(errc::invalid_input, "resize_mask_nearest: empty input mask");
    if (size <= 0)
        raise(errc::invalid_input, "resize_mask_nearest: target size must be positive");
    if (mask.width == size && mask.height == size)
        return mask;

    Mask out(size, size);
    const double sx = static_cast<double>(mask.width) / size;
    const double sy = static_cast<double>(mask.height) / size;
    for (int oy = 0; oy < size; ++oy) {
        const int y = std::min(mask.height - 1, static_cast<int>((oy + 0.5) * sy));
        for (int ox = 0; ox < size; ++ox) {
            const int x = std::min(mask.width - 1, static_cast<int>((ox + 0.5) * sx));
            out.set(ox, oy, mask.at(x, y) ? 1 : 0);
        }
    }
    return out;
}

} // namespace vqad
