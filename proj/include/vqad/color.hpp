#pragma once

#include <array>
#include <vector>

#include "vqad/image.hpp"

namespace vqad {

struct LabPlanes {
    int width = 0;
    int height = 0;
    std::vector<float> L, A, B;
};

// sRGB (D65) to CIELAB, one float plane per channel.
LabPlanes rgb_to_lab(const ImageBuffer& img);

std::array<float, 3> rgb_to_lab_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b);

} // namespace vqad
