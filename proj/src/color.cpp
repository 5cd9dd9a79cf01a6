#include "vqad/color.hpp"

#include <cmath>

namespace vqad {

namespace {

// sRGB companding, tabulated per 8-bit code value.
const float* srgb_linear_lut() {
    static float lut[256];
    static bool init = [] {
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            lut[i] = static_cast<float>(c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4));
        }
        return true;
    }();
    (void)init;
    return lut;
}

inline float lab_f(float t) {
    constexpr float eps = 216.0f / 24389.0f;
    constexpr float kappa = 24389.0f / 27.0f;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0f) / 116.0f;
}

} // namespace

std::array<float, 3> rgb_to_lab_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const float* lut = srgb_linear_lut();
    const float rl = lut[r], gl = lut[g], bl = lut[b];

    // D65 reference white.
    const float x = (0.4124564f * rl + 0.3575761f * gl + 0.1804375f * bl) / 0.95047f;
    const float y = 0.2126729f * rl + 0.7151522f * gl + 0.0721750f * bl;
    const float z = (0.0193339f * rl + 0.1191920f * gl + 0.9503041f * bl) / 1.08883f;

    const float fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
    return {116.0f * fy - 16.0f, 500.0f * (fx - fy), 200.0f * (fy - fz)};
}

LabPlanes rgb_to_lab(const ImageBuffer& img) {
    LabPlanes planes;
    planes.width = img.width;
    planes.height = img.height;
    const std::size_t n = img.pixel_count();
    planes.L.resize(n);
    planes.A.resize(n);
    planes.B.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto lab = rgb_to_lab_pixel(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]);
        planes.L[i] = lab[0];
        planes.A[i] = lab[1];
        planes.B[i] = lab[2];
    }
    return planes;
}

} // namespace vqad
