#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vqad/image.hpp"

namespace vqad::png {

// 8-bit RGB. Grayscale/palette/alpha inputs are expanded or stripped to RGB.
ImageBuffer read_rgb8(const std::filesystem::path& file);
void write_rgb8(const std::filesystem::path& file, const ImageBuffer& img);

// 8-bit grayscale mask; any nonzero source sample maps to 1.
Mask read_mask(const std::filesystem::path& file);
void write_mask(const std::filesystem::path& file, const Mask& mask);

// 16-bit grayscale, used for region-id rasters and quantized anomaly maps.
std::vector<std::uint16_t> read_gray16(const std::filesystem::path& file, int& width, int& height);
void write_gray16(const std::filesystem::path& file, const std::vector<std::uint16_t>& data, int width, int height);

// In-memory PNG encode of an RGB image, for transport payloads.
std::vector<std::uint8_t> encode_rgb8(const ImageBuffer& img);

} // namespace vqad::png
