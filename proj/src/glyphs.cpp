#include <array>
#include <string>

#include "vqad/regionize.hpp"

namespace vqad {

namespace {

constexpr int kGlyphWidth = 5;
constexpr int kGlyphHeight = 7;

// Row bitmaps for digits 0-9, MSB-first in the low five bits.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kDigitFont{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}, // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}, // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}, // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}, // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}, // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}, // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}, // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}, // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}, // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}, // 9
}};

bool glyph_bit(int digit, int gx, int gy) {
    return (kDigitFont[digit][gy] >> (kGlyphWidth - 1 - gx)) & 1;
}

} // namespace

std::vector<std::size_t> draw_region_labels(ImageBuffer& img, const RegionMap& rm) {
    std::vector<std::size_t> painted;
    for (const auto& region : rm.regions) {
        const std::string text = std::to_string(region.id);
        const int digits = static_cast<int>(text.size());
        const int block_w = digits * kGlyphWidth + (digits - 1); // 1-px inter-digit gap
        const int block_h = kGlyphHeight;
        const int origin_x = region.anchor_x - block_w / 2;
        const int origin_y = region.anchor_y - block_h / 2;

        // Glyph pixels first, then a 1-px white halo around them; both
        // clipped to the region bbox.
        auto in_bbox = [&](int x, int y) {
            return x >= region.min_x && x <= region.max_x && y >= region.min_y && y <= region.max_y &&
                   x >= 0 && x < img.width && y >= 0 && y < img.height;
        };

        std::vector<std::pair<int, int>> glyph_px;
        for (int d = 0; d < digits; ++d) {
            const int digit = text[d] - '0';
            const int gx0 = origin_x + d * (kGlyphWidth + 1);
            for (int gy = 0; gy < kGlyphHeight; ++gy)
                for (int gx = 0; gx < kGlyphWidth; ++gx)
                    if (glyph_bit(digit, gx, gy))
                        glyph_px.emplace_back(gx0 + gx, origin_y + gy);
        }

        for (auto [px, py] : glyph_px)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if ((dx || dy) && in_bbox(px + dx, py + dy)) {
                        img.set(px + dx, py + dy, {255, 255, 255});
                        painted.push_back(img.offset(px + dx, py + dy) / 3);
                    }
        for (auto [px, py] : glyph_px)
            if (in_bbox(px, py)) {
                img.set(px, py, {0, 0, 0});
                painted.push_back(img.offset(px, py) / 3);
            }
    }
    return painted;
}

} // namespace vqad
