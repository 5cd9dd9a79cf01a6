#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "vqad/error.hpp"
#include "vqad/image.hpp"
#include "vqad/png_io.hpp"

using namespace vqad;

namespace {

ImageBuffer gradient_image(int w, int h) {
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.set(x, y,
                    {static_cast<std::uint8_t>(x * 255 / (w - 1)),
                     static_cast<std::uint8_t>(y * 255 / (h - 1)),
                     static_cast<std::uint8_t>((x + y) * 255 / (w + h - 2))});
    return img;
}

} // namespace

TEST_SUITE("image") {

TEST_CASE("resize at working size is bit-identical") {
    const ImageBuffer img = gradient_image(768, 768);
    CHECK(resize_to_working(img, 768) == img);
}

TEST_CASE("constant image stays constant under resize") {
    const ImageBuffer img = ImageBuffer::filled(1024, 1024, {137, 137, 137});
    const ImageBuffer out = resize_to_working(img, 768);
    CHECK(out.width == 768);
    CHECK(out.height == 768);
    for (std::uint8_t v : out.pixels)
        CHECK(v == 137);
}

TEST_CASE("gradient corners match the reference resampler within one level") {
    const ImageBuffer img = gradient_image(900, 1100);
    const ImageBuffer out = resize_to_working(img, 768);
    for (const auto& [ox, oy] : {std::pair{0, 0}, {767, 0}, {0, 767}, {767, 767}}) {
        const auto ref = oracles::brute_bilinear_at(img, ox, oy, 768);
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(out.at(ox, oy)[c] - ref[c]) <= 1.0);
    }
}

TEST_CASE("resize rejects empty input and bad size") {
    CHECK_THROWS_AS(resize_to_working(ImageBuffer{}, 768), Error);
    CHECK_THROWS_AS(resize_to_working(gradient_image(4, 4), 0), Error);
}

TEST_CASE("mask resize keeps all-zero and all-one masks") {
    Mask zero(10, 10);
    const Mask zr = resize_mask_nearest(zero, 16);
    CHECK_FALSE(zr.any());

    Mask one(10, 10);
    one.data.assign(one.data.size(), 1);
    const Mask onr = resize_mask_nearest(one, 16);
    for (std::uint8_t v : onr.data)
        CHECK(v == 1);
}

TEST_CASE("2x2 checkerboard doubles into 2x2 blocks") {
    Mask cb(2, 2);
    cb.set(0, 0, 1);
    cb.set(1, 1, 1);
    const Mask out = resize_mask_nearest(cb, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            CHECK(out.at(x, y) == cb.at(x / 2, y / 2));
}

TEST_CASE("mask resize output is strictly binary") {
    Mask m(5, 3);
    m.set(2, 1, 1);
    m.set(4, 2, 1);
    const Mask out = resize_mask_nearest(m, 7);
    for (std::uint8_t v : out.data)
        CHECK((v == 0 || v == 1));
}

TEST_CASE("png round trips: rgb8, mask, gray16 with high values") {
    testing::TempDir dir("png");
    const ImageBuffer img = gradient_image(33, 17);
    png::write_rgb8(dir / "rgb.png", img);
    CHECK(png::read_rgb8(dir / "rgb.png") == img);

    Mask m(9, 9);
    m.set(4, 4, 1);
    m.set(0, 8, 1);
    png::write_mask(dir / "mask.png", m);
    CHECK(png::read_mask(dir / "mask.png") == m);

    std::vector<std::uint16_t> deep(7 * 5);
    for (std::size_t i = 0; i < deep.size(); ++i)
        deep[i] = static_cast<std::uint16_t>(i * 1999 + 300);
    png::write_gray16(dir / "deep.png", deep, 7, 5);
    int w = 0, h = 0;
    CHECK(png::read_gray16(dir / "deep.png", w, h) == deep);
    CHECK(w == 7);
    CHECK(h == 5);

    // In-memory encoding is byte-identical to the file encoder's output.
    const auto encoded = png::encode_rgb8(img);
    std::ifstream in(dir / "rgb.png", std::ios::binary);
    const std::string on_disk(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
    CHECK(std::string(encoded.begin(), encoded.end()) == on_disk);
}

} // TEST_SUITE
