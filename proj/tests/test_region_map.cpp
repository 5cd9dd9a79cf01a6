#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "vqad/error.hpp"
#include "vqad/region_map.hpp"

using namespace vqad;

namespace {

RegionMap square_region(int size) {
    // One `size` x `size` region with a 1-px background frame around it.
    const int w = size + 2, h = size + 2;
    std::vector<std::uint16_t> labels(static_cast<std::size_t>(w) * h, 0);
    for (int y = 1; y <= size; ++y)
        for (int x = 1; x <= size; ++x)
            labels[static_cast<std::size_t>(y) * w + x] = 1;
    return make_region_map(w, h, std::move(labels));
}

} // namespace

TEST_SUITE("region_map") {

TEST_CASE("records rebuilt from the raster equal the stored records") {
    std::vector<std::uint16_t> labels(12 * 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x)
            labels[y * 12 + x] = static_cast<std::uint16_t>(1 + (x / 3));
    const RegionMap rm = make_region_map(12, 9, labels);
    CHECK(rm.regions == build_region_records(rm.labels, rm.width, rm.height));
    CHECK_NOTHROW(rm.validate());
}

TEST_CASE("validate rejects tampered records and rasters") {
    RegionMap rm = square_region(4);
    SUBCASE("wrong area") {
        rm.regions[0].area += 1;
        CHECK_THROWS_AS(rm.validate(), Error);
    }
    SUBCASE("anchor outside the region") {
        rm.regions[0].anchor_x = 0;
        rm.regions[0].anchor_y = 0;
        CHECK_THROWS_AS(rm.validate(), Error);
    }
    SUBCASE("disconnected region") {
        rm.labels[0] = 1; // isolated corner pixel with the same id
        rm.regions = build_region_records(rm.labels, rm.width, rm.height);
        CHECK_THROWS_AS(rm.validate(), Error);
    }
    SUBCASE("non-contiguous ids") {
        for (auto& v : rm.labels)
            if (v == 1)
                v = 2;
        CHECK_THROWS_AS(make_region_map(rm.width, rm.height, rm.labels), Error);
    }
}

TEST_CASE("boundary distance matches the exhaustive oracle") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> lab(0, 2);
    for (int trial = 0; trial < 5; ++trial) {
        const int w = 9 + trial, h = 7 + trial;
        std::vector<std::uint16_t> labels(static_cast<std::size_t>(w) * h);
        for (auto& v : labels)
            v = static_cast<std::uint16_t>(lab(rng));
        const auto fast = boundary_distance(labels, w, h);
        const auto brute = oracles::brute_boundary_distance(labels, w, h);
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == brute[i]);
    }
}

TEST_CASE("anchor of a 5x5 square is its center") {
    const RegionMap rm = square_region(5);
    const auto [ax, ay] = label_anchor(rm, 1);
    // Region bbox starts at (1,1); center offset (2,2).
    CHECK(ax == 3);
    CHECK(ay == 3);
}

TEST_CASE("anchor of a single-pixel region is that pixel") {
    std::vector<std::uint16_t> labels(25, 0);
    labels[2 * 5 + 3] = 1;
    const RegionMap rm = make_region_map(5, 5, labels);
    const auto [ax, ay] = label_anchor(rm, 1);
    CHECK(ax == 3);
    CHECK(ay == 2);
}

TEST_CASE("anchor of an L-shaped region sits on a limb midline") {
    // Vertical 3x9 bar plus horizontal 9x3 bar sharing the bottom-left corner.
    const int w = 12, h = 12;
    std::vector<std::uint16_t> labels(static_cast<std::size_t>(w) * h, 0);
    for (int y = 1; y <= 9; ++y)
        for (int x = 1; x <= 3; ++x)
            labels[static_cast<std::size_t>(y) * w + x] = 1;
    for (int y = 7; y <= 9; ++y)
        for (int x = 1; x <= 9; ++x)
            labels[static_cast<std::size_t>(y) * w + x] = 1;
    const RegionMap rm = make_region_map(w, h, labels);
    const auto [ax, ay] = label_anchor(rm, 1);

    // Independent argmax over the brute-force distance transform, same
    // (y, x) tie order.
    const auto brute = oracles::brute_boundary_distance(labels, w, h);
    int bx = -1, by = -1, bd = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (labels[y * w + x] == 1 && brute[y * w + x] > bd) {
                bd = brute[y * w + x];
                bx = x;
                by = y;
            }
    CHECK(ax == bx);
    CHECK(ay == by);
    const bool on_vertical_midline = (ax == 2);
    const bool on_horizontal_midline = (ay == 8);
    CHECK((on_vertical_midline || on_horizontal_midline));
}

} // TEST_SUITE
