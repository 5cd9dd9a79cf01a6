#include <doctest.h>

#include <fstream>
#include <map>

#include "support/temp_dir.hpp"
#include "vqad/data.hpp"
#include "vqad/error.hpp"
#include "vqad/png_io.hpp"

using namespace vqad;
namespace fs = std::filesystem;

namespace {

void write_tiny_png(const fs::path& file, std::uint8_t shade = 100) {
    fs::create_directories(file.parent_path());
    png::write_rgb8(file, ImageBuffer::filled(16, 16, {shade, shade, shade}));
}

void write_tiny_mask(const fs::path& file) {
    fs::create_directories(file.parent_path());
    Mask m(16, 16);
    for (int i = 0; i < 8; ++i)
        m.data[i] = 1;
    png::write_mask(file, m);
}

// {root}/{category}/test/{defect}/nnn.png plus ground-truth masks.
void build_mvtec_fixture(const fs::path& root) {
    write_tiny_png(root / "bottle/test/good/000.png");
    write_tiny_png(root / "bottle/test/good/001.png");
    write_tiny_png(root / "bottle/test/crack/000.png");
    write_tiny_mask(root / "bottle/ground_truth/crack/000_mask.png");
    write_tiny_png(root / "tile/test/good/000.png");
    write_tiny_png(root / "tile/test/hole/000.png");
    write_tiny_mask(root / "tile/ground_truth/hole/000_mask.png");
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_SUITE("data") {

TEST_CASE("mvtec layout loads with good/defect semantics") {
    testing::TempDir dir("mvtec");
    build_mvtec_fixture(dir.path());
    DatasetSpec spec;
    spec.root = dir.path();
    spec.kind = DatasetKind::mvtec;
    const auto by_cat = load_mvtec(spec);
    REQUIRE(by_cat.size() == 2);
    const auto& bottle = by_cat.at("bottle");
    REQUIRE(bottle.size() == 3);
    // Lexicographic: crack before good.
    CHECK(bottle[0].id == "bottle/crack/000");
    CHECK(bottle[0].is_anomalous);
    REQUIRE(bottle[0].mask_path.has_value());
    CHECK(bottle[0].mask_path->filename() == "000_mask.png");
    CHECK_FALSE(bottle[1].is_anomalous);
    CHECK_FALSE(bottle[1].mask_path.has_value());

    // Repeated loads give identical ordering.
    const auto again = load_mvtec(spec);
    REQUIRE(again.at("bottle").size() == bottle.size());
    for (std::size_t i = 0; i < bottle.size(); ++i)
        CHECK(again.at("bottle")[i].id == bottle[i].id);
}

TEST_CASE("mvtec category filter and unknown category") {
    testing::TempDir dir("mvtec_f");
    build_mvtec_fixture(dir.path());
    DatasetSpec spec;
    spec.root = dir.path();
    spec.categories = {"tile"};
    CHECK(load_mvtec(spec).size() == 1);
    spec.categories = {"carpet"};
    CHECK_THROWS_AS(load_mvtec(spec), Error);
}

TEST_CASE("anomalous image without a mask is a dataset error naming the file") {
    testing::TempDir dir("mvtec_bad");
    build_mvtec_fixture(dir.path());
    write_tiny_png(dir.path() / "bottle/test/crack/001.png");
    DatasetSpec spec;
    spec.root = dir.path();
    try {
        load_mvtec(spec);
        FAIL("expected dataset error");
    } catch (const Error& e) {
        CHECK(e.kind() == errc::dataset);
        CHECK(std::string(e.what()).find("crack/001") != std::string::npos);
    }
}

TEST_CASE("manifest loads well-formed rows") {
    testing::TempDir dir("manifest");
    write_tiny_png(dir / "imgs/a.png");
    write_tiny_png(dir / "imgs/b.png");
    write_tiny_mask(dir / "imgs/b_mask.png");
    std::ofstream(dir / "m.csv") << "category,image_path,label,mask_path\n"
                                    "widget,imgs/a.png,normal,\n"
                                    "widget,imgs/b.png,anomaly,imgs/b_mask.png\n";
    const auto records = load_manifest(dir / "m.csv");
    REQUIRE(records.size() == 2);
    CHECK_FALSE(records[0].is_anomalous);
    CHECK(records[1].is_anomalous);
    CHECK(records[1].mask_path.has_value());
    CHECK(records[0].category == "widget");
}

TEST_CASE("manifest rejects bad rows with line numbers") {
    testing::TempDir dir("manifest_bad");
    write_tiny_png(dir / "a.png");
    write_tiny_png(dir / "b.png");

    SUBCASE("anomaly without mask") {
        std::ofstream(dir / "m.csv") << "category,image_path,label,mask_path\n"
                                        "w,a.png,anomaly,\n";
        try {
            load_manifest(dir / "m.csv");
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("unknown label") {
        std::ofstream(dir / "m.csv") << "category,image_path,label,mask_path\n"
                                        "w,a.png,defective,\n";
        try {
            load_manifest(dir / "m.csv");
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("defective") != std::string::npos);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        std::ofstream(dir / "m.csv") << "category,image_path,label,mask_path\n"
                                        "w,missing.png,normal,\n";
        CHECK_THROWS_AS(load_manifest(dir / "m.csv"), Error);
    }
    SUBCASE("duplicate image paths name both lines") {
        std::ofstream(dir / "m.csv") << "category,image_path,label,mask_path\n"
                                        "w,a.png,normal,\n"
                                        "w,b.png,normal,\n"
                                        "w,a.png,normal,\n";
        try {
            load_manifest(dir / "m.csv");
            FAIL("expected error");
        } catch (const Error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("2") != std::string::npos);
            CHECK(msg.find("4") != std::string::npos);
        }
    }
    SUBCASE("wrong header") {
        std::ofstream(dir / "m.csv") << "img,label\nx,y\n";
        CHECK_THROWS_AS(load_manifest(dir / "m.csv"), Error);
    }
}

TEST_CASE("synthetic generation is bit-identical per seed") {
    testing::TempDir a("synth_a"), b("synth_b");
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.image_count = 4;
    cfg.image_size = 64;
    cfg.defect_radius_range = {4, 8};
    const auto ma = generate_synthetic(cfg, a.path());
    const auto mb = generate_synthetic(cfg, b.path());
    CHECK(file_bytes(ma) == file_bytes(mb));
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "images/img_%03d.png", i);
        CHECK(file_bytes(a / name) == file_bytes(b / name));
    }

    SynthConfig other = cfg;
    other.seed = 8;
    testing::TempDir c("synth_c");
    generate_synthetic(other, c.path());
    bool any_differ = false;
    for (int i = 0; i < 4 && !any_differ; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "images/img_%03d.png", i);
        any_differ = file_bytes(a / name) != file_bytes(c / name);
    }
    CHECK(any_differ);
}

TEST_CASE("zero defect range produces only normal samples") {
    testing::TempDir dir("synth_norm");
    SynthConfig cfg;
    cfg.image_count = 5;
    cfg.image_size = 48;
    cfg.defect_count_range = {0, 0};
    cfg.defect_radius_range = {3, 6};
    const auto manifest = generate_synthetic(cfg, dir.path());
    const auto records = load_manifest(manifest);
    REQUIRE(records.size() == 5);
    for (const auto& r : records) {
        CHECK_FALSE(r.is_anomalous);
        CHECK_FALSE(r.mask_path.has_value());
    }
}

TEST_CASE("mask area equals the rasterized ellipse count") {
    testing::TempDir dir("synth_ellipse");
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.image_count = 1;
    cfg.image_size = 128;
    cfg.defect_count_range = {1, 1};
    cfg.defect_radius_range = {10, 10}; // circle of radius 10
    generate_synthetic(cfg, dir.path());
    const Mask mask = png::read_mask(dir / "masks/img_000_mask.png");
    std::int64_t area = 0;
    for (auto v : mask.data)
        area += v;

    // Independent count of lattice points satisfying the ellipse inequality;
    // translation-invariant, so the center does not matter.
    std::int64_t expected = 0;
    for (int dy = -10; dy <= 10; ++dy)
        for (int dx = -10; dx <= 10; ++dx)
            if (dx * dx + dy * dy <= 100)
                ++expected;
    CHECK(area == expected);
}

TEST_CASE("flat-background defects always differ from the background value") {
    testing::TempDir dir("synth_flat");
    SynthConfig cfg;
    cfg.seed = 12;
    cfg.image_count = 6;
    cfg.image_size = 64;
    cfg.background = SynthConfig::Background::flat;
    cfg.defect_count_range = {0, 3};
    cfg.defect_radius_range = {3, 9};
    const auto manifest = generate_synthetic(cfg, dir.path());
    for (const auto& rec : load_manifest(manifest)) {
        const ImageBuffer img = png::read_rgb8(rec.image_path);
        Mask mask(64, 64);
        if (rec.mask_path)
            mask = png::read_mask(*rec.mask_path);
        for (std::size_t i = 0; i < mask.data.size(); ++i) {
            if (mask.data[i])
                CHECK(img.pixels[3 * i] != 128);
            else
                CHECK(img.pixels[3 * i] == 128);
        }
    }
}

TEST_CASE("load_dataset groups manifest rows by category") {
    testing::TempDir dir("group");
    write_tiny_png(dir / "a.png");
    write_tiny_png(dir / "b.png");
    std::ofstream(dir / "manifest.csv") << "category,image_path,label,mask_path\n"
                                           "beta,b.png,normal,\n"
                                           "alpha,a.png,normal,\n";
    DatasetSpec spec;
    spec.root = dir.path();
    spec.kind = DatasetKind::synthetic;
    const auto by_cat = load_dataset(spec);
    REQUIRE(by_cat.size() == 2);
    CHECK(by_cat.begin()->first == "alpha");
}

} // TEST_SUITE
