#include "vqad/png_io.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include <png.h>

#include "vqad/error.hpp"

namespace vqad::png {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

FileHandle open_file(const std::filesystem::path& file, const char* mode) {
    FileHandle f(std::fopen(file.string().c_str(), mode));
    if (!f)
        raise(errc::io, "cannot open " + file.string());
    return f;
}

struct Reader {
    png_structp png = nullptr;
    png_infop info = nullptr;

    explicit Reader(std::FILE* f) {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            png_destroy_read_struct(&png, &info, nullptr);
            raise(errc::io, "libpng allocation failure");
        }
        png_init_io(png, f);
    }
    ~Reader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct Writer {
    png_structp png = nullptr;
    png_infop info = nullptr;

    explicit Writer(std::FILE* f) {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            png_destroy_write_struct(&png, &info);
            raise(errc::io, "libpng allocation failure");
        }
        png_init_io(png, f);
    }
    ~Writer() { png_destroy_write_struct(&png, &info); }
};

// libpng reports errors through longjmp; translate to exceptions after the
// RAII holders unwind.
#define VQAD_PNG_TRY(ctx, file)                                                    \
    if (setjmp(png_jmpbuf((ctx).png)))                                             \
        raise(errc::io, "libpng error while processing " + (file).string());

std::vector<std::uint8_t> read_any8(const std::filesystem::path& file, int& width, int& height, int target_channels) {
    auto f = open_file(file, "rb");
    Reader r(f.get());
    VQAD_PNG_TRY(r, file)

    png_read_info(r.png, r.info);
    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (bit_depth == 16) png_set_strip_16(r.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
    if (target_channels == 3) {
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(r.png);
    } else {
        if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
            color_type == PNG_COLOR_TYPE_PALETTE)
            png_set_rgb_to_gray_fixed(r.png, 1, -1, -1);
    }
    png_read_update_info(r.png, r.info);

    width = static_cast<int>(w);
    height = static_cast<int>(h);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * target_channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = data.data() + static_cast<std::size_t>(y) * w * target_channels;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return data;
}

} // namespace

ImageBuffer read_rgb8(const std::filesystem::path& file) {
    ImageBuffer img;
    img.pixels = read_any8(file, img.width, img.height, 3);
    return img;
}

void write_rgb8(const std::filesystem::path& file, const ImageBuffer& img) {
    if (img.empty())
        raise(errc::invalid_input, "write_rgb8: empty image");
    auto f = open_file(file, "wb");
    Writer w(f.get());
    VQAD_PNG_TRY(w, file)

    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_image(w.png, rows.data());
    png_write_end(w.png, nullptr);
}

Mask read_mask(const std::filesystem::path& file) {
    Mask m;
    auto gray = read_any8(file, m.width, m.height, 1);
    m.data.resize(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        m.data[i] = gray[i] ? 1 : 0;
    return m;
}

void write_mask(const std::filesystem::path& file, const Mask& mask) {
    if (mask.empty())
        raise(errc::invalid_input, "write_mask: empty mask");
    auto f = open_file(file, "wb");
    Writer w(f.get());
    VQAD_PNG_TRY(w, file)

    png_set_IHDR(w.png, w.info, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<std::uint8_t> row(mask.width);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x)
            row[x] = mask.at(x, y) ? 255 : 0;
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

std::vector<std::uint16_t> read_gray16(const std::filesystem::path& file, int& width, int& height) {
    auto f = open_file(file, "rb");
    Reader r(f.get());
    VQAD_PNG_TRY(r, file)

    png_read_info(r.png, r.info);
    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 16)
        raise(errc::io, "expected 16-bit grayscale PNG: " + file.string());
    png_read_update_info(r.png, r.info);

    width = static_cast<int>(w);
    height = static_cast<int>(h);
    std::vector<std::uint16_t> data(static_cast<std::size_t>(w) * h);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 2);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(r.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x)
            data[static_cast<std::size_t>(y) * w + x] =
                static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
    }
    png_read_end(r.png, nullptr);
    return data;
}

void write_gray16(const std::filesystem::path& file, const std::vector<std::uint16_t>& data, int width, int height) {
    if (width <= 0 || height <= 0 || data.size() != static_cast<std::size_t>(width) * height)
        raise(errc::invalid_input, "write_gray16: dimension/data mismatch");
    auto f = open_file(file, "wb");
    Writer w(f.get());
    VQAD_PNG_TRY(w, file)

    png_set_IHDR(w.png, w.info, width, height, 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 2);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::uint16_t v = data[static_cast<std::size_t>(y) * width + x];
            row[2 * x] = static_cast<std::uint8_t>(v >> 8);
            row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

namespace {
void append_bytes(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}
void flush_noop(png_structp) {}
} // namespace

std::vector<std::uint8_t> encode_rgb8(const ImageBuffer& img) {
    if (img.empty())
        raise(errc::invalid_input, "encode_rgb8: empty image");
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        raise(errc::io, "libpng allocation failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        raise(errc::io, "libpng error while encoding in-memory PNG");
    }
    png_set_write_fn(png, &out, append_bytes, flush_noop);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

} // namespace vqad::png
