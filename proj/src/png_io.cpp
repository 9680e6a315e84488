#include "gsdkit/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "gsdkit/error.hpp"

namespace gsdkit::png {
namespace {

namespace fs = std::filesystem;

constexpr int kCompressionLevel = 4;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) fail("IoError", "cannot open " + path.string());
    return f;
}

struct Decoded {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

// want_rgb: expand everything to RGB8. Otherwise only 16->8 and gray+alpha
// stripping are applied and the channel count is reported as-is.
Decoded decode(const fs::path& path, bool want_rgb) {
    FilePtr file = open_file(path, "rb");

    png_structp png_ptr = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png_ptr) fail("IoError", "libpng init failed for " + path.string());
    png_infop info_ptr = png_create_info_struct(png_ptr);
    if (!info_ptr) {
        png_destroy_read_struct(&png_ptr, nullptr, nullptr);
        fail("IoError", "libpng init failed for " + path.string());
    }
    if (setjmp(png_jmpbuf(png_ptr))) {
        png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
        fail("IoError", "failed to decode " + path.string());
    }

    png_init_io(png_ptr, file.get());
    png_read_info(png_ptr, info_ptr);

    const int color_type = png_get_color_type(png_ptr, info_ptr);
    const int bit_depth = png_get_bit_depth(png_ptr, info_ptr);

    if (bit_depth == 16) png_set_strip_16(png_ptr);
    if (bit_depth < 8) png_set_packing(png_ptr);
    if (want_rgb) {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_ptr);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png_ptr);
        if (png_get_valid(png_ptr, info_ptr, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_ptr);
        png_set_strip_alpha(png_ptr);
    } else {
        if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png_ptr);
    }
    png_read_update_info(png_ptr, info_ptr);

    Decoded out;
    out.width = static_cast<int>(png_get_image_width(png_ptr, info_ptr));
    out.height = static_cast<int>(png_get_image_height(png_ptr, info_ptr));
    out.channels = png_get_channels(png_ptr, info_ptr);

    const std::size_t rowbytes = png_get_rowbytes(png_ptr, info_ptr);
    out.data.resize(rowbytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + rowbytes * y;
    png_read_image(png_ptr, rows.data());
    png_read_end(png_ptr, nullptr);
    png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
    return out;
}

void encode(const fs::path& path, const std::uint8_t* data, int width, int height, int channels) {
    if (!path.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    FilePtr file = open_file(path, "wb");

    png_structp png_ptr = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png_ptr) fail("IoError", "libpng init failed for " + path.string());
    png_infop info_ptr = png_create_info_struct(png_ptr);
    if (!info_ptr) {
        png_destroy_write_struct(&png_ptr, nullptr);
        fail("IoError", "libpng init failed for " + path.string());
    }
    if (setjmp(png_jmpbuf(png_ptr))) {
        png_destroy_write_struct(&png_ptr, &info_ptr);
        fail("IoError", "failed to encode " + path.string());
    }

    png_init_io(png_ptr, file.get());
    png_set_compression_level(png_ptr, kCompressionLevel);
    png_set_filter(png_ptr, 0, PNG_FILTER_NONE);
    png_set_IHDR(png_ptr, info_ptr, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png_ptr, info_ptr);

    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels;
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + rowbytes * y);
    png_write_image(png_ptr, rows.data());
    png_write_end(png_ptr, nullptr);
    png_destroy_write_struct(&png_ptr, &info_ptr);
}

}  // namespace

RasterImage read_image(const fs::path& path, Rational gsd_cm) {
    Decoded d = decode(path, /*want_rgb=*/true);
    if (d.channels != RasterImage::kChannels)
        fail("IoError", "expected RGB data in " + path.string());
    RasterImage img;
    img.width = d.width;
    img.height = d.height;
    img.gsd_cm = gsd_cm;
    img.pixels = std::move(d.data);
    img.validate();
    return img;
}

LabelMask read_mask(const fs::path& path) {
    Decoded d = decode(path, /*want_rgb=*/false);
    if (d.channels != 1)
        fail("IoError", "mask must be single-channel: " + path.string());
    LabelMask mask;
    mask.width = d.width;
    mask.height = d.height;
    mask.classes = std::move(d.data);
    for (const std::uint8_t v : mask.classes) {
        if (v > 1)
            fail("InvalidMaskValue",
                 "mask value " + std::to_string(v) + " outside {0, 1} in " + path.string());
    }
    return mask;
}

std::pair<int, int> read_dimensions(const fs::path& path) {
    FilePtr file = open_file(path, "rb");
    png_structp png_ptr = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png_ptr) fail("IoError", "libpng init failed for " + path.string());
    png_infop info_ptr = png_create_info_struct(png_ptr);
    if (!info_ptr) {
        png_destroy_read_struct(&png_ptr, nullptr, nullptr);
        fail("IoError", "libpng init failed for " + path.string());
    }
    if (setjmp(png_jmpbuf(png_ptr))) {
        png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
        fail("IoError", "failed to read header of " + path.string());
    }
    png_init_io(png_ptr, file.get());
    png_read_info(png_ptr, info_ptr);
    const int w = static_cast<int>(png_get_image_width(png_ptr, info_ptr));
    const int h = static_cast<int>(png_get_image_height(png_ptr, info_ptr));
    png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
    return {w, h};
}

void write_image(const fs::path& path, const RasterImage& image) {
    image.validate();
    encode(path, image.pixels.data(), image.width, image.height, RasterImage::kChannels);
}

void write_mask(const fs::path& path, const LabelMask& mask) {
    mask.validate();
    encode(path, mask.classes.data(), mask.width, mask.height, 1);
}

}  // namespace gsdkit::png
