#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsdkit/rational.hpp"

namespace gsdkit {

// 8-bit RGB pixel grid with ground-sample-distance metadata. Row-major,
// interleaved channels.
struct RasterImage {
    static constexpr int kChannels = 3;

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    Rational gsd_cm{0, 1};

    static RasterImage create(int w, int h, Rational gsd, std::uint8_t fill = 0);

    std::uint8_t* row(int y) { return pixels.data() + static_cast<std::size_t>(y) * width * kChannels; }
    const std::uint8_t* row(int y) const {
        return pixels.data() + static_cast<std::size_t>(y) * width * kChannels;
    }

    std::uint8_t& at(int x, int y, int c) { return row(y)[x * kChannels + c]; }
    std::uint8_t at(int x, int y, int c) const { return row(y)[x * kChannels + c]; }

    bool same_pixels(const RasterImage& other) const {
        return width == other.width && height == other.height && pixels == other.pixels;
    }

    // Throws GeometryError when the buffer does not match the declared
    // dimensions or the GSD is not positive.
    void validate() const;
};

// Per-pixel class-index grid co-registered with a RasterImage.
// 0 = background, 1 = tree.
struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> classes;

    static LabelMask create(int w, int h, std::uint8_t fill = 0);

    std::uint8_t* row(int y) { return classes.data() + static_cast<std::size_t>(y) * width; }
    const std::uint8_t* row(int y) const {
        return classes.data() + static_cast<std::size_t>(y) * width;
    }

    std::uint8_t& at(int x, int y) { return row(y)[x]; }
    std::uint8_t at(int x, int y) const { return row(y)[x]; }

    bool same_pixels(const LabelMask& other) const {
        return width == other.width && height == other.height && classes == other.classes;
    }

    void validate() const;  // GeometryError / InvalidMaskValue
};

double mean_absolute_difference(const RasterImage& a, const RasterImage& b);

}  // namespace gsdkit
