#include "gsdkit/image.hpp"

#include <cmath>
#include <cstdlib>

#include "gsdkit/error.hpp"

namespace gsdkit {

RasterImage RasterImage::create(int w, int h, Rational gsd, std::uint8_t fill) {
    if (w < 1 || h < 1) fail("GeometryError", "image dimensions must be >= 1");
    RasterImage img;
    img.width = w;
    img.height = h;
    img.gsd_cm = gsd;
    img.pixels.assign(static_cast<std::size_t>(w) * h * kChannels, fill);
    return img;
}

void RasterImage::validate() const {
    if (width < 1 || height < 1) fail("GeometryError", "image dimensions must be >= 1");
    if (pixels.size() != static_cast<std::size_t>(width) * height * kChannels)
        fail("GeometryError", "pixel buffer length does not match width*height*channels");
    if (!gsd_cm.positive()) fail("GeometryError", "gsd_cm must be positive");
}

LabelMask LabelMask::create(int w, int h, std::uint8_t fill) {
    if (w < 1 || h < 1) fail("GeometryError", "mask dimensions must be >= 1");
    LabelMask mask;
    mask.width = w;
    mask.height = h;
    mask.classes.assign(static_cast<std::size_t>(w) * h, fill);
    return mask;
}

void LabelMask::validate() const {
    if (width < 1 || height < 1) fail("GeometryError", "mask dimensions must be >= 1");
    if (classes.size() != static_cast<std::size_t>(width) * height)
        fail("GeometryError", "class buffer length does not match width*height");
    for (const std::uint8_t v : classes) {
        if (v > 1) fail("InvalidMaskValue", "mask value " + std::to_string(v) + " outside {0, 1}");
    }
}

double mean_absolute_difference(const RasterImage& a, const RasterImage& b) {
    if (a.width != b.width || a.height != b.height)
        fail("GeometryError", "mean_absolute_difference requires equal dimensions");
    if (a.pixels.empty()) return 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        total += static_cast<std::uint64_t>(std::abs(int(a.pixels[i]) - int(b.pixels[i])));
    return static_cast<double>(total) / static_cast<double>(a.pixels.size());
}

}  // namespace gsdkit
