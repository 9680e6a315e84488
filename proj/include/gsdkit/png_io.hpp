#pragma once

#include <filesystem>
#include <utility>

#include "gsdkit/image.hpp"

namespace gsdkit::png {

// Decodes an 8-bit RGB PNG. Palette, grayscale, 16-bit and alpha variants are
// coerced to RGB8 on the way in. The caller supplies the GSD; PNG carries none.
RasterImage read_image(const std::filesystem::path& path, Rational gsd_cm);

// Decodes a single-channel mask PNG and checks that every value is 0 or 1.
LabelMask read_mask(const std::filesystem::path& path);

// Header-only dimension probe, no pixel decode.
std::pair<int, int> read_dimensions(const std::filesystem::path& path);

// Encoders use fixed settings (filter + compression level) so identical pixel
// data always yields identical bytes on disk.
void write_image(const std::filesystem::path& path, const RasterImage& image);
void write_mask(const std::filesystem::path& path, const LabelMask& mask);

}  // namespace gsdkit::png
