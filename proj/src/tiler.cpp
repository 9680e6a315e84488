#include "gsdkit/tiler.hpp"

#include <algorithm>
#include <cstring>

#include "gsdkit/error.hpp"

namespace gsdkit {
namespace {

std::vector<int> axis_offsets(int image_dim, int patch, int n, const char* axis) {
    if (n == 1) {
        if (patch != image_dim)
            fail("GridError", std::string("single ") + axis +
                                  " tile must span the full axis (patch " + std::to_string(patch) +
                                  " vs " + std::to_string(image_dim) + ")");
        return {0};
    }
    const int span = image_dim - patch;
    if (span % (n - 1) != 0)
        fail("GridError", std::string(axis) + " stride (" + std::to_string(image_dim) + " - " +
                              std::to_string(patch) + ") / " + std::to_string(n - 1) +
                              " is not an integer");
    const int stride = span / (n - 1);
    if (stride == 0)
        fail("GridError", std::string(axis) + " offsets would repeat (stride 0)");
    std::vector<int> offsets(n);
    for (int i = 0; i < n; ++i) offsets[i] = i * stride;
    return offsets;
}

}  // namespace

TileGrid plan_grid(int image_w, int image_h, int patch, int rows, int cols) {
    if (patch < 1) fail("GridError", "patch size must be >= 1");
    if (rows < 1 || cols < 1) fail("GridError", "grid counts must be >= 1");
    if (patch > image_w || patch > image_h)
        fail("GeometryError", "patch " + std::to_string(patch) + " larger than image " +
                                  std::to_string(image_w) + "x" + std::to_string(image_h));

    TileGrid grid;
    grid.image_w = image_w;
    grid.image_h = image_h;
    grid.patch = patch;
    grid.rows = rows;
    grid.cols = cols;
    grid.x_offsets = axis_offsets(image_w, patch, cols, "x");
    grid.y_offsets = axis_offsets(image_h, patch, rows, "y");
    return grid;
}

RasterImage crop_image(const RasterImage& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || x0 + w > img.width || y0 + h > img.height)
        fail("GeometryError", "crop outside image bounds");
    RasterImage out = RasterImage::create(w, h, img.gsd_cm);
    const std::size_t row_bytes = static_cast<std::size_t>(w) * RasterImage::kChannels;
    for (int y = 0; y < h; ++y)
        std::memcpy(out.row(y), img.row(y0 + y) + static_cast<std::size_t>(x0) * RasterImage::kChannels,
                    row_bytes);
    return out;
}

LabelMask crop_mask(const LabelMask& mask, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || x0 + w > mask.width || y0 + h > mask.height)
        fail("GeometryError", "crop outside mask bounds");
    LabelMask out = LabelMask::create(w, h);
    for (int y = 0; y < h; ++y)
        std::memcpy(out.row(y), mask.row(y0 + y) + x0, static_cast<std::size_t>(w));
    return out;
}

std::vector<RasterImage> extract_tiles(const RasterImage& img, const TileGrid& grid) {
    if (img.width != grid.image_w || img.height != grid.image_h)
        fail("GeometryError", "grid was planned for different image dimensions");
    std::vector<RasterImage> tiles;
    tiles.reserve(grid.count());
    for (const int yo : grid.y_offsets)
        for (const int xo : grid.x_offsets)
            tiles.push_back(crop_image(img, xo, yo, grid.patch, grid.patch));
    return tiles;
}

std::vector<TilePair> extract_patches(const RasterImage& img, const LabelMask& mask,
                                      const TileGrid& grid) {
    if (img.width != grid.image_w || img.height != grid.image_h)
        fail("GeometryError", "grid was planned for different image dimensions");
    if (mask.width != img.width || mask.height != img.height)
        fail("GeometryError", "mask is not co-registered with the image");

    std::vector<TilePair> out;
    out.reserve(grid.count());
    int index = 0;
    for (const int yo : grid.y_offsets) {
        for (const int xo : grid.x_offsets) {
            TilePair p;
            p.image = crop_image(img, xo, yo, grid.patch, grid.patch);
            p.mask = crop_mask(mask, xo, yo, grid.patch, grid.patch);
            p.patch_index = index++;
            out.push_back(std::move(p));
        }
    }
    return out;
}

RasterImage reassemble(const std::vector<std::pair<int, RasterImage>>& patches,
                       const TileGrid& grid) {
    const int n = grid.count();
    if (static_cast<int>(patches.size()) != n)
        fail("GridError", "expected " + std::to_string(n) + " patches, got " +
                              std::to_string(patches.size()));

    std::vector<const RasterImage*> by_index(n, nullptr);
    for (const auto& [index, image] : patches) {
        if (index < 0 || index >= n) fail("GridError", "patch index " + std::to_string(index) + " out of range");
        if (by_index[index]) fail("GridError", "duplicate patch index " + std::to_string(index));
        if (image.width != grid.patch || image.height != grid.patch)
            fail("GeometryError", "patch dimensions do not match the grid");
        by_index[index] = &image;
    }

    RasterImage out = RasterImage::create(grid.image_w, grid.image_h, patches.front().second.gsd_cm);
    const std::size_t patch_row_bytes = static_cast<std::size_t>(grid.patch) * RasterImage::kChannels;
    for (int index = 0; index < n; ++index) {
        const RasterImage& patch = *by_index[index];
        const int xo = grid.x_offsets[index % grid.cols];
        const int yo = grid.y_offsets[index / grid.cols];
        for (int y = 0; y < grid.patch; ++y)
            std::memcpy(out.row(yo + y) + static_cast<std::size_t>(xo) * RasterImage::kChannels,
                        patch.row(y), patch_row_bytes);
    }
    return out;
}

}  // namespace gsdkit
