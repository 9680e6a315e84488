#pragma once

#include <utility>
#include <vector>

#include "gsdkit/image.hpp"

namespace gsdkit {

// Deterministic placement of square patches over an image. Offsets are
// uniform-stride: first at 0, last at image_dim - patch, which forces
// stride = (image_dim - patch) / (n - 1). The 640/256 case gives {0,192,384}.
struct TileGrid {
    int image_w = 0;
    int image_h = 0;
    int patch = 0;
    int rows = 0;
    int cols = 0;
    std::vector<int> x_offsets;
    std::vector<int> y_offsets;

    int count() const { return rows * cols; }
};

TileGrid plan_grid(int image_w, int image_h, int patch, int rows, int cols);

struct TilePair {
    RasterImage image;
    LabelMask mask;
    int patch_index = 0;  // row-major
};

// Row-major patch extraction with mask co-tiling; patches keep the source GSD.
std::vector<TilePair> extract_patches(const RasterImage& img, const LabelMask& mask,
                                      const TileGrid& grid);

// Image-only variant, row-major order.
std::vector<RasterImage> extract_tiles(const RasterImage& img, const TileGrid& grid);

RasterImage crop_image(const RasterImage& img, int x0, int y0, int w, int h);
LabelMask crop_mask(const LabelMask& mask, int x0, int y0, int w, int h);

// Writes patches back onto the grid, last-wins in row-major index order.
// The patch set must be complete and duplicate-free.
RasterImage reassemble(const std::vector<std::pair<int, RasterImage>>& patches,
                       const TileGrid& grid);

}  // namespace gsdkit
