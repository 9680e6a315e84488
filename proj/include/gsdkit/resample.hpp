#pragma once

#include <cstdint>
#include <vector>

#include "gsdkit/image.hpp"

namespace gsdkit {

enum class FilterKind { Lanczos3, NearestNeighbor, Box };

// Windowed-sinc kernel: sinc(x) * sinc(x/a) for |x| < a, 0 outside, with
// sinc(t) = sin(pi t)/(pi t). Exact at integer taps so that integer-aligned
// resampling reduces to a delta.
double lanczos_kernel(double x, int a);

struct ResampleTaps {
    std::vector<std::int32_t> indices;  // clamped into [0, in_size)
    std::vector<double> weights;        // normalized, sum 1
};

// Precomputed separable weights for one axis.
struct ResamplePlan {
    int in_size = 0;
    int out_size = 0;
    FilterKind filter = FilterKind::Lanczos3;
    std::vector<ResampleTaps> outputs;
};

ResamplePlan plan_resample(int in_size, int out_size, FilterKind filter);

// Nearest source index for an output coordinate (edge-clamped). Shared by the
// nearest-neighbor filter and mask resampling so both pick identical samples.
int nearest_source_index(int out_coord, int in_size, int out_size);

// Separable resize, rows then columns, edge-clamp boundaries. The result is
// clamped to [0, 255] and rounded half-up; gsd_out = gsd_in * in_w / out_w.
RasterImage resize_image(const RasterImage& img, int out_w, int out_h, FilterKind filter);

// Nearest-neighbor only; output stays closed over {0, 1}.
LabelMask resize_mask(const LabelMask& mask, int out_w, int out_h);

// Resolution degradation round trip: Lanczos3 down to (low_w, low_h), then
// nearest-neighbor back up to the original size. Geometry and GSD metadata
// are preserved; effective resolution is not.
RasterImage degrade(const RasterImage& img, int low_w, int low_h);

// True when the implied horizontal and vertical scale ratios differ; callers
// record a lineage warning and let the width ratio govern the GSD.
bool anisotropic_resize(int in_w, int in_h, int out_w, int out_h);

}  // namespace gsdkit
