#include "gsdkit/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsdkit/error.hpp"

namespace gsdkit {
namespace {

constexpr int kLanczosRadius = 3;

double filter_radius(FilterKind f) {
    switch (f) {
        case FilterKind::Lanczos3: return kLanczosRadius;
        case FilterKind::Box: return 0.5;
        case FilterKind::NearestNeighbor: return 0.0;  // handled separately
    }
    return 0.0;
}

double box_kernel(double x) { return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0; }

double kernel_value(FilterKind f, double x) {
    return f == FilterKind::Box ? box_kernel(x) : lanczos_kernel(x, kLanczosRadius);
}

}  // namespace

double lanczos_kernel(double x, int a) {
    x = std::fabs(x);
    if (x >= a) return 0.0;
    if (x == std::floor(x)) return x == 0.0 ? 1.0 : 0.0;
    const double px = std::numbers::pi * x;
    return a * std::sin(px) * std::sin(px / a) / (px * px);
}

int nearest_source_index(int out_coord, int in_size, int out_size) {
    const double pos = (out_coord + 0.5) * static_cast<double>(in_size) / out_size;
    const int idx = static_cast<int>(std::floor(pos));
    return std::clamp(idx, 0, in_size - 1);
}

ResamplePlan plan_resample(int in_size, int out_size, FilterKind filter) {
    if (in_size < 1 || out_size < 1)
        fail("GeometryError", "resample sizes must be >= 1");

    ResamplePlan plan;
    plan.in_size = in_size;
    plan.out_size = out_size;
    plan.filter = filter;
    plan.outputs.resize(out_size);

    if (filter == FilterKind::NearestNeighbor) {
        for (int o = 0; o < out_size; ++o) {
            plan.outputs[o].indices = {nearest_source_index(o, in_size, out_size)};
            plan.outputs[o].weights = {1.0};
        }
        return plan;
    }

    // When minifying, stretch the kernel by the inverse scale so it spans the
    // source footprint of one output sample.
    const double stretch = std::max(1.0, static_cast<double>(in_size) / out_size);
    const double support = filter_radius(filter) * stretch;

    for (int o = 0; o < out_size; ++o) {
        const double center = (o + 0.5) * static_cast<double>(in_size) / out_size - 0.5;
        const int lo = static_cast<int>(std::ceil(center - support));
        const int hi = static_cast<int>(std::floor(center + support));

        ResampleTaps& taps = plan.outputs[o];
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double w = kernel_value(filter, (i - center) / stretch);
            if (w == 0.0) continue;
            const int idx = std::clamp(i, 0, in_size - 1);  // edge clamp
            if (!taps.indices.empty() && taps.indices.back() == idx) {
                taps.weights.back() += w;  // folded border contributions
            } else {
                taps.indices.push_back(idx);
                taps.weights.push_back(w);
            }
            sum += w;
        }
        if (taps.indices.empty()) {
            // Degenerate support (can only happen for pathological phases);
            // fall back to the nearest sample.
            taps.indices = {nearest_source_index(o, in_size, out_size)};
            taps.weights = {1.0};
            sum = 1.0;
        }
        for (double& w : taps.weights) w /= sum;
    }
    return plan;
}

namespace {

// Horizontal pass: (in_w x h) -> (out_w x h), channels interleaved.
std::vector<double> apply_rows(const std::uint8_t* src, int in_w, int h, const ResamplePlan& px) {
    std::vector<double> out(static_cast<std::size_t>(px.out_size) * h * RasterImage::kChannels);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = src + static_cast<std::size_t>(y) * in_w * RasterImage::kChannels;
        double* orow = out.data() + static_cast<std::size_t>(y) * px.out_size * RasterImage::kChannels;
        for (int x = 0; x < px.out_size; ++x) {
            const ResampleTaps& taps = px.outputs[x];
            double acc[RasterImage::kChannels] = {0.0, 0.0, 0.0};
            for (std::size_t t = 0; t < taps.indices.size(); ++t) {
                const std::uint8_t* p = row + taps.indices[t] * RasterImage::kChannels;
                const double w = taps.weights[t];
                acc[0] += w * p[0];
                acc[1] += w * p[1];
                acc[2] += w * p[2];
            }
            double* q = orow + static_cast<std::size_t>(x) * RasterImage::kChannels;
            q[0] = acc[0];
            q[1] = acc[1];
            q[2] = acc[2];
        }
    }
    return out;
}

std::uint8_t quantize(double v) {
    v = std::clamp(v, 0.0, 255.0);
    return static_cast<std::uint8_t>(std::floor(v + 0.5));  // round half-up
}

}  // namespace

RasterImage resize_image(const RasterImage& img, int out_w, int out_h, FilterKind filter) {
    img.validate();
    if (out_w < 1 || out_h < 1) fail("GeometryError", "resize target must be >= 1");

    const ResamplePlan px = plan_resample(img.width, out_w, filter);
    const ResamplePlan py = plan_resample(img.height, out_h, filter);

    const std::vector<double> mid = apply_rows(img.pixels.data(), img.width, img.height, px);

    RasterImage out;
    out.width = out_w;
    out.height = out_h;
    out.gsd_cm = img.gsd_cm * Rational(img.width, out_w);
    out.pixels.resize(static_cast<std::size_t>(out_w) * out_h * RasterImage::kChannels);

    const std::size_t mid_stride = static_cast<std::size_t>(out_w) * RasterImage::kChannels;
    for (int y = 0; y < out_h; ++y) {
        const ResampleTaps& taps = py.outputs[y];
        std::uint8_t* orow = out.row(y);
        for (int x = 0; x < out_w; ++x) {
            double acc[RasterImage::kChannels] = {0.0, 0.0, 0.0};
            for (std::size_t t = 0; t < taps.indices.size(); ++t) {
                const double* p = mid.data() + taps.indices[t] * mid_stride +
                                  static_cast<std::size_t>(x) * RasterImage::kChannels;
                const double w = taps.weights[t];
                acc[0] += w * p[0];
                acc[1] += w * p[1];
                acc[2] += w * p[2];
            }
            std::uint8_t* q = orow + static_cast<std::size_t>(x) * RasterImage::kChannels;
            q[0] = quantize(acc[0]);
            q[1] = quantize(acc[1]);
            q[2] = quantize(acc[2]);
        }
    }
    return out;
}

LabelMask resize_mask(const LabelMask& mask, int out_w, int out_h) {
    mask.validate();
    if (out_w < 1 || out_h < 1) fail("GeometryError", "resize target must be >= 1");

    std::vector<int> xmap(out_w);
    for (int x = 0; x < out_w; ++x) xmap[x] = nearest_source_index(x, mask.width, out_w);

    LabelMask out = LabelMask::create(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const std::uint8_t* src = mask.row(nearest_source_index(y, mask.height, out_h));
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < out_w; ++x) dst[x] = src[xmap[x]];
    }
    return out;
}

RasterImage degrade(const RasterImage& img, int low_w, int low_h) {
    img.validate();
    if (low_w < 1 || low_h < 1 || low_w >= img.width || low_h >= img.height)
        fail("InvalidDegradeTarget", std::to_string(low_w) + "x" + std::to_string(low_h) +
                                         " does not reduce " + std::to_string(img.width) + "x" +
                                         std::to_string(img.height));
    const RasterImage low = resize_image(img, low_w, low_h, FilterKind::Lanczos3);
    RasterImage up = resize_image(low, img.width, img.height, FilterKind::NearestNeighbor);
    up.gsd_cm = img.gsd_cm;  // metadata unchanged; effective resolution is not
    return up;
}

bool anisotropic_resize(int in_w, int in_h, int out_w, int out_h) {
    return Rational(in_w, out_w) != Rational(in_h, out_h);
}

}  // namespace gsdkit
