#include "spar/augment.hpp"

#include <cmath>

#include "spar/error.hpp"

namespace spar::data {

void AugmentParams::validate() const {
    require(max_scale_delta >= 0.0 && max_rotation_deg >= 0.0 && max_shift_frac >= 0.0,
            "augmentation ranges must be non-negative");
    require(max_scale_delta < 1.0, "max_scale_delta must stay below 1");
}

namespace {

float bilinear_or_zero(const std::vector<float>& img, int h, int w, double sx, double sy) {
    if (sx < 0.0 || sy < 0.0 || sx > w - 1.0 || sy > h - 1.0) return 0.0f;
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = sx - x0, fy = sy - y0;
    const double v00 = img[static_cast<size_t>(y0) * w + x0];
    const double v01 = img[static_cast<size_t>(y0) * w + x1];
    const double v10 = img[static_cast<size_t>(y1) * w + x0];
    const double v11 = img[static_cast<size_t>(y1) * w + x1];
    const double v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
    return static_cast<float>(v);
}

std::uint8_t nearest_or_zero(const std::vector<std::uint8_t>& m, int h, int w, double sx, double sy) {
    const long xi = std::lround(sx);
    const long yi = std::lround(sy);
    if (xi < 0 || yi < 0 || xi >= w || yi >= h) return 0;
    return m[static_cast<size_t>(yi) * w + xi];
}

} // namespace

SlicePair augment_slice(const SlicePair& in, const AugmentParams& params, Rng& rng) {
    params.validate();
    require(static_cast<std::int64_t>(in.image.size()) == static_cast<std::int64_t>(in.h) * in.w &&
                in.image.size() == in.mask.size(),
            "augment: image and mask must share the slice shape");

    const double scale = rng.uniform(1.0 - params.max_scale_delta, 1.0 + params.max_scale_delta);
    const double theta =
        rng.uniform(-params.max_rotation_deg, params.max_rotation_deg) * (3.14159265358979323846 / 180.0);
    const double tx = rng.uniform(-params.max_shift_frac, params.max_shift_frac) * in.w;
    const double ty = rng.uniform(-params.max_shift_frac, params.max_shift_frac) * in.h;

    SlicePair out;
    out.h = in.h;
    out.w = in.w;
    out.image.resize(in.image.size());
    out.mask.resize(in.mask.size());

    const double cx = (in.w - 1) / 2.0, cy = (in.h - 1) / 2.0;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    // dst = R(theta) * scale * (src - c) + c + t, inverted per output pixel.
    const double inv_scale = 1.0 / scale;
    for (int y = 0; y < in.h; ++y) {
        for (int x = 0; x < in.w; ++x) {
            const double ux = x - cx - tx;
            const double uy = y - cy - ty;
            const double sx = inv_scale * (cos_t * ux + sin_t * uy) + cx;
            const double sy = inv_scale * (-sin_t * ux + cos_t * uy) + cy;
            out.image[static_cast<size_t>(y) * in.w + x] = bilinear_or_zero(in.image, in.h, in.w, sx, sy);
            out.mask[static_cast<size_t>(y) * in.w + x] = nearest_or_zero(in.mask, in.h, in.w, sx, sy);
        }
    }
    return out;
}

Tensor one_hot(const std::uint8_t* labels, int h, int w, int num_classes) {
    require(num_classes >= 1, "one_hot: class count must be positive");
    Tensor t({h, w, num_classes});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::uint8_t lab = labels[static_cast<size_t>(y) * w + x];
            if (lab >= num_classes)
                throw InvalidArgument("one_hot: label value " + std::to_string(lab) +
                                      " exceeds class count " + std::to_string(num_classes));
            t[(static_cast<std::int64_t>(y) * w + x) * num_classes + lab] = 1.0f;
        }
    return t;
}

} // namespace spar::data
