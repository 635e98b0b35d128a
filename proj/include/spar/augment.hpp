#pragma once

#include <cstdint>
#include <vector>

#include "spar/rng.hpp"
#include "spar/tensor.hpp"

namespace spar::data {

// Train-time affine jitter ranges. All transforms are applied identically to
// the image (bilinear) and the mask (nearest neighbor); out-of-frame regions
// are filled with background.
struct AugmentParams {
    double max_scale_delta = 0.1;
    double max_rotation_deg = 15.0;
    double max_shift_frac = 0.1;

    void validate() const;
    bool identity() const {
        return max_scale_delta == 0.0 && max_rotation_deg == 0.0 && max_shift_frac == 0.0;
    }
};

// One 2D training slice: image row-major [h][w], labels alongside.
struct SlicePair {
    int h = 0, w = 0;
    std::vector<float> image;
    std::vector<std::uint8_t> mask;
};

// Samples scale in [1-d,1+d], rotation in [-r,+r], per-axis shift in
// [-f,+f]*size (in that order) and applies the same transform to both planes.
SlicePair augment_slice(const SlicePair& in, const AugmentParams& params, Rng& rng);

// One-hot encoding of a 2D label grid into (h, w, C). Labels >= C are an error.
Tensor one_hot(const std::uint8_t* labels, int h, int w, int num_classes);

} // namespace spar::data
