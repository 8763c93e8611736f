#pragma once

#include <cmath>

#include "featkit/descriptor.hpp"
#include "featkit/error.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"

namespace featkit {

/// Float baseline: the 16x16 patch around the keypoint, mean-subtracted and
/// L2-normalized. Invariant to affine intensity changes a*I+b with a > 0.
/// A zero-variance patch maps to the all-zero (degenerate) vector.
inline FloatDescriptor patch_descriptor(const GrayImage& img, const Keypoint& kp) {
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    if (cx - 8 < 0 || cy - 8 < 0 || cx + 7 >= img.width || cy + 7 >= img.height)
        raise(ErrorCode::OutOfBounds, "patch_descriptor: 16x16 patch leaves the image");

    FloatDescriptor desc;
    double mean = 0.0;
    int i = 0;
    for (int dy = -8; dy <= 7; ++dy)
        for (int dx = -8; dx <= 7; ++dx) {
            const double v = img.at(cx + dx, cy + dy);
            desc.values[i++] = v;
            mean += v;
        }
    mean /= kDescriptorFloats;

    double norm_sq = 0.0;
    for (double& v : desc.values) {
        v -= mean;
        norm_sq += v * v;
    }
    if (norm_sq == 0.0) return desc;  // flat patch, stays all-zero
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (double& v : desc.values) v *= inv_norm;
    return desc;
}

}  // namespace featkit
