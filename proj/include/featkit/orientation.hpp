#pragma once

#include <cmath>

#include "featkit/error.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"

namespace featkit {

/// Intensity-centroid orientation: atan2 of the first moments of the
/// intensity over a disc centered on the keypoint. Returns 0 when both
/// moments vanish (flat or radially symmetric patch).
inline double orient_ic(const GrayImage& img, const Keypoint& kp, int radius = 15) {
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    if (cx - radius < 0 || cy - radius < 0 || cx + radius >= img.width ||
        cy + radius >= img.height)
        raise(ErrorCode::OutOfBounds, "orient_ic: disc leaves the image");

    double m10 = 0.0, m01 = 0.0;
    const int r2 = radius * radius;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy > r2) continue;
            const double v = img.at(cx + dx, cy + dy);
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    if (m10 == 0.0 && m01 == 0.0) return 0.0;
    return std::atan2(m01, m10);
}

}  // namespace featkit
