#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "featkit/descriptor.hpp"
#include "featkit/error.hpp"
#include "featkit/filters.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"
#include "featkit/rng.hpp"

// BRIEF binary tests and the ORB steering on top of them. One global
// sampling pattern (fixed seed) is shared by every image and run, otherwise
// descriptors would not be comparable across images.

namespace featkit {

inline constexpr std::uint64_t kPatternSeed = kGoldenGamma;
inline constexpr double kPatternSigma = 31.0 / 5.0;
inline constexpr int kPatternExtent = 15;  // offsets live in [-15, 15]^2
inline constexpr int kOrientationBins = 30;  // steering quantized to 12 degrees
inline constexpr double kBriefSmoothSigma = 2.0;

struct PatternPoint {
    int dx = 0;
    int dy = 0;
};

/// 256 test pairs; regenerated bit-identically from the seed.
struct SamplingPattern {
    std::array<PatternPoint, 2 * kDescriptorBits> points{};

    const PatternPoint& p(int i) const { return points[2 * i]; }
    const PatternPoint& q(int i) const { return points[2 * i + 1]; }
};

/// Offsets are isotropic Gaussian draws (sigma = 31/5) rounded to integers;
/// a point outside [-15, 15]^2 is rejected and redrawn. Points pair up
/// sequentially: test i compares points 2i and 2i+1.
inline SamplingPattern make_pattern(std::uint64_t seed = kPatternSeed) {
    SamplingPattern pattern;
    Rng rng(seed);
    for (PatternPoint& pt : pattern.points) {
        for (;;) {
            const long dx = std::lround(kPatternSigma * rng.next_gaussian());
            const long dy = std::lround(kPatternSigma * rng.next_gaussian());
            if (std::abs(dx) <= kPatternExtent && std::abs(dy) <= kPatternExtent) {
                pt = {static_cast<int>(dx), static_cast<int>(dy)};
                break;
            }
        }
    }
    return pattern;
}

/// The per-image smoothing every binary test assumes; run it once per image.
inline FloatImage smooth_for_brief(const GrayImage& img) {
    return gaussian_blur(img, kBriefSmoothSigma);
}

namespace detail {

inline double sample_nearest(const FloatImage& img, double x, double y) {
    const long xi = std::lround(x), yi = std::lround(y);
    if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height)
        raise(ErrorCode::OutOfBounds, "descriptor: sample outside image");
    return img.at(static_cast<int>(xi), static_cast<int>(yi));
}

}  // namespace detail

/// Bit i is set iff the smoothed intensity at kp+p_i is below the one at
/// kp+q_i. Orientation is ignored.
inline BinaryDescriptor brief(const FloatImage& smoothed, const Keypoint& kp,
                              const SamplingPattern& pattern) {
    BinaryDescriptor desc;
    for (int i = 0; i < kDescriptorBits; ++i) {
        const PatternPoint& p = pattern.p(i);
        const PatternPoint& q = pattern.q(i);
        const double a = detail::sample_nearest(smoothed, kp.x + p.dx, kp.y + p.dy);
        const double b = detail::sample_nearest(smoothed, kp.x + q.dx, kp.y + q.dy);
        if (a < b) desc.set_bit(i);
    }
    return desc;
}

/// BRIEF with the pattern rotated by the keypoint orientation, quantized to
/// 2*pi/30 so rotated patterns can be tabulated.
inline BinaryDescriptor steered_brief(const FloatImage& smoothed, const Keypoint& kp,
                                      const SamplingPattern& pattern) {
    constexpr double step = 2.0 * std::numbers::pi / kOrientationBins;
    const long bin = std::lround(kp.orientation / step);
    const double angle = static_cast<double>(bin) * step;
    const double c = std::cos(angle), s = std::sin(angle);

    BinaryDescriptor desc;
    for (int i = 0; i < kDescriptorBits; ++i) {
        const PatternPoint& p = pattern.p(i);
        const PatternPoint& q = pattern.q(i);
        const double px = std::lround(c * p.dx - s * p.dy);
        const double py = std::lround(s * p.dx + c * p.dy);
        const double qx = std::lround(c * q.dx - s * q.dy);
        const double qy = std::lround(s * q.dx + c * q.dy);
        const double a = detail::sample_nearest(smoothed, kp.x + px, kp.y + py);
        const double b = detail::sample_nearest(smoothed, kp.x + qx, kp.y + qy);
        if (a < b) desc.set_bit(i);
    }
    return desc;
}

}  // namespace featkit
