#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "featkit/error.hpp"

namespace featkit {

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double score = 0.0;
    double orientation = 0.0;  // radians in [-pi, pi]
    double scale = 1.0;
};

struct DetectorConfig {
    double harris_k = 0.04;
    double harris_sigma_d = 1.0;
    double harris_sigma_i = 2.0;
    int fast_threshold = 20;
    int fast_arc = 9;  // contiguous ring pixels required, in [9, 16]
    double gftt_quality = 0.01;
    double nms_radius = 5.0;
    int max_keypoints = 500;
    int border_margin = 22;  // keeps a rotated 31x31 descriptor window inside
};

namespace detail {

// Detection order: score descending, ties by ascending (y, x).
inline bool score_order(const Keypoint& a, const Keypoint& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

}  // namespace detail

/// Greedy radius suppression in descending score order; ties go to the
/// smaller (y, x) so results are reproducible.
inline std::vector<Keypoint> nms(std::vector<Keypoint> keypoints, double radius) {
    std::sort(keypoints.begin(), keypoints.end(), detail::score_order);
    std::vector<Keypoint> kept;
    kept.reserve(keypoints.size());
    const double r2 = radius * radius;
    for (const Keypoint& kp : keypoints) {
        bool suppressed = false;
        for (const Keypoint& k : kept) {
            const double dx = kp.x - k.x, dy = kp.y - k.y;
            if (dx * dx + dy * dy < r2) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(kp);
    }
    return kept;
}

inline std::vector<Keypoint> top_k(std::vector<Keypoint> keypoints, std::size_t k) {
    std::sort(keypoints.begin(), keypoints.end(), detail::score_order);
    if (keypoints.size() > k) keypoints.resize(k);
    return keypoints;
}

}  // namespace featkit
