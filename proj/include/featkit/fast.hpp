#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"

// FAST segment test on the 16-pixel Bresenham ring of radius 3. This is the
// direct test, not the learned decision tree; the outputs are identical.

namespace featkit {

/// Ring offsets starting at 12 o'clock, clockwise.
inline constexpr std::array<std::pair<int, int>, 16> kFastRing = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

struct SegmentTestResult {
    bool corner = false;
    double score = 0.0;  // sum of |ring - center| over the qualifying arc
};

/// Corner iff >= arc contiguous ring pixels (cyclically) are all brighter
/// than center+t or all darker than center-t.
inline SegmentTestResult segment_test(int center, const std::array<int, 16>& ring,
                                      int threshold, int arc) {
    const int hi = center + threshold;
    const int lo = center - threshold;

    // At most one polarity can host a run of >= 9 of 16, so scan each
    // polarity for its longest cyclic run and keep the qualifying one.
    for (int polarity = 0; polarity < 2; ++polarity) {
        std::array<bool, 16> ok;
        for (int i = 0; i < 16; ++i)
            ok[i] = polarity == 0 ? ring[i] > hi : ring[i] < lo;

        int best_len = 0, best_start = 0, run = 0;
        for (int i = 0; i < 32; ++i) {
            if (ok[i & 15]) {
                ++run;
                if (run > best_len) {
                    best_len = run;
                    best_start = i - run + 1;
                }
            } else {
                run = 0;
            }
        }
        if (best_len >= 16) {
            best_len = 16;
            best_start = 0;
        }
        if (best_len >= arc) {
            double score = 0.0;
            for (int i = 0; i < best_len; ++i)
                score += std::abs(ring[(best_start + i) & 15] - center);
            return {true, score};
        }
    }
    return {false, 0.0};
}

/// All segment-test corners with the ring fully inside the image; no border
/// filtering, no suppression. This is the raw pass the oracle checks.
inline std::vector<Keypoint> fast_segment_candidates(const GrayImage& img, int threshold,
                                                     int arc) {
    if (img.width < 7 || img.height < 7)
        raise(ErrorCode::ImageTooSmall, "fast: image must be at least 7x7");

    std::vector<Keypoint> out;
    std::array<int, 16> ring;
    for (int y = 3; y < img.height - 3; ++y) {
        for (int x = 3; x < img.width - 3; ++x) {
            const int c = img.at(x, y);
            // A run of >= 9 must cover at least two of the four compass
            // pixels (spaced 4 apart), which gives a cheap reject.
            const int p0 = img.at(x + kFastRing[0].first, y + kFastRing[0].second);
            const int p4 = img.at(x + kFastRing[4].first, y + kFastRing[4].second);
            const int p8 = img.at(x + kFastRing[8].first, y + kFastRing[8].second);
            const int p12 = img.at(x + kFastRing[12].first, y + kFastRing[12].second);
            const int hi = c + threshold, lo = c - threshold;
            const int brighter = (p0 > hi) + (p4 > hi) + (p8 > hi) + (p12 > hi);
            const int darker = (p0 < lo) + (p4 < lo) + (p8 < lo) + (p12 < lo);
            if (brighter < 2 && darker < 2) continue;

            for (int i = 0; i < 16; ++i)
                ring[i] = img.at(x + kFastRing[i].first, y + kFastRing[i].second);
            const SegmentTestResult r = segment_test(c, ring, threshold, arc);
            if (r.corner)
                out.push_back({static_cast<double>(x), static_cast<double>(y), r.score, 0.0, 1.0});
        }
    }
    return out;
}

inline std::vector<Keypoint> fast(const GrayImage& img, const DetectorConfig& cfg = {}) {
    std::vector<Keypoint> candidates =
        fast_segment_candidates(img, cfg.fast_threshold, cfg.fast_arc);
    const double m = cfg.border_margin;
    std::erase_if(candidates, [&](const Keypoint& kp) {
        return kp.x < m || kp.y < m || kp.x >= img.width - m || kp.y >= img.height - m;
    });
    return top_k(nms(std::move(candidates), cfg.nms_radius),
                 static_cast<std::size_t>(cfg.max_keypoints));
}

}  // namespace featkit
