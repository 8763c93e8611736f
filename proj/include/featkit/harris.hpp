#pragma once

#include <cmath>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/filters.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"

// Structure-tensor corner detectors. The tensor is the sigma_i-smoothed
// outer product of the gradients of the sigma_d-smoothed image; Harris
// scores det - k*trace^2, GFTT scores the smaller eigenvalue.

namespace featkit {

enum class TensorResponse { Harris, MinEigenvalue };

inline FloatImage structure_tensor_response(const GrayImage& img, const DetectorConfig& cfg,
                                            TensorResponse mode) {
    if (img.width < 16 || img.height < 16)
        raise(ErrorCode::ImageTooSmall, "structure tensor: image must be at least 16x16");

    const FloatImage smoothed = gaussian_blur(img, cfg.harris_sigma_d);
    const auto [gx, gy] = sobel_gradients(smoothed);

    const int w = img.width, h = img.height;
    FloatImage xx(w, h), xy(w, h), yy(w, h);
    for (std::size_t i = 0; i < xx.data.size(); ++i) {
        const double a = gx.data[i], b = gy.data[i];
        xx.data[i] = a * a;
        xy.data[i] = a * b;
        yy.data[i] = b * b;
    }
    const FloatImage sxx = gaussian_blur(xx, cfg.harris_sigma_i);
    const FloatImage sxy = gaussian_blur(xy, cfg.harris_sigma_i);
    const FloatImage syy = gaussian_blur(yy, cfg.harris_sigma_i);

    FloatImage resp(w, h);
    for (std::size_t i = 0; i < resp.data.size(); ++i) {
        const double a = sxx.data[i], c = sxy.data[i], b = syy.data[i];
        if (mode == TensorResponse::Harris) {
            const double det = a * b - c * c;
            const double tr = a + b;
            resp.data[i] = det - cfg.harris_k * tr * tr;
        } else {
            // (tr - sqrt(tr^2 - 4 det)) / 2 in the numerically safe form:
            // the discriminant equals (a-b)^2 + 4c^2 and cannot go negative.
            const double disc = std::sqrt((a - b) * (a - b) + 4.0 * c * c);
            resp.data[i] = 0.5 * ((a + b) - disc);
        }
    }
    return resp;
}

namespace detail {

/// Local maxima of resp inside the border margin, kept above
/// quality * max(resp), then radius-suppressed and capped.
inline std::vector<Keypoint> pick_response_peaks(const FloatImage& resp,
                                                 const DetectorConfig& cfg) {
    const int w = resp.width, h = resp.height;
    const int m = cfg.border_margin;
    if (w - 2 * m <= 0 || h - 2 * m <= 0) return {};

    double max_resp = -std::numeric_limits<double>::infinity();
    for (int y = m; y < h - m; ++y)
        for (int x = m; x < w - m; ++x)
            max_resp = std::max(max_resp, resp.at(x, y));
    const double threshold = cfg.gftt_quality * max_resp;

    std::vector<Keypoint> candidates;
    for (int y = m; y < h - m; ++y) {
        for (int x = m; x < w - m; ++x) {
            const double v = resp.at(x, y);
            if (!(v > threshold)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (resp.at(x + dx, y + dy) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max)
                candidates.push_back({static_cast<double>(x), static_cast<double>(y), v, 0.0, 1.0});
        }
    }
    return top_k(nms(std::move(candidates), cfg.nms_radius),
                 static_cast<std::size_t>(cfg.max_keypoints));
}

}  // namespace detail

inline std::vector<Keypoint> harris(const GrayImage& img, const DetectorConfig& cfg = {}) {
    return detail::pick_response_peaks(
        structure_tensor_response(img, cfg, TensorResponse::Harris), cfg);
}

inline std::vector<Keypoint> gftt(const GrayImage& img, const DetectorConfig& cfg = {}) {
    return detail::pick_response_peaks(
        structure_tensor_response(img, cfg, TensorResponse::MinEigenvalue), cfg);
}

}  // namespace featkit
