#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/image.hpp"

namespace featkit {

namespace detail {

/// Normalized Gaussian taps for offsets -radius..radius, radius = ceil(3*sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace detail

/// Separable Gaussian blur, replicated edges. sigma = 0 is the identity.
inline FloatImage gaussian_blur(const FloatImage& img, double sigma) {
    if (sigma < 0.0) raise(ErrorCode::MalformedHeader, "gaussian_blur: negative sigma");
    if (sigma == 0.0) return img;

    const std::vector<double> kernel = detail::gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width, h = img.height;

    FloatImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        const double* row = &img.data[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * row[detail::clamp_index(x + i, w)];
            tmp.at(x, y) = acc;
        }
    }
    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(x, detail::clamp_index(y + i, h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

inline FloatImage gaussian_blur(const GrayImage& img, double sigma) {
    return gaussian_blur(to_float(img), sigma);
}

/// 3x3 Sobel derivatives scaled by 1/8; the one-pixel border is left at 0.
inline std::pair<FloatImage, FloatImage> sobel_gradients(const FloatImage& img) {
    const int w = img.width, h = img.height;
    if (w < 3 || h < 3)
        raise(ErrorCode::ImageTooSmall, "sobel_gradients: image must be at least 3x3");

    FloatImage gx(w, h), gy(w, h);
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            const double tl = img.at(x - 1, y - 1), tc = img.at(x, y - 1), tr = img.at(x + 1, y - 1);
            const double ml = img.at(x - 1, y), mr = img.at(x + 1, y);
            const double bl = img.at(x - 1, y + 1), bc = img.at(x, y + 1), br = img.at(x + 1, y + 1);
            gx.at(x, y) = ((tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)) / 8.0;
            gy.at(x, y) = ((bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)) / 8.0;
        }
    }
    return {std::move(gx), std::move(gy)};
}

inline std::pair<FloatImage, FloatImage> sobel_gradients(const GrayImage& img) {
    return sobel_gradients(to_float(img));
}

}  // namespace featkit
