#pragma once

#include <cstdint>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/image.hpp"

namespace featkit {

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

/// (width+1) x (height+1) table of cumulative sums; row/column 0 are zero.
struct IntegralImage {
    int width = 0;   // source image width
    int height = 0;  // source image height
    std::vector<std::uint64_t> table;

    std::uint64_t at(int x, int y) const {
        return table[static_cast<std::size_t>(y) * (width + 1) + x];
    }
};

inline IntegralImage integral(const GrayImage& img) {
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    ii.table.assign(static_cast<std::size_t>(img.width + 1) * (img.height + 1), 0);
    const int stride = img.width + 1;
    for (int y = 0; y < img.height; ++y) {
        std::uint64_t row = 0;
        for (int x = 0; x < img.width; ++x) {
            row += img.at(x, y);
            ii.table[static_cast<std::size_t>(y + 1) * stride + (x + 1)] =
                ii.table[static_cast<std::size_t>(y) * stride + (x + 1)] + row;
        }
    }
    return ii;
}

inline std::uint64_t box_sum(const IntegralImage& ii, const Rect& r) {
    if (r.x < 0 || r.y < 0 || r.width < 0 || r.height < 0 ||
        r.x + r.width > ii.width || r.y + r.height > ii.height)
        raise(ErrorCode::RectOutOfBounds, "box_sum: rect outside image");
    const int x0 = r.x, y0 = r.y, x1 = r.x + r.width, y1 = r.y + r.height;
    return ii.at(x1, y1) - ii.at(x0, y1) - ii.at(x1, y0) + ii.at(x0, y0);
}

}  // namespace featkit
