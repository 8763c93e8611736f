#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/image.hpp"

// Netpbm decoding, the only raster format this toolkit consumes. P2/P5 are
// grayscale passthrough; P3/P6 collapse to luma with BT.601 weights.

namespace featkit {

inline constexpr std::size_t kDefaultPixelCap = 100'000'000;  // 10^8 px

namespace detail {

struct PnmCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    std::uint8_t peek() const { return bytes[pos]; }

    // Whitespace and '#'-to-end-of-line comments separate header tokens.
    void skip_space_and_comments() {
        while (!eof()) {
            const std::uint8_t c = peek();
            if (std::isspace(c)) {
                ++pos;
            } else if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    unsigned next_uint(const char* what) {
        skip_space_and_comments();
        if (eof() || !std::isdigit(peek()))
            raise(ErrorCode::MalformedHeader,
                  std::string("netpbm: expected unsigned integer for ") + what);
        unsigned long v = 0;
        while (!eof() && std::isdigit(peek())) {
            v = v * 10 + (peek() - '0');
            if (v > 0xFFFFFFFFul)
                raise(ErrorCode::DimensionOverflow, "netpbm: header value overflow");
            ++pos;
        }
        return static_cast<unsigned>(v);
    }
};

inline std::uint8_t luma_bt601(unsigned r, unsigned g, unsigned b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    long v = std::lround(y);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    return static_cast<std::uint8_t>(v);
}

}  // namespace detail

inline GrayImage decode_netpbm(std::span<const std::uint8_t> bytes,
                               std::size_t pixel_cap = kDefaultPixelCap) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        raise(ErrorCode::UnknownMagic, "netpbm: missing P? magic");
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        raise(ErrorCode::UnknownMagic, std::string("netpbm: unsupported magic P") + kind);
    const bool color = (kind == '3' || kind == '6');
    const bool raw = (kind == '5' || kind == '6');

    detail::PnmCursor cur{bytes, 2};
    const unsigned width = cur.next_uint("width");
    const unsigned height = cur.next_uint("height");
    const unsigned maxval = cur.next_uint("maxval");
    if (width == 0 || height == 0)
        raise(ErrorCode::MalformedHeader, "netpbm: zero width or height");
    if (static_cast<std::uint64_t>(width) * height > pixel_cap)
        raise(ErrorCode::DimensionOverflow, "netpbm: image exceeds pixel cap");
    if (maxval == 0 || maxval > 255)
        raise(ErrorCode::UnsupportedMaxval, "netpbm: maxval must be in [1,255]");

    const std::size_t samples = static_cast<std::size_t>(width) * height * (color ? 3 : 1);
    std::vector<std::uint8_t> raster(samples);

    if (raw) {
        // Exactly one whitespace byte separates maxval from the payload.
        if (cur.eof() || !std::isspace(cur.peek()))
            raise(ErrorCode::TruncatedPayload, "netpbm: missing header terminator");
        ++cur.pos;
        if (bytes.size() - cur.pos < samples)
            raise(ErrorCode::TruncatedPayload, "netpbm: raw payload too short");
        for (std::size_t i = 0; i < samples; ++i) raster[i] = bytes[cur.pos + i];
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            cur.skip_space_and_comments();
            if (cur.eof())
                raise(ErrorCode::TruncatedPayload, "netpbm: ascii payload too short");
            const unsigned v = cur.next_uint("sample");
            if (v > maxval)
                raise(ErrorCode::MalformedHeader, "netpbm: sample above maxval");
            raster[i] = static_cast<std::uint8_t>(v);
        }
    }

    GrayImage out(static_cast<int>(width), static_cast<int>(height));
    if (color) {
        for (std::size_t i = 0; i < out.pixel_count(); ++i)
            out.data[i] = detail::luma_bt601(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
    } else {
        out.data = std::move(raster);
    }
    return out;
}

/// Binary PGM bytes; decode_netpbm(encode_p5(img)) is the identity.
inline std::vector<std::uint8_t> encode_p5(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

}  // namespace featkit
