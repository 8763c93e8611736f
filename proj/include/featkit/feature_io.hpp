#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "featkit/describe.hpp"
#include "featkit/error.hpp"

// FEATB v1, the line-oriented interchange format for externally computed
// features:
//   FEATB 1 <binary|float> <dim>
//   <x> <y> <score> <orientation> <payload>
// Binary payload is dim/4 lowercase hex digits; float payload is dim
// decimals at 9 significant digits.

namespace featkit {

namespace detail {

/// Shortest decimal that parses back to the same double, so keypoint fields
/// survive a write/load round trip bit-exactly.
inline std::string format_exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view token, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        raise(ErrorCode::RowArityError,
              std::string("feature file: bad ") + what + " '" + std::string(token) + "'");
    return v;
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

}  // namespace detail

inline void write_features(std::ostream& out, const ImageFeatures& features) {
    out << "FEATB 1 " << to_string(features.kind) << " " << kDescriptorBits << "\n";
    char hex[3];
    for (std::size_t i = 0; i < features.size(); ++i) {
        const Keypoint& kp = features.keypoints[i];
        out << detail::format_exact(kp.x) << " " << detail::format_exact(kp.y) << " "
            << detail::format_exact(kp.score) << " " << detail::format_exact(kp.orientation)
            << " ";
        if (features.kind == DescriptorKind::Binary) {
            for (std::uint8_t b : features.binary[i].bytes) {
                std::snprintf(hex, sizeof hex, "%02x", b);
                out << hex;
            }
        } else {
            const FloatDescriptor& d = features.floats[i];
            char buf[32];
            for (int k = 0; k < kDescriptorFloats; ++k) {
                std::snprintf(buf, sizeof buf, "%.9g", d.values[k]);
                out << (k ? " " : "") << buf;
            }
        }
        out << "\n";
    }
}

inline void write_features(const std::filesystem::path& path, const ImageFeatures& features) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write " + path.string());
    write_features(out, features);
    if (!out.flush()) raise(ErrorCode::IoFailure, "short write to " + path.string());
}

inline ImageFeatures load_features(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        raise(ErrorCode::HeaderMismatch, "feature file: missing header");
    std::istringstream header(line);
    std::string magic, kind_str;
    int version = 0, dim = 0;
    if (!(header >> magic >> version >> kind_str >> dim) || magic != "FEATB" || version != 1)
        raise(ErrorCode::HeaderMismatch, "feature file: bad header '" + line + "'");

    ImageFeatures out;
    if (kind_str == "binary")
        out.kind = DescriptorKind::Binary;
    else if (kind_str == "float")
        out.kind = DescriptorKind::Float;
    else
        raise(ErrorCode::HeaderMismatch, "feature file: unknown kind '" + kind_str + "'");
    if (dim != kDescriptorBits)
        raise(ErrorCode::DimensionMismatch,
              "feature file: dimension " + std::to_string(dim) + " unsupported (want 256)");

    const std::size_t expected_tokens =
        out.kind == DescriptorKind::Binary ? 5 : 4 + kDescriptorFloats;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> tokens;
        std::istringstream row(line);
        std::string tok;
        while (row >> tok) tokens.push_back(tok);
        if (tokens.size() != expected_tokens)
            raise(ErrorCode::RowArityError,
                  "feature file: expected " + std::to_string(expected_tokens) +
                      " tokens, got " + std::to_string(tokens.size()));

        Keypoint kp;
        kp.x = detail::parse_double(tokens[0], "x");
        kp.y = detail::parse_double(tokens[1], "y");
        kp.score = detail::parse_double(tokens[2], "score");
        kp.orientation = detail::parse_double(tokens[3], "orientation");
        out.keypoints.push_back(kp);

        if (out.kind == DescriptorKind::Binary) {
            const std::string& payload = tokens[4];
            if (payload.size() != kDescriptorBits / 4)
                raise(ErrorCode::DimensionMismatch,
                      "feature file: binary payload must be 64 hex digits");
            BinaryDescriptor d;
            for (std::size_t k = 0; k < d.bytes.size(); ++k) {
                const int hi = detail::hex_nibble(payload[2 * k]);
                const int lo = detail::hex_nibble(payload[2 * k + 1]);
                if (hi < 0 || lo < 0)
                    raise(ErrorCode::DimensionMismatch,
                          "feature file: payload is not lowercase hex");
                d.bytes[k] = static_cast<std::uint8_t>((hi << 4) | lo);
            }
            out.binary.push_back(d);
        } else {
            FloatDescriptor d;
            for (int k = 0; k < kDescriptorFloats; ++k)
                d.values[k] = detail::parse_double(tokens[4 + k], "descriptor value");
            out.floats.push_back(d);
        }
    }
    return out;
}

inline ImageFeatures load_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + path.string());
    return load_features(in);
}

}  // namespace featkit
