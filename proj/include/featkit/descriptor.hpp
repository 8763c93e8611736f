#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <utility>
#include <vector>

#include "featkit/error.hpp"

namespace featkit {

inline constexpr int kDescriptorBits = 256;
inline constexpr int kDescriptorFloats = 256;

/// 256 comparison bits packed LSB-first into 32 bytes.
struct BinaryDescriptor {
    std::array<std::uint8_t, kDescriptorBits / 8> bytes{};

    void set_bit(int i) { bytes[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7)); }
    bool bit(int i) const { return (bytes[i >> 3] >> (i & 7)) & 1u; }

    bool operator==(const BinaryDescriptor&) const = default;
};

/// Mean-free, L2-normalized patch vector; all zeros when the patch was flat.
struct FloatDescriptor {
    std::array<double, kDescriptorFloats> values{};

    bool degenerate() const {
        for (double v : values)
            if (v != 0.0) return false;
        return true;
    }

    bool operator==(const FloatDescriptor&) const = default;
};

inline int hamming(const BinaryDescriptor& a, const BinaryDescriptor& b) {
    int dist = 0;
    for (int w = 0; w < 4; ++w) {
        std::uint64_t x, y;
        std::memcpy(&x, a.bytes.data() + 8 * w, 8);
        std::memcpy(&y, b.bytes.data() + 8 * w, 8);
        dist += std::popcount(x ^ y);
    }
    return dist;
}

inline double euclidean(const FloatDescriptor& a, const FloatDescriptor& b) {
    double sum = 0.0;
    for (int i = 0; i < kDescriptorFloats; ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

struct NearestMatch {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Exhaustive nearest neighbour; ties resolve to the lowest index.
template <typename Descriptor, typename DistanceFn>
NearestMatch match_nn(const Descriptor& query, const std::vector<Descriptor>& candidates,
                      DistanceFn&& distance) {
    if (candidates.empty())
        raise(ErrorCode::EmptyCandidateSet, "match_nn: empty candidate set");
    NearestMatch best{0, static_cast<double>(distance(query, candidates[0]))};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double d = static_cast<double>(distance(query, candidates[i]));
        if (d < best.distance) best = {i, d};
    }
    return best;
}

inline NearestMatch match_nn(const BinaryDescriptor& query,
                             const std::vector<BinaryDescriptor>& candidates) {
    return match_nn(query, candidates,
                    [](const BinaryDescriptor& a, const BinaryDescriptor& b) {
                        return hamming(a, b);
                    });
}

inline NearestMatch match_nn(const FloatDescriptor& query,
                             const std::vector<FloatDescriptor>& candidates) {
    return match_nn(query, candidates, euclidean);
}

}  // namespace featkit
