#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

// Deterministic RNG plumbing. Everything here is fixed by construction so
// that runs reproduce bit-identically across platforms and schedulings:
// splitmix64 for seeding/mixing, xorshift64* for the stream itself.

namespace featkit {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += kGoldenGamma;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

/// xorshift64* stream seeded through splitmix64 (never zero-state).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        state_ = splitmix64_next(s);
        if (state_ == 0) state_ = kGoldenGamma;
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection keeps the draw unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    /// Standard normal via Box-Muller; draws come in deterministic pairs.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_ = kGoldenGamma;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Independent per-(sequence, rep, purpose) stream. The seed is a splitmix64
/// chain over the inputs, so streams do not depend on evaluation order.
inline Rng derive_rng(std::uint64_t master_seed, std::string_view sequence_id,
                      std::uint64_t rep, std::string_view purpose) {
    std::uint64_t s = master_seed;
    s = splitmix64_next(s) ^ fnv1a64(sequence_id);
    s = splitmix64_next(s) ^ rep;
    s = splitmix64_next(s) ^ fnv1a64(purpose);
    s = splitmix64_next(s);
    return Rng(s);
}

/// k distinct indices from [0, n), uniformly, in draw order (partial
/// Fisher-Yates). k >= n returns the identity permutation of [0, n).
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace featkit
