#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "featkit/error.hpp"

namespace featkit {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double euclid(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// 3x3 projective map, row-major, normalized so m[8] = 1 whenever |m[8]|
/// is meaningful. Non-singular by construction.
class Homography {
public:
    static constexpr double kSingularEps = 1e-12;

    Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

    explicit Homography(const std::array<double, 9>& entries) : m_(entries) {
        normalize();
        if (std::abs(det()) <= kSingularEps)
            raise(ErrorCode::SingularMatrix, "homography: singular matrix");
    }

    static Homography identity() { return Homography(); }

    static Homography translation(double dx, double dy) {
        return Homography({1, 0, dx, 0, 1, dy, 0, 0, 1});
    }

    static Homography scale(double sx, double sy) {
        return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1});
    }

    double at(int row, int col) const { return m_[row * 3 + col]; }
    const std::array<double, 9>& entries() const { return m_; }

    double det() const {
        return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) -
               m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
               m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
    }

    Homography inverse() const {
        const auto& m = m_;
        std::array<double, 9> adj = {
            m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
        const double d = det();
        for (double& v : adj) v /= d;
        return Homography(adj);
    }

    friend Homography compose(const Homography& a, const Homography& b) {
        std::array<double, 9> out{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out[r * 3 + c] = a.at(r, 0) * b.at(0, c) + a.at(r, 1) * b.at(1, c) +
                                 a.at(r, 2) * b.at(2, c);
        return Homography(out);
    }

    bool near_identity(double eps = 1e-9) const {
        for (int i = 0; i < 9; ++i) {
            const double want = (i % 4 == 0) ? 1.0 : 0.0;
            if (std::abs(m_[i] - want) > eps) return false;
        }
        return true;
    }

private:
    void normalize() {
        if (std::abs(m_[8]) > kSingularEps) {
            const double s = m_[8];
            for (double& v : m_) v /= s;
        }
    }

    std::array<double, 9> m_;
};

/// Parses the 9-number whitespace-separated text convention ("H_1_2" files).
inline Homography load_homography(std::string_view text) {
    std::vector<double> vals;
    std::string token;
    auto flush_token = [&] {
        if (token.empty()) return;
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v))
            raise(ErrorCode::NonNumericToken, "homography: non-numeric token '" + token + "'");
        vals.push_back(v);
        token.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush_token();
        else
            token.push_back(c);
    }
    flush_token();
    if (vals.size() != 9)
        raise(ErrorCode::WrongTokenCount,
              "homography: expected 9 numbers, got " + std::to_string(vals.size()));
    std::array<double, 9> m;
    for (int i = 0; i < 9; ++i) m[i] = vals[i];
    return Homography(m);
}

inline Point project(const Homography& h, const Point& p) {
    const double w = h.at(2, 0) * p.x + h.at(2, 1) * p.y + h.at(2, 2);
    if (std::abs(w) <= 1e-9)
        raise(ErrorCode::PointAtInfinity, "project: point maps to infinity");
    return {(h.at(0, 0) * p.x + h.at(0, 1) * p.y + h.at(0, 2)) / w,
            (h.at(1, 0) * p.x + h.at(1, 1) * p.y + h.at(1, 2)) / w};
}

/// Euclidean distance between the projection of x and the observed x'.
inline double reproj_dist(const Homography& h, const Point& x, const Point& x_prime) {
    return euclid(project(h, x), x_prime);
}

}  // namespace featkit
