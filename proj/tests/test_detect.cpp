#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "featkit/detect.hpp"
#include "featkit/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace featkit;

namespace {

/// 64x64 black canvas with a white square whose corners sit inside the
/// default border margin.
GrayImage white_square_image() {
    GrayImage img(64, 64, 0);
    for (int y = 24; y <= 39; ++y)
        for (int x = 24; x <= 39; ++x) img.at(x, y) = 255;
    return img;
}

bool near_any_corner(const Keypoint& kp, double tol) {
    const double corners[4][2] = {{24, 24}, {39, 24}, {24, 39}, {39, 39}};
    for (const auto& c : corners)
        if (std::hypot(kp.x - c[0], kp.y - c[1]) <= tol) return true;
    return false;
}

}  // namespace

TEST_CASE("harris finds the four corners of a white square") {
    const std::vector<Keypoint> kps = harris(white_square_image());
    REQUIRE(kps.size() == 4);
    std::set<std::pair<int, int>> buckets;
    for (const Keypoint& kp : kps) {
        CHECK(near_any_corner(kp, 2.0));
        buckets.insert({static_cast<int>(kp.x) / 8, static_cast<int>(kp.y) / 8});
    }
    CHECK(buckets.size() == 4);  // one keypoint per corner
}

TEST_CASE("harris emits nothing on a constant image") {
    CHECK(harris(GrayImage(64, 64, 90)).empty());
}

TEST_CASE("harris rejects step-edge interiors") {
    // Vertical step edge: one eigenvalue vanishes along the edge, so the
    // response there is non-positive and cannot pass the relative threshold.
    GrayImage img(64, 64, 0);
    for (int y = 0; y < 64; ++y)
        for (int x = 32; x < 64; ++x) img.at(x, y) = 200;
    const FloatImage resp = structure_tensor_response(img, {}, TensorResponse::Harris);
    for (int y = 26; y <= 38; ++y)
        for (int x = 30; x <= 34; ++x) CHECK(resp.at(x, y) <= 1e-9);
    CHECK(harris(img).empty());
}

TEST_CASE("harris raises on tiny images") {
    CHECK_THROWS_MATCHES(harris(GrayImage(8, 8, 0)), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::ImageTooSmall;
                         }));
}

TEST_CASE("gftt finds the same square corners") {
    const std::vector<Keypoint> kps = gftt(white_square_image());
    REQUIRE(kps.size() == 4);
    for (const Keypoint& kp : kps) CHECK(near_any_corner(kp, 2.0));
}

TEST_CASE("gftt response is nonnegative everywhere") {
    const GrayImage img = testsupport::textured_image(64, 64, 17);
    const FloatImage resp = structure_tensor_response(img, {}, TensorResponse::MinEigenvalue);
    for (double v : resp.data) CHECK(v >= -1e-9);
}

TEST_CASE("gftt emits nothing on a constant image") {
    CHECK(gftt(GrayImage(64, 64, 13)).empty());
}

TEST_CASE("segment test crafted rings") {
    std::array<int, 16> ring;
    SECTION("full bright ring is a corner") {
        ring.fill(150);
        const SegmentTestResult r = segment_test(100, ring, 20, 9);
        CHECK(r.corner);
        CHECK(r.score == 16 * 50.0);
    }
    SECTION("flat ring is not a corner") {
        ring.fill(100);
        CHECK_FALSE(segment_test(100, ring, 20, 9).corner);
    }
    SECTION("exactly 8 contiguous bright pixels fail arc=9, 9 succeed") {
        for (int start = 0; start < 16; ++start) {
            ring.fill(100);
            for (int i = 0; i < 8; ++i) ring[(start + i) % 16] = 150;
            CHECK_FALSE(segment_test(100, ring, 20, 9).corner);
            ring[(start + 8) % 16] = 150;
            CHECK(segment_test(100, ring, 20, 9).corner);
        }
    }
    SECTION("dark arcs count too") {
        ring.fill(100);
        for (int i = 3; i < 3 + 11; ++i) ring[i % 16] = 40;
        const SegmentTestResult r = segment_test(100, ring, 20, 9);
        CHECK(r.corner);
        CHECK(r.score == 11 * 60.0);
    }
}

TEST_CASE("segment test equals the cyclic-run oracle on random rings") {
    Rng rng(555);
    for (int trial = 0; trial < 20000; ++trial) {
        std::array<int, 16> ring;
        const int center = static_cast<int>(rng.next_below(256));
        for (int& v : ring) v = static_cast<int>(rng.next_below(256));
        const int threshold = 1 + static_cast<int>(rng.next_below(60));
        const int arc = 9 + static_cast<int>(rng.next_below(8));
        const SegmentTestResult got = segment_test(center, ring, threshold, arc);
        const testsupport::SegmentOracleResult want =
            testsupport::segment_oracle(center, ring, threshold, arc);
        REQUIRE(got.corner == want.corner);
        REQUIRE(got.score == want.score);
    }
}

TEST_CASE("fast pre-NMS candidates equal the oracle pixel-for-pixel") {
    const GrayImage img = testsupport::textured_image(96, 72, 9);
    const DetectorConfig cfg;
    const std::vector<Keypoint> got =
        fast_segment_candidates(img, cfg.fast_threshold, cfg.fast_arc);

    std::size_t idx = 0;
    for (int y = 3; y < img.height - 3; ++y) {
        for (int x = 3; x < img.width - 3; ++x) {
            std::array<int, 16> ring;
            for (int i = 0; i < 16; ++i)
                ring[i] = img.at(x + kFastRing[i].first, y + kFastRing[i].second);
            const testsupport::SegmentOracleResult want =
                testsupport::segment_oracle(img.at(x, y), ring, cfg.fast_threshold, cfg.fast_arc);
            if (want.corner) {
                REQUIRE(idx < got.size());
                REQUIRE(got[idx].x == x);
                REQUIRE(got[idx].y == y);
                REQUIRE(got[idx].score == want.score);
                ++idx;
            }
        }
    }
    REQUIRE(idx == got.size());
}

TEST_CASE("fast end to end on a single bright dot") {
    GrayImage img(64, 64, 100);
    img.at(30, 30) = 200;
    const std::vector<Keypoint> kps = fast(img);
    REQUIRE(kps.size() == 1);
    CHECK(kps[0].x == 30);
    CHECK(kps[0].y == 30);
    CHECK(kps[0].score == 16 * 100.0);
}

TEST_CASE("fast raises on tiny images") {
    CHECK_THROWS_MATCHES(fast(GrayImage(6, 6, 0)), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::ImageTooSmall;
                         }));
}

TEST_CASE("detectors keep the border margin clear and are deterministic") {
    const GrayImage img = testsupport::textured_image(160, 120, 33);
    const DetectorConfig cfg;
    for (const auto& [name, detect] : detector_registry()) {
        const std::vector<Keypoint> a = detect(img, cfg);
        const std::vector<Keypoint> b = detect(img, cfg);
        INFO("detector " << name);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
            CHECK(a[i].score == b[i].score);
            CHECK(a[i].orientation == b[i].orientation);
            CHECK(a[i].x >= cfg.border_margin);
            CHECK(a[i].y >= cfg.border_margin);
            CHECK(a[i].x < img.width - cfg.border_margin);
            CHECK(a[i].y < img.height - cfg.border_margin);
            CHECK(std::abs(a[i].orientation) <= std::numbers::pi + 1e-12);
        }
        CHECK(a.size() <= static_cast<std::size_t>(cfg.max_keypoints));
    }
}

TEST_CASE("detectors are translation equivariant") {
    // Textured content pasted well inside a flat canvas; the shifted image
    // is the same paste moved by an integer offset, so detections must move
    // by exactly that offset, one for one.
    const GrayImage patch = testsupport::textured_image(120, 80, 44);
    const int dx = 7, dy = 4;
    auto paste = [&](int ox, int oy) {
        GrayImage canvas(220, 170, 128);
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x) canvas.at(ox + x, oy + y) = patch.at(x, y);
        return canvas;
    };
    const GrayImage base = paste(50, 45);
    const GrayImage shifted = paste(50 + dx, 45 + dy);

    const DetectorConfig cfg;
    for (const auto& [name, detect] : detector_registry()) {
        INFO("detector " << name);
        const std::vector<Keypoint> a = detect(base, cfg);
        const std::vector<Keypoint> b = detect(shifted, cfg);
        REQUIRE(a.size() > 10);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(b[i].x == a[i].x + dx);
            REQUIRE(b[i].y == a[i].y + dy);
        }
    }
}

TEST_CASE("orient_ic on synthetic patches") {
    SECTION("radially symmetric patch gives 0") {
        GrayImage img(41, 41, 0);
        for (int y = 0; y < 41; ++y)
            for (int x = 0; x < 41; ++x) {
                const double r = std::hypot(x - 20.0, y - 20.0);
                img.at(x, y) = static_cast<std::uint8_t>(std::clamp(255.0 - 12.0 * r, 0.0, 255.0));
            }
        CHECK(orient_ic(img, {20, 20}) == 0.0);
    }
    SECTION("brighter +x half gives 0") {
        GrayImage img(41, 41, 50);
        for (int y = 0; y < 41; ++y)
            for (int x = 21; x < 41; ++x) img.at(x, y) = 200;
        CHECK_THAT(orient_ic(img, {20, 20}), Catch::Matchers::WithinAbs(0.0, 1e-6));
    }
    SECTION("brighter +y half gives pi/2") {
        GrayImage img(41, 41, 50);
        for (int y = 21; y < 41; ++y)
            for (int x = 0; x < 41; ++x) img.at(x, y) = 200;
        CHECK_THAT(orient_ic(img, {20, 20}),
                   Catch::Matchers::WithinAbs(std::numbers::pi / 2, 1e-6));
    }
    SECTION("disc leaving the image raises") {
        CHECK_THROWS_MATCHES(orient_ic(GrayImage(41, 41, 0), {5, 20}), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::OutOfBounds;
                             }));
    }
}

TEST_CASE("orient_ic rotates with the image") {
    const GrayImage img = testsupport::textured_image(96, 96, 50);
    const int h = img.height;
    // +90 degrees in image coordinates: pixel (x, y) moves to (h-1-y, x).
    GrayImage rot(h, img.width);
    for (int y = 0; y < rot.height; ++y)
        for (int x = 0; x < rot.width; ++x) rot.at(x, y) = img.at(y, h - 1 - x);

    Rng rng(8);
    for (int tested = 0; tested < 25; ++tested) {
        const int x = 20 + static_cast<int>(rng.next_below(96 - 40));
        const int y = 20 + static_cast<int>(rng.next_below(96 - 40));
        const double theta = orient_ic(img, {static_cast<double>(x), static_cast<double>(y)});
        const double rotated =
            orient_ic(rot, {static_cast<double>(h - 1 - y), static_cast<double>(x)});
        double diff = rotated - theta - std::numbers::pi / 2;
        while (diff > std::numbers::pi) diff -= 2 * std::numbers::pi;
        while (diff < -std::numbers::pi) diff += 2 * std::numbers::pi;
        REQUIRE_THAT(diff, Catch::Matchers::WithinAbs(0.0, 0.05));
    }
}

TEST_CASE("nms keeps the strongest and breaks ties by (y, x)") {
    SECTION("closer pair keeps the higher score") {
        std::vector<Keypoint> kps = {{10, 10, 5.0, 0, 1}, {12, 10, 9.0, 0, 1}};
        const std::vector<Keypoint> kept = nms(kps, 5.0);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].score == 9.0);
    }
    SECTION("equal scores keep the smaller (y, x)") {
        std::vector<Keypoint> kps = {{12, 11, 5.0, 0, 1}, {10, 10, 5.0, 0, 1}};
        const std::vector<Keypoint> kept = nms(kps, 5.0);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].x == 10.0);
        CHECK(kept[0].y == 10.0);
    }
    SECTION("random sets match the quadratic oracle") {
        Rng rng(606);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Keypoint> kps;
            for (int i = 0; i < 200; ++i)
                kps.push_back({static_cast<double>(rng.next_below(80)),
                               static_cast<double>(rng.next_below(80)),
                               static_cast<double>(rng.next_below(32)), 0, 1});
            const std::vector<Keypoint> got = nms(kps, 5.0);
            const std::vector<Keypoint> want = testsupport::nms_oracle(kps, 5.0);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                REQUIRE(got[i].x == want[i].x);
                REQUIRE(got[i].y == want[i].y);
                REQUIRE(got[i].score == want[i].score);
            }
        }
    }
}

TEST_CASE("top_k ordering and truncation") {
    std::vector<Keypoint> kps = {{1, 5, 2.0, 0, 1}, {3, 1, 2.0, 0, 1}, {2, 2, 7.0, 0, 1}};
    SECTION("keeps all when k exceeds the size") {
        CHECK(top_k(kps, 5).size() == 3);
    }
    SECTION("k = 0 empties the list") {
        CHECK(top_k(kps, 0).empty());
    }
    SECTION("orders by score then (y, x)") {
        const std::vector<Keypoint> sorted = top_k(kps, 3);
        CHECK(sorted[0].score == 7.0);
        CHECK(sorted[1].y == 1.0);  // tie at score 2 -> smaller y first
        CHECK(sorted[2].y == 5.0);
    }
    SECTION("random lists match a full sort") {
        Rng rng(17);
        std::vector<Keypoint> big;
        for (int i = 0; i < 300; ++i)
            big.push_back({static_cast<double>(rng.next_below(100)),
                           static_cast<double>(rng.next_below(100)),
                           static_cast<double>(rng.next_below(10)), 0, 1});
        const std::vector<Keypoint> got = top_k(big, 40);
        std::vector<Keypoint> want = big;
        std::sort(want.begin(), want.end(), [](const Keypoint& a, const Keypoint& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.y != b.y) return a.y < b.y;
            return a.x < b.x;
        });
        want.resize(40);
        for (std::size_t i = 0; i < 40; ++i) {
            REQUIRE(got[i].x == want[i].x);
            REQUIRE(got[i].y == want[i].y);
            REQUIRE(got[i].score == want[i].score);
        }
    }
}

TEST_CASE("orb detector assigns orientations and harris scores") {
    const GrayImage img = testsupport::textured_image(160, 120, 70);
    const std::vector<Keypoint> kps = orb_detect(img);
    REQUIRE(!kps.empty());
    const FloatImage resp = structure_tensor_response(img, {}, TensorResponse::Harris);
    bool any_nonzero_orientation = false;
    for (const Keypoint& kp : kps) {
        CHECK(kp.score == resp.at(static_cast<int>(kp.x), static_cast<int>(kp.y)));
        if (kp.orientation != 0.0) any_nonzero_orientation = true;
    }
    CHECK(any_nonzero_orientation);
}

TEST_CASE("unknown detector name raises with the registry listing") {
    try {
        find_detector("bogus");
        FAIL("expected UnknownDetector");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownDetector);
        CHECK(std::string(e.what()).find("harris") != std::string::npos);
        CHECK(std::string(e.what()).find("orb") != std::string::npos);
    }
}
