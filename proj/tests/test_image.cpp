#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "featkit/filters.hpp"
#include "featkit/integral.hpp"
#include "featkit/netpbm.hpp"
#include "featkit/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace featkit;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("decode P5 raw grayscale") {
    std::vector<std::uint8_t> file = bytes_of("P5\n2 2\n255\n");
    file.insert(file.end(), {0, 64, 128, 255});
    const GrayImage img = decode_netpbm(file);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    CHECK(img.data == std::vector<std::uint8_t>{0, 64, 128, 255});
}

TEST_CASE("decode P2 ascii grayscale with comments") {
    const GrayImage img = decode_netpbm(bytes_of("P2\n# a comment\n2 1\n255\n7 200\n"));
    REQUIRE(img.width == 2);
    CHECK(img.at(0, 0) == 7);
    CHECK(img.at(1, 0) == 200);
}

TEST_CASE("decode P6 converts color by BT.601 luma") {
    SECTION("white maps to white") {
        std::vector<std::uint8_t> file = bytes_of("P6 1 1 255\n");
        file.insert(file.end(), {255, 255, 255});
        CHECK(decode_netpbm(file).at(0, 0) == 255);
    }
    SECTION("pure red maps to round(0.299*255)") {
        std::vector<std::uint8_t> file = bytes_of("P6 1 1 255\n");
        file.insert(file.end(), {255, 0, 0});
        // Hand-checked luma oracle: 0.299*255 = 76.245 -> 76.
        CHECK(decode_netpbm(file).at(0, 0) == 76);
    }
    SECTION("random pixels match the per-pixel luma oracle") {
        Rng rng(99);
        for (int trial = 0; trial < 200; ++trial) {
            const int r = static_cast<int>(rng.next_below(256));
            const int g = static_cast<int>(rng.next_below(256));
            const int b = static_cast<int>(rng.next_below(256));
            std::vector<std::uint8_t> file = bytes_of("P6 1 1 255\n");
            file.insert(file.end(), {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                     static_cast<std::uint8_t>(b)});
            const long expected =
                std::lround(0.299 * r + 0.587 * g + 0.114 * b);
            CHECK(decode_netpbm(file).at(0, 0) == std::clamp(expected, 0l, 255l));
        }
    }
}

TEST_CASE("decode P3 ascii color") {
    const GrayImage img = decode_netpbm(bytes_of("P3 1 1 255 0 255 0"));
    CHECK(img.at(0, 0) == 150);  // round(0.587*255)
}

TEST_CASE("netpbm decode errors") {
    CHECK_THROWS_MATCHES(decode_netpbm(bytes_of("P7 1 1 255 ")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::UnknownMagic;
                         }));
    CHECK_THROWS_MATCHES(decode_netpbm(bytes_of("X5 1 1 255 ")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::UnknownMagic;
                         }));
    std::vector<std::uint8_t> short_file = bytes_of("P5 2 2 255\n");
    short_file.insert(short_file.end(), {1, 2, 3});  // one byte missing
    CHECK_THROWS_MATCHES(decode_netpbm(short_file), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::TruncatedPayload;
                         }));
    CHECK_THROWS_MATCHES(decode_netpbm(bytes_of("P2 2 1 255 7")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::TruncatedPayload;
                         }));
    CHECK_THROWS_MATCHES(decode_netpbm(bytes_of("P5 100000 100000 255\n")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::DimensionOverflow;
                         }));
    CHECK_THROWS_MATCHES(decode_netpbm(bytes_of("P2 1 1 65535 70")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::UnsupportedMaxval;
                         }));
}

TEST_CASE("P5 encode/decode round-trips bit-exactly") {
    const GrayImage img = testsupport::textured_image(37, 23, 5);
    const GrayImage back = decode_netpbm(encode_p5(img));
    CHECK(back == img);
}

TEST_CASE("gaussian blur preserves constants and handles sigma 0") {
    GrayImage constant(16, 12, 7);
    SECTION("constant image stays constant") {
        const FloatImage out = gaussian_blur(constant, 1.7);
        for (double v : out.data) CHECK_THAT(v, Catch::Matchers::WithinAbs(7.0, 1e-12));
    }
    SECTION("sigma 0 is the identity") {
        const GrayImage img = testsupport::textured_image(16, 12, 3);
        const FloatImage out = gaussian_blur(img, 0.0);
        for (std::size_t i = 0; i < img.data.size(); ++i)
            CHECK(out.data[i] == static_cast<double>(img.data[i]));
    }
}

TEST_CASE("gaussian blur impulse response equals the normalized central weight") {
    GrayImage img(9, 9, 0);
    img.at(4, 4) = 1;
    const FloatImage out = gaussian_blur(img, 1.0);

    // Independent kernel evaluation: w0^2 of the normalized 1-D kernel.
    const int radius = 3;
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) sum += std::exp(-0.5 * i * i);
    const double w0 = 1.0 / sum;
    CHECK_THAT(out.at(4, 4), Catch::Matchers::WithinAbs(w0 * w0, 1e-12));
}

TEST_CASE("gaussian blur conserves mass on interior-dominated images") {
    const GrayImage img = testsupport::textured_image(200, 160, 11);
    const FloatImage out = gaussian_blur(img, 2.0);
    const double in_sum = std::accumulate(img.data.begin(), img.data.end(), 0.0);
    const double out_sum = std::accumulate(out.data.begin(), out.data.end(), 0.0);
    CHECK_THAT(out_sum, Catch::Matchers::WithinRel(in_sum, 0.005));
}

TEST_CASE("sobel gradients of constants and ramps") {
    SECTION("constant image has zero gradients") {
        const auto [gx, gy] = sobel_gradients(GrayImage(8, 8, 50));
        for (double v : gx.data) CHECK(v == 0.0);
        for (double v : gy.data) CHECK(v == 0.0);
    }
    SECTION("x-ramp: interior gx = 1, gy = 0") {
        FloatImage ramp(10, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 10; ++x) ramp.at(x, y) = x;
        const auto [gx, gy] = sobel_gradients(ramp);
        for (int y = 1; y < 7; ++y)
            for (int x = 1; x < 9; ++x) {
                CHECK_THAT(gx.at(x, y), Catch::Matchers::WithinAbs(1.0, 1e-12));
                CHECK_THAT(gy.at(x, y), Catch::Matchers::WithinAbs(0.0, 1e-12));
            }
    }
    SECTION("y-ramp: interior gx = 0, gy = 1") {
        FloatImage ramp(10, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 10; ++x) ramp.at(x, y) = y;
        const auto [gx, gy] = sobel_gradients(ramp);
        for (int y = 1; y < 7; ++y)
            for (int x = 1; x < 9; ++x) {
                CHECK_THAT(gx.at(x, y), Catch::Matchers::WithinAbs(0.0, 1e-12));
                CHECK_THAT(gy.at(x, y), Catch::Matchers::WithinAbs(1.0, 1e-12));
            }
    }
    SECTION("too-small image raises") {
        CHECK_THROWS_MATCHES(sobel_gradients(GrayImage(2, 5, 0)), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::ImageTooSmall;
                             }));
    }
}

TEST_CASE("sobel gradients commute with 90-degree rotation on the interior") {
    const GrayImage img = testsupport::textured_image(24, 17, 21);
    // +90-degree rotation in image coordinates: rot(x', y') = img(y', H-1-x').
    GrayImage rot(img.height, img.width);
    for (int y = 0; y < rot.height; ++y)
        for (int x = 0; x < rot.width; ++x) rot.at(x, y) = img.at(y, img.height - 1 - x);

    const auto [gx, gy] = sobel_gradients(img);
    const auto [rx, ry] = sobel_gradients(rot);
    // Chain rule: d/dx' = -d/dsy and d/dy' = d/dsx at the source pixel.
    for (int y = 1; y < rot.height - 1; ++y) {
        for (int x = 1; x < rot.width - 1; ++x) {
            const int sx = y, sy = img.height - 1 - x;
            if (sx < 1 || sy < 1 || sx >= img.width - 1 || sy >= img.height - 1) continue;
            CHECK(rx.at(x, y) == -gy.at(sx, sy));
            CHECK(ry.at(x, y) == gx.at(sx, sy));
        }
    }
}

TEST_CASE("integral image box sums") {
    SECTION("all-ones full rect") {
        const IntegralImage ii = integral(GrayImage(4, 4, 1));
        CHECK(box_sum(ii, {0, 0, 4, 4}) == 16);
    }
    SECTION("1x1 rect returns the pixel") {
        const GrayImage img = testsupport::textured_image(8, 8, 2);
        const IntegralImage ii = integral(img);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) CHECK(box_sum(ii, {x, y, 1, 1}) == img.at(x, y));
    }
    SECTION("random rects equal the nested-loop oracle") {
        Rng rng(1234);
        for (int trial = 0; trial < 1000; ++trial) {
            const int w = 1 + static_cast<int>(rng.next_below(16));
            const int h = 1 + static_cast<int>(rng.next_below(16));
            const GrayImage img = testsupport::textured_image(w, h, 5000 + trial);
            const IntegralImage ii = integral(img);
            const int rw = 1 + static_cast<int>(rng.next_below(w));
            const int rh = 1 + static_cast<int>(rng.next_below(h));
            const int rx = static_cast<int>(rng.next_below(w - rw + 1));
            const int ry = static_cast<int>(rng.next_below(h - rh + 1));
            REQUIRE(box_sum(ii, {rx, ry, rw, rh}) ==
                    testsupport::box_sum_oracle(img, rx, ry, rw, rh));
        }
    }
    SECTION("out-of-bounds rect raises") {
        const IntegralImage ii = integral(GrayImage(4, 4, 1));
        CHECK_THROWS_MATCHES(box_sum(ii, {2, 2, 3, 1}), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::RectOutOfBounds;
                             }));
    }
}

TEST_CASE("integral table is monotone along rows and columns") {
    const GrayImage img = testsupport::textured_image(13, 9, 77);
    const IntegralImage ii = integral(img);
    for (int y = 0; y <= img.height; ++y)
        for (int x = 1; x <= img.width; ++x) CHECK(ii.at(x, y) >= ii.at(x - 1, y));
    for (int x = 0; x <= img.width; ++x)
        for (int y = 1; y <= img.height; ++y) CHECK(ii.at(x, y) >= ii.at(x, y - 1));
}
