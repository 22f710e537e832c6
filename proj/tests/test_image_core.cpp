#include <doctest.h>

#include <cmath>
#include <limits>

#include "cloudcast/error.hpp"
#include "cloudcast/image.hpp"
#include "cloudcast/image_ops.hpp"
#include "support.hpp"

using namespace cloudcast;
using testing_support::make_field;
using testing_support::random_field;

namespace {

Image rgb_pixel_image(double r, double g, double b) {
    Image img(2, 2, 3);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) {
            img.at(0, x, y) = r;
            img.at(1, x, y) = g;
            img.at(2, x, y) = b;
        }
    return img;
}

double field_mean(const ScalarField& f) {
    double s = 0;
    for (double v : f.data()) s += v;
    return s / static_cast<double>(f.size());
}

}  // namespace

TEST_CASE("containers enforce their invariants") {
    CHECK_THROWS_AS(ScalarField(1, 5), InvalidInput);
    CHECK_THROWS_AS(ScalarField(3, 3, std::vector<double>(8, 0.0)), InvalidInput);
    CHECK_THROWS_AS(ScalarField(2, 2, std::vector<double>{0, 1, std::nan(""), 0}), InvalidInput);
    CHECK_THROWS_AS(Image(4, 4, 2), InvalidInput);
    CHECK_THROWS_AS(Image(2, 2, 1, {0, 0, std::numeric_limits<double>::infinity(), 0}),
                    InvalidInput);

    Image img(3, 2, 3);
    img.at(2, 1, 1) = 0.5;
    CHECK(img.data()[2 * 6 + 1 * 3 + 1] == 0.5);  // planar, row-major
    CHECK(img.channel(2)(1, 1) == 0.5);
}

TEST_CASE("ratio channel") {
    // (0.6 - 0.4) / (0.6 + 0.4)
    CHECK(ratio_channel(rgb_pixel_image(0.4, 0.5, 0.6))(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ratio_channel(rgb_pixel_image(0.37, 0.9, 0.37))(1, 1) == 0.0);
    CHECK(ratio_channel(rgb_pixel_image(0, 0, 0))(0, 1) == 0.0);
    CHECK(ratio_channel(rgb_pixel_image(0, 0.2, 0.7))(0, 0) == 1.0);
    CHECK(ratio_channel(rgb_pixel_image(0.7, 0.2, 0))(0, 0) == -1.0);
    CHECK_THROWS_AS(ratio_channel(Image(4, 4, 1)), InvalidInput);

    SUBCASE("bounded for non-negative input") {
        Xorshift64Star rng(7);
        Image img(17, 13, 3);
        for (auto& v : img.data()) v = rng.uniform() < 0.1 ? 0.0 : rng.uniform();
        for (double v : ratio_channel(img).data()) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("spatial gradients") {
    SUBCASE("constant field") {
        const auto g = spatial_gradients(ScalarField(6, 4, 0.3));
        for (double v : g.dx.data()) CHECK(v == 0.0);
        for (double v : g.dy.data()) CHECK(v == 0.0);
    }
    SUBCASE("3x + 2y on a 5x5 grid") {
        // Hand-evaluated: (f(x+1)-f(x-1))/2 = (3(x+1) - 3(x-1))/2 = 3, likewise 2 in y;
        // one-sided borders of an affine field give the same slopes.
        const auto f = make_field(5, 5, [](int x, int y) { return 3.0 * x + 2.0 * y; });
        const auto g = spatial_gradients(f);
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x) {
                CHECK(g.dx(x, y) == 3.0);
                CHECK(g.dy(x, y) == 2.0);
            }
    }
    SUBCASE("border uses one-sided differences") {
        const auto f = make_field(4, 3, [](int x, int y) { return double(x * x + 10 * y * y); });
        const auto g = spatial_gradients(f);
        CHECK(g.dx(0, 1) == 1.0);   // f(1) - f(0)
        CHECK(g.dx(3, 1) == 5.0);   // f(3) - f(2)
        CHECK(g.dx(1, 1) == 2.0);   // (4 - 0) / 2
        CHECK(g.dy(2, 0) == 10.0);  // 10 - 0
        CHECK(g.dy(2, 2) == 30.0);  // 40 - 10
        CHECK(g.dy(2, 1) == 20.0);  // (40 - 0) / 2
    }
    SUBCASE("affine fields are exact") {
        Xorshift64Star rng(11);
        for (int t = 0; t < 10; ++t) {
            const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5), c = rng.uniform(-5, 5);
            const auto f = make_field(9, 7, [&](int x, int y) { return a * x + b * y + c; });
            const auto g = spatial_gradients(f);
            for (int y = 1; y < 6; ++y)
                for (int x = 1; x < 8; ++x) {
                    CHECK(g.dx(x, y) == doctest::Approx(a).epsilon(1e-12));
                    CHECK(g.dy(x, y) == doctest::Approx(b).epsilon(1e-12));
                }
        }
    }
}

TEST_CASE("temporal gradient") {
    const auto f1 = make_field(6, 5, [](int x, int) { return double(x); });
    const auto f2 = make_field(6, 5, [](int x, int) { return double(x - 1); });
    const auto it = temporal_gradient(f1, f2);
    for (double v : it.data()) CHECK(v == -1.0);

    const auto same = temporal_gradient(f1, f1);
    for (double v : same.data()) CHECK(v == 0.0);
    const auto up = make_field(6, 5, [](int x, int) { return x + 0.25; });
    const auto offset = temporal_gradient(f1, up);
    for (double v : offset.data()) CHECK(v == 0.25);
    CHECK_THROWS_AS(temporal_gradient(f1, ScalarField(5, 6)), InvalidInput);
}

TEST_CASE("gaussian blur") {
    CHECK_THROWS_AS(gaussian_blur(ScalarField(4, 4), 0.0), InvalidInput);
    CHECK_THROWS_AS(gaussian_blur(ScalarField(4, 4), -1.0), InvalidInput);

    SUBCASE("constant field") {
        for (double sigma : {0.3, 1.0, 2.5, 6.0}) {
            const auto b = gaussian_blur(ScalarField(9, 5, 0.7), sigma);
            for (double v : b.data()) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
        }
    }
    SUBCASE("impulse response is the outer product of the normalized kernel") {
        // Independent kernel: radius ceil(3 sigma) = 3, w_i = exp(-i^2/2) / sum.
        double sum = 0;
        for (int i = -3; i <= 3; ++i) sum += std::exp(-0.5 * i * i);
        const double k0 = 1.0 / sum;
        const double k1 = std::exp(-0.5) / sum;
        auto f = ScalarField(15, 15);
        f(7, 7) = 1.0;
        const auto b = gaussian_blur(f, 1.0);
        CHECK(b(7, 7) == doctest::Approx(k0 * k0).epsilon(1e-12));
        CHECK(b(8, 7) == doctest::Approx(k0 * k1).epsilon(1e-12));
        CHECK(b(6, 8) == doctest::Approx(k1 * k1).epsilon(1e-12));
        CHECK(b(11, 7) == 0.0);  // outside the truncated support
    }
    SUBCASE("tiny sigma is the identity") {
        const auto f = random_field(12, 9, 3);
        CHECK(testing_support::max_abs_diff(gaussian_blur(f, 0.01), f) < 1e-3);
    }
    SUBCASE("linearity") {
        const auto f = random_field(23, 17, 4);
        const auto g = random_field(23, 17, 5);
        const double a = 0.7, c = -1.3;
        ScalarField comb(23, 17);
        for (std::size_t i = 0; i < comb.size(); ++i)
            comb.data()[i] = a * f.data()[i] + c * g.data()[i];
        const auto lhs = gaussian_blur(comb, 1.7);
        const auto bf = gaussian_blur(f, 1.7), bg = gaussian_blur(g, 1.7);
        for (std::size_t i = 0; i < lhs.size(); ++i)
            CHECK(std::abs(lhs.data()[i] - (a * bf.data()[i] + c * bg.data()[i])) < 1e-9);
    }
    SUBCASE("mean is preserved when the border is constant beyond the kernel") {
        Xorshift64Star rng(9);
        const int margin = 7;  // radius of sigma 2
        auto f = make_field(40, 30, [&](int x, int y) {
            const bool inner = x >= margin && x < 40 - margin && y >= margin && y < 30 - margin;
            return inner ? rng.uniform() : 0.5;
        });
        CHECK(std::abs(field_mean(gaussian_blur(f, 2.0)) - field_mean(f)) < 1e-6);
    }
}

TEST_CASE("bilinear sampling") {
    const auto f = random_field(7, 5, 21);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x) CHECK(bilinear_sample(f, x, y) == f(x, y));
    CHECK(bilinear_sample(f, 2.5, 3) == doctest::Approx((f(2, 3) + f(3, 3)) / 2).epsilon(1e-14));
    CHECK(bilinear_sample(f, -5.0, 2) == f(0, 2));
    CHECK(bilinear_sample(f, 100.0, 100.0) == f(6, 4));
    CHECK(bilinear_sample(f, 3.0, -0.7) == f(3, 0));

    SUBCASE("continuity") {
        Xorshift64Star rng(22);
        for (int t = 0; t < 2000; ++t) {
            const double x = rng.uniform(-2, 9), y = rng.uniform(-2, 7);
            const double e = rng.uniform(-1e-6, 1e-6);
            CHECK(std::abs(bilinear_sample(f, x, y) - bilinear_sample(f, x + e, y - e)) < 1e-4);
        }
    }
    SUBCASE("bilinear reproduces affine functions inside the grid") {
        const auto g = make_field(7, 5, [](int x, int y) { return 0.5 * x - 0.25 * y + 1; });
        CHECK(bilinear_sample(g, 2.3, 1.6) == doctest::Approx(0.5 * 2.3 - 0.25 * 1.6 + 1));
    }
}

TEST_CASE("pyramid") {
    SUBCASE("64x64 at 0.5 gives 64, 32, 16, 8") {
        const auto p = build_pyramid(random_field(64, 64, 1), 0.5, 8);
        REQUIRE(p.levels.size() == 4);
        const int expect[] = {64, 32, 16, 8};
        for (int k = 0; k < 4; ++k) {
            CHECK(p.levels[k].width() == expect[k]);
            CHECK(p.levels[k].height() == expect[k]);
        }
    }
    SUBCASE("8x8 is already the floor") {
        CHECK(build_pyramid(random_field(8, 8, 2)).levels.size() == 1);
    }
    SUBCASE("constant field stays constant") {
        const auto p = build_pyramid(ScalarField(50, 37, -0.4), 0.5, 8);
        for (const auto& level : p.levels)
            for (double v : level.data()) CHECK(v == doctest::Approx(-0.4).epsilon(1e-13));
    }
    SUBCASE("sizes follow the ceil recurrence") {
        Xorshift64Star rng(31);
        for (int t = 0; t < 200; ++t) {
            const int w = 8 + int(rng.uniform() * 300), h = 8 + int(rng.uniform() * 300);
            const double factor = rng.uniform(0.3, 0.9);
            std::vector<std::pair<int, int>> expect{{w, h}};
            for (;;) {
                const int nw = int(std::ceil(expect.back().first * factor));
                const int nh = int(std::ceil(expect.back().second * factor));
                if (nw < 8 || nh < 8) break;
                if (nw == expect.back().first && nh == expect.back().second) break;  // no progress
                expect.emplace_back(nw, nh);
            }
            CHECK(pyramid_sizes(w, h, factor, 8) == expect);
        }
        const auto p = build_pyramid(random_field(100, 37, 3), 0.5, 8);
        REQUIRE(p.levels.size() == 3);
        CHECK(p.levels[2].width() == 25);
        CHECK(p.levels[2].height() == 10);
    }
    SUBCASE("parameter validation") {
        const auto f = random_field(16, 16, 4);
        CHECK_THROWS_AS(build_pyramid(f, 1.0, 8), InvalidInput);
        CHECK_THROWS_AS(build_pyramid(f, 0.0, 8), InvalidInput);
        CHECK_THROWS_AS(build_pyramid(f, 0.5, 7), InvalidInput);
    }
    SUBCASE("resize maps pixel centres") {
        // 4 -> 2 halving: dst 0 samples src 0.5, dst 1 samples src 2.5.
        const auto f = make_field(4, 2, [](int x, int) { return double(x); });
        const auto r = resize_bilinear(f, 2, 2);
        CHECK(r(0, 0) == 0.5);
        CHECK(r(1, 1) == 2.5);
    }
}
