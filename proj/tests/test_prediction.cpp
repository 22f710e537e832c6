#include <doctest.h>

#include <cmath>
#include <cstring>

#include "cloudcast/error.hpp"
#include "cloudcast/image_ops.hpp"
#include "cloudcast/prediction.hpp"
#include "cloudcast/synthetic.hpp"
#include "support.hpp"

using namespace cloudcast;

namespace {

bool same_pixels(const Image& a, const Image& b) {
    return a.same_shape(b) &&
           std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

double max_diff(const Image& a, const Image& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

FlowField constant_flow(int w, int h, double u, double v) {
    FlowField f(w, h);
    for (double& s : f.u.data()) s = u;
    for (double& s : f.v.data()) s = v;
    return f;
}

// Centroid of cloud cover, weighting each pixel by how far its ratio drops below the sky's.
std::pair<double, double> cloud_centroid(const Image& img) {
    const double sky = (kSkyRgb[2] - kSkyRgb[0]) / (kSkyRgb[2] + kSkyRgb[0]);
    const auto r = ratio_channel(img);
    double sw = 0, sx = 0, sy = 0;
    for (int y = 0; y < r.height(); ++y)
        for (int x = 0; x < r.width(); ++x) {
            const double w = std::max(0.0, sky - r(x, y) - 0.05);
            sw += w;
            sx += w * x;
            sy += w * y;
        }
    REQUIRE(sw > 0);
    return {sx / sw, sy / sw};
}

SyntheticSequence single_blob(double vx, double vy, int frames, std::uint64_t seed) {
    SceneSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.n_frames = frames;
    spec.velocity_x = vx;
    spec.velocity_y = vy;
    spec.n_blobs = 1;
    spec.blob_scale = 9;
    spec.noise_sigma = 0;
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("warp_image") {
    Xorshift64Star rng(3);
    Image img(13, 9, 3);
    for (auto& s : img.data()) s = rng.uniform();

    SUBCASE("zero flow is the identity") {
        CHECK(same_pixels(warp_image(img, FlowField(13, 9)), img));
    }
    SUBCASE("constant (1, 0) shifts a ramp right by one pixel") {
        Image ramp(10, 4, 3);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 10; ++x) ramp.at(c, x, y) = 0.05 * x + 0.1 * c;
        const auto out = warp_image(ramp, constant_flow(10, 4, 1.0, 0.0));
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 4; ++y)
                for (int x = 1; x < 10; ++x)
                    CHECK(out.at(c, x, y) == doctest::Approx(0.05 * (x - 1) + 0.1 * c).epsilon(1e-14));
    }
    SUBCASE("flow wider than the frame replicates the border") {
        const auto right = warp_image(img, constant_flow(13, 9, 1000.0, 0.0));
        const auto left = warp_image(img, constant_flow(13, 9, -1000.0, 0.0));
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 9; ++y)
                for (int x = 0; x < 13; ++x) {
                    CHECK(right.at(c, x, y) == img.at(c, 0, y));
                    CHECK(left.at(c, x, y) == img.at(c, 12, y));
                }
    }
    SUBCASE("output stays within the input range") {
        FlowField f(13, 9);
        for (double& s : f.u.data()) s = rng.uniform(-20, 20);
        for (double& s : f.v.data()) s = rng.uniform(-20, 20);
        const auto out = warp_image(img, f);
        for (int c = 0; c < 3; ++c) {
            const auto p = img.plane(c);
            const double lo = *std::min_element(p.begin(), p.end());
            const double hi = *std::max_element(p.begin(), p.end());
            for (double s : out.plane(c)) {
                CHECK(s >= lo);
                CHECK(s <= hi);
            }
        }
    }
    SUBCASE("one channel images are supported") {
        Image grey(6, 5, 1, 0.25);
        CHECK(warp_image(grey, constant_flow(6, 5, 0.5, 0.5)).channels() == 1);
    }
    SUBCASE("size mismatch names both sizes") {
        try {
            warp_image(img, FlowField(12, 9));
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            const std::string msg = e.what();
            CHECK(msg.find("13x9") != std::string::npos);
            CHECK(msg.find("12x9") != std::string::npos);
        }
    }
}

TEST_CASE("predict_next") {
    SUBCASE("static sky") {
        const auto seq = generate(SceneSpec{.velocity_x = 0, .velocity_y = 0, .noise_sigma = 0});
        const auto p = predict_next(seq.frames[0], seq.frames[0], FlowParams{});
        CHECK(same_pixels(p.frame, seq.frames[0]));
    }
    SUBCASE("blob at (2, 0) px/frame lands within half a pixel") {
        const auto seq = single_blob(2, 0, 3, 4);
        const auto p = predict_next(seq.frames[0], seq.frames[1], FlowParams{});
        const auto [px, py] = cloud_centroid(p.frame);
        const auto [tx, ty] = cloud_centroid(seq.frames[2]);
        CHECK(std::hypot(px - tx, py - ty) < 0.5);
    }
    SUBCASE("blob at (0, 3) px/frame has small intensity error") {
        const auto seq = single_blob(0, 3, 3, 5);
        const auto p = predict_next(seq.frames[0], seq.frames[1], FlowParams{});
        double mae = 0;
        for (std::size_t i = 0; i < p.frame.data().size(); ++i)
            mae += std::abs(p.frame.data()[i] - seq.frames[2].data()[i]);
        mae /= static_cast<double>(p.frame.data().size());
        CHECK(mae < 0.02);
    }
    SUBCASE("input validation") {
        const Image a(16, 16, 3), b(16, 12, 3);
        CHECK_THROWS_AS(predict_next(a, b, FlowParams{}), InvalidInput);
        CHECK_THROWS_AS(predict_next(Image(16, 16, 1), Image(16, 16, 1), FlowParams{}), InvalidInput);
    }
}

TEST_CASE("cascade_predict") {
    SUBCASE("static scene is a fixed point") {
        const auto seq = generate(SceneSpec{.n_frames = 3, .velocity_x = 0, .velocity_y = 0});
        const auto fc = cascade_predict(seq.frames[1], seq.frames[1], 5, FlowParams{});
        REQUIRE(fc.frames.size() == 5);
        REQUIRE(fc.flows.size() == 5);
        for (const auto& f : fc.frames) CHECK(max_diff(f, seq.frames[1]) < 1e-9);
    }
    SUBCASE("constant velocity (1, 1)") {
        const auto seq = single_blob(1, 1, 5, 6);
        const auto fc = cascade_predict(seq.frames[0], seq.frames[1], 3, FlowParams{}, 1000, 2.0);
        CHECK(fc.base_time == 1000);
        CHECK(fc.frame_interval == 2.0);
        for (int k = 0; k < 3; ++k) {
            const auto [px, py] = cloud_centroid(fc.frames[k]);
            const auto [tx, ty] = cloud_centroid(seq.frames[2 + k]);
            const double err = std::hypot(px - tx, py - ty);
            MESSAGE("step " << k + 1 << " centroid error " << err);
            CHECK(err < 1.5);
        }
    }
    SUBCASE("one step is predict_next") {
        const auto seq = single_blob(2, -1, 3, 7);
        const auto fc = cascade_predict(seq.frames[0], seq.frames[1], 1, FlowParams{});
        const auto p = predict_next(seq.frames[0], seq.frames[1], FlowParams{});
        REQUIRE(fc.frames.size() == 1);
        CHECK(same_pixels(fc.frames[0], p.frame));
    }
    SUBCASE("k steps compose predict_next over its own outputs") {
        SceneSpec spec;
        spec.width = 64;
        spec.height = 48;
        spec.n_frames = 3;
        spec.velocity_x = 2;
        spec.velocity_y = 1;
        const auto seq = generate(spec);
        FlowParams params;
        params.iterations = 40;
        const auto fc = cascade_predict(seq.frames[0], seq.frames[1], 4, params);
        Image older = seq.frames[0], newer = seq.frames[1];
        for (int k = 0; k < 4; ++k) {
            Prediction p = predict_next(older, newer, params);
            CHECK(max_diff(p.frame, fc.frames[k]) < 1e-6);
            older = newer;
            newer = p.frame;
        }
    }
    SUBCASE("exact translation keeps reproducing the commanded motion") {
        // Periodic texture moved by whole pixels: every cascade flow should report the
        // same displacement in the interior.
        const int w = 64, h = 64;
        auto frame = [&](int shift) {
            Image img(w, h, 3);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double t = 0.5 + 0.35 * std::sin(2 * M_PI * (x - shift) / 32.0) *
                                               std::cos(2 * M_PI * (y - shift) / 32.0);
                    img.at(0, x, y) = 0.3 + 0.5 * t;
                    img.at(1, x, y) = 0.5 + 0.3 * t;
                    img.at(2, x, y) = 0.85;
                }
            return img;
        };
        const auto fc = cascade_predict(frame(0), frame(2), 3, FlowParams{});
        for (int k = 0; k < 3; ++k) {
            double su = 0, sv = 0;
            int n = 0;
            for (int y = 16; y < 48; ++y)
                for (int x = 16; x < 48; ++x) {
                    su += fc.flows[k].u(x, y);
                    sv += fc.flows[k].v(x, y);
                    ++n;
                }
            CHECK(su / n == doctest::Approx(2.0).epsilon(0.05));
            CHECK(sv / n == doctest::Approx(2.0).epsilon(0.05));
        }
    }
    SUBCASE("rejects zero steps") {
        const Image a(16, 16, 3);
        CHECK_THROWS_AS(cascade_predict(a, a, 0, FlowParams{}), InvalidInput);
    }
}
