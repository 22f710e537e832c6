#include <doctest.h>

#include <cmath>

#include "cloudcast/error.hpp"
#include "cloudcast/image_ops.hpp"
#include "cloudcast/segmentation.hpp"
#include "cloudcast/synthetic.hpp"
#include "support.hpp"

using namespace cloudcast;

namespace {

Image two_region_frame(int w, int h, int split) {
    Image img(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool blue = x < split;
            img.at(0, x, y) = blue ? 0.0 : 0.6;  // ratio 1 | ratio (0.2-0.6)/0.8 = -0.5
            img.at(1, x, y) = blue ? 0.3 : 0.4;
            img.at(2, x, y) = blue ? 1.0 : 0.2;
        }
    return img;
}

Image uniform_ratio_frame(double ratio) {
    // B = R (1 + r) / (1 - r)
    const double r = 0.1;
    Image img(20, 20, 3);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) {
            img.at(0, x, y) = r;
            img.at(1, x, y) = 0.5;
            img.at(2, x, y) = r * (1 + ratio) / (1 - ratio);
        }
    return img;
}

BinaryMask random_mask(int w, int h, std::uint64_t seed) {
    Xorshift64Star rng(seed);
    BinaryMask m(w, h);
    for (auto& b : m.bits()) b = rng.uniform() < 0.4 ? 1 : 0;
    return m;
}

std::vector<TimedFrame> timed(const std::vector<Image>& frames, std::int64_t step = 120) {
    std::vector<TimedFrame> out;
    for (std::size_t k = 0; k < frames.size(); ++k)
        out.push_back({static_cast<std::int64_t>(1'600'000'000 + k * step), frames[k]});
    return out;
}

}  // namespace

TEST_CASE("segmentation") {
    SUBCASE("perfectly separable two-region frame splits on the boundary") {
        const auto mask = segment(two_region_frame(20, 10, 7));
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 20; ++x) CHECK(mask(x, y) == (x < 7));
        // Both modes sit in bins 64 and 255; every cut in (64, 255] ties, the middle is bin 160.
        const auto th = ratio_threshold(ratio_channel(two_region_frame(20, 10, 7)));
        CHECK_FALSE(th.unimodal);
        CHECK(th.value == doctest::Approx(-1.0 + 2.0 * 160 / 256).epsilon(1e-15));
    }
    SUBCASE("uniform frames use the fallback threshold") {
        const auto blue = segment(uniform_ratio_frame(0.8));
        CHECK(blue.count() == blue.size());
        CHECK(ratio_threshold(ratio_channel(uniform_ratio_frame(0.8))).unimodal);
        const auto grey = segment(uniform_ratio_frame(0.1));
        CHECK(grey.count() == 0);
        SegmentParams p;
        p.fallback_threshold = 0.05;
        CHECK(segment(uniform_ratio_frame(0.1), p).count() == 400);
    }
    SUBCASE("threshold maximizes between-class variance") {
        Xorshift64Star rng(17);
        ScalarField r(40, 30);
        for (auto& v : r.data())
            v = std::clamp(rng.uniform() < 0.35 ? -0.1 + 0.08 * rng.normal() : 0.45 + 0.1 * rng.normal(),
                           -1.0, 1.0);
        const auto th = ratio_threshold(r);
        // Brute force over every cut using bin centres.
        std::vector<double> hist(256, 0.0);
        for (double v : r.data()) hist[std::min(255, int(std::floor((v + 1) * 128)))] += 1;
        double best = 0;
        for (int t = 1; t < 256; ++t) {
            double w0 = 0, w1 = 0, m0 = 0, m1 = 0;
            for (int b = 0; b < 256; ++b) {
                const double c = -1 + (b + 0.5) / 128;
                (b < t ? w0 : w1) += hist[b];
                (b < t ? m0 : m1) += hist[b] * c;
            }
            if (w0 == 0 || w1 == 0) continue;
            const double n = w0 + w1;
            const double d = m0 / w0 - m1 / w1;
            best = std::max(best, (w0 / n) * (w1 / n) * d * d);
        }
        CHECK(th.between_class_variance == doctest::Approx(best).epsilon(1e-12));
        const auto mask = segment_ratio(r, {});
        for (std::size_t i = 0; i < r.size(); ++i) {
            const bool above = std::floor((r.data()[i] + 1) * 128) >= std::lround((th.value + 1) * 128);
            CHECK(bool(mask.bits()[i]) == above);
        }
    }
    SUBCASE("generator scenes with noise 0.02") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            SceneSpec spec;
            spec.noise_sigma = 0.02;
            spec.n_frames = 3;
            spec.seed = seed;
            const auto seq = generate(spec);
            const double acc = accuracy(segment(seq.frames[1]), seq.true_masks[1]);
            MESSAGE("seed " << seed << " agreement " << acc);
            CHECK(acc >= 0.98);
        }
    }
    SUBCASE("invariant to a common positive scale of R and B") {
        SceneSpec spec;
        spec.n_frames = 3;
        const auto seq = generate(spec);
        Image scaled = seq.frames[0];
        for (int c : {0, 2})
            for (auto& s : scaled.plane(c)) s *= 0.5;
        CHECK(segment(scaled) == segment(seq.frames[0]));
        CHECK(segment(seq.frames[0]) == segment(seq.frames[0]));
    }
    SUBCASE("needs three channels") {
        CHECK_THROWS_AS(segment(Image(8, 8, 1)), InvalidInput);
    }
}

TEST_CASE("accuracy") {
    const auto a = random_mask(10, 10, 1);
    CHECK(accuracy(a, a) == 1.0);
    CHECK(accuracy(a, a.complement()) == 0.0);

    BinaryMask b = a;
    for (int i = 0; i < 25; ++i) {
        const int x = (i * 7) % 10, y = (i * 3 + i / 10) % 10;
        b.set(x, y, !b(x, y));
    }
    int differ = 0;
    for (std::size_t i = 0; i < 100; ++i) differ += a.bits()[i] != b.bits()[i];
    REQUIRE(differ == 25);
    CHECK(accuracy(a, b) == 0.75);

    for (std::uint64_t s = 2; s < 12; ++s) {
        const auto p = random_mask(13, 7, s), q = random_mask(13, 7, s + 50);
        CHECK(accuracy(p, q) == accuracy(q, p));
        CHECK(accuracy(p, p.complement()) == 0.0);
    }

    BinaryMask roi(10, 10, false);
    for (int x = 0; x < 10; ++x) roi.set(x, 0, true);
    BinaryMask c = a;
    c.set(4, 5, !c(4, 5));  // outside the ROI
    CHECK(accuracy(a, c, &roi) == 1.0);
    CHECK_THROWS_AS(accuracy(a, random_mask(10, 9, 3)), InvalidInput);
    const BinaryMask empty_roi(10, 10, false);
    CHECK_THROWS_AS(accuracy(a, a, &empty_roi), InvalidInput);
}

TEST_CASE("evaluate_sequence") {
    SUBCASE("identical frames score 1 at every lead") {
        SceneSpec spec;
        spec.n_frames = 3;
        const auto seq = generate(spec);
        const auto frames = timed(std::vector<Image>(6, seq.frames[0]));
        const auto rep = evaluate_sequence(frames, 3, FlowParams{});
        REQUIRE(rep.rows.size() == 3);
        for (int k = 0; k < 3; ++k) {
            CHECK(rep.rows[k].lead_minutes == 2.0 * (k + 1));
            CHECK(rep.rows[k].accuracy == 1.0);
            CHECK(rep.rows[k].n_frames == 2);
        }
        CHECK(rep.method == "ratio-otsu");
    }
    SUBCASE("constant velocity scene stays accurate") {
        SceneSpec spec;
        spec.n_frames = 6;
        spec.velocity_x = 1.5;
        spec.velocity_y = 1.0;
        spec.seed = 8;
        const auto rep = evaluate_sequence(timed(generate(spec).frames), 3, FlowParams{});
        for (const auto& row : rep.rows) CHECK(row.accuracy >= 0.95);
    }
    SUBCASE("lead times follow the nominal interval") {
        SceneSpec spec;
        spec.n_frames = 7;
        const auto rep = evaluate_sequence(timed(generate(spec).frames, 300), 5, FlowParams{});
        REQUIRE(rep.rows.size() == 5);
        for (int k = 0; k < 5; ++k) CHECK(rep.rows[k].lead_minutes == doctest::Approx(5.0 * (k + 1)));
    }
    SUBCASE("input checks") {
        SceneSpec spec;
        spec.n_frames = 6;
        const auto frames = timed(generate(spec).frames);
        CHECK_THROWS_AS(evaluate_sequence(std::span(frames).first(4), 3, FlowParams{}), InvalidInput);

        EvaluateOptions every_two_minutes;
        every_two_minutes.frame_interval_minutes = 2.0;
        auto jittered = frames;
        jittered[3].timestamp += 10;  // within 10% of 120 s
        CHECK_NOTHROW(evaluate_sequence(jittered, 3, FlowParams{}, every_two_minutes));

        auto irregular = frames;
        for (std::size_t k = 3; k < irregular.size(); ++k) irregular[k].timestamp += 60;
        try {
            evaluate_sequence(irregular, 3, FlowParams{}, every_two_minutes);
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            const std::string msg = e.what();
            CHECK(msg.find("frame 2") != std::string::npos);
            CHECK(msg.find("frame 3") != std::string::npos);
        }
    }
}

TEST_CASE("merge_reports weights by anchors") {
    AccuracyReport a, b;
    a.rows = {{2, 0.9, 1}, {4, 0.8, 1}};
    b.rows = {{2, 0.6, 3}, {4, 0.4, 3}};
    const std::vector<AccuracyReport> both{a, b};
    const auto m = merge_reports(both);
    CHECK(m.rows[0].accuracy == doctest::Approx((0.9 + 3 * 0.6) / 4));
    CHECK(m.rows[1].accuracy == doctest::Approx((0.8 + 3 * 0.4) / 4));
    CHECK(m.rows[1].n_frames == 4);
    b.rows.pop_back();
    const std::vector<AccuracyReport> mismatched{a, b};
    CHECK_THROWS_AS(merge_reports(mismatched), InvalidInput);
}
