#include "cloudcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cloudcast/config.hpp"
#include "cloudcast/error.hpp"

namespace cloudcast {

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    state_ = z ^ (z >> 31);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Xorshift64Star::next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
}

double Xorshift64Star::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xorshift64Star::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneSpec::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidInput("scene spec: " + msg); };
    if (width < 32 || height < 32) fail("width and height must be >= 32");
    if (n_frames < 3) fail("n_frames must be >= 3");
    if (!std::isfinite(velocity_x) || !std::isfinite(velocity_y)) fail("velocity must be finite");
    if (!(deformation_rate >= 0.0) || !std::isfinite(deformation_rate)) {
        fail("deformation_rate must be >= 0");
    }
    if (n_blobs < 0) fail("n_blobs must be >= 0");
    if (!(blob_scale > 0.0) || !std::isfinite(blob_scale)) fail("blob_scale must be > 0");
    if (!(noise_sigma >= 0.0 && noise_sigma < 0.1)) fail("noise_sigma must lie in [0, 0.1)");
}

SceneSpec parse_scene_spec(std::string_view text, const SceneSpec& base) {
    SceneSpec spec = base;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "width") spec.width = static_cast<int>(parse_integer(key, value));
        else if (key == "height") spec.height = static_cast<int>(parse_integer(key, value));
        else if (key == "n_frames") spec.n_frames = static_cast<int>(parse_integer(key, value));
        else if (key == "velocity_x") spec.velocity_x = parse_double(key, value);
        else if (key == "velocity_y") spec.velocity_y = parse_double(key, value);
        else if (key == "deformation_rate") spec.deformation_rate = parse_double(key, value);
        else if (key == "n_blobs") spec.n_blobs = static_cast<int>(parse_integer(key, value));
        else if (key == "blob_scale") spec.blob_scale = parse_double(key, value);
        else if (key == "noise_sigma") spec.noise_sigma = parse_double(key, value);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_integer(key, value));
        else throw InvalidInput("scene spec: unknown key '" + key + "'");
    }
    spec.validate();
    return spec;
}

namespace {

struct Blob {
    double cx, cy, sigma;
};

// Cloud opacity rises from 0 to 1 as the blob density crosses [0.35, 0.65];
// the ground-truth mask boundary sits at density 0.5.
constexpr double kEdgeLo = 0.35;
constexpr double kEdgeHi = 0.65;
constexpr double kMaskLevel = 0.5;

double smoothstep(double lo, double hi, double x) {
    const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// Interval of start coordinates keeping [c - margin, c + margin] inside [0, extent-1]
// along the path c + k*velocity, k = 0..steps.
std::pair<double, double> start_range(double extent, double margin, double velocity, int steps) {
    const double travel = velocity * steps;
    double lo = std::max(margin, margin - travel);
    double hi = std::min(extent - 1.0 - margin, extent - 1.0 - margin - travel);
    if (lo > hi) {
        const double mid = 0.5 * (extent - 1.0 - travel);
        return {mid, mid};
    }
    return {lo, hi};
}

}  // namespace

SyntheticSequence generate(const SceneSpec& spec) {
    spec.validate();
    Xorshift64Star rng(spec.seed);
    const int steps = spec.n_frames - 1;
    const double max_growth = std::pow(1.0 + spec.deformation_rate, steps);

    std::vector<Blob> blobs;
    for (int i = 0; i < spec.n_blobs; ++i) {
        const double sigma = spec.blob_scale * rng.uniform(0.7, 1.3);
        const double margin = 2.0 * sigma * max_growth;
        const auto [xlo, xhi] = start_range(spec.width, margin, spec.velocity_x, steps);
        const auto [ylo, yhi] = start_range(spec.height, margin, spec.velocity_y, steps);
        const double cx = rng.uniform(xlo, xhi);
        const double cy = rng.uniform(ylo, yhi);
        blobs.push_back({cx, cy, sigma});
    }

    SyntheticSequence seq;
    const int w = spec.width;
    const int h = spec.height;
    for (int k = 0; k < spec.n_frames; ++k) {
        const double growth = std::pow(1.0 + spec.deformation_rate, k);
        Image frame(w, h, 3);
        BinaryMask mask(w, h, true);
        FlowField flow(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double density = 0.0;
                double strongest = 0.0;
                const Blob* dominant = nullptr;
                for (const Blob& b : blobs) {
                    const double dx = x - (b.cx + k * spec.velocity_x);
                    const double dy = y - (b.cy + k * spec.velocity_y);
                    const double s = b.sigma * growth;
                    const double g = std::exp(-0.5 * (dx * dx + dy * dy) / (s * s));
                    density += g;
                    if (g > strongest) {
                        strongest = g;
                        dominant = &b;
                    }
                }
                const double opacity = smoothstep(kEdgeLo, kEdgeHi, density);
                const double thickness = std::clamp(density - kMaskLevel, 0.0, 1.0);
                for (int c = 0; c < 3; ++c) {
                    const double cloud =
                        kThinCloudRgb[c] + thickness * (kThickCloudRgb[c] - kThinCloudRgb[c]);
                    frame.at(c, x, y) = kSkyRgb[c] + opacity * (cloud - kSkyRgb[c]);
                }
                mask.set(x, y, density < kMaskLevel);

                double fu = spec.velocity_x;
                double fv = spec.velocity_y;
                if (spec.deformation_rate > 0.0 && dominant && strongest > 1e-3) {
                    fu += spec.deformation_rate * (x - (dominant->cx + k * spec.velocity_x));
                    fv += spec.deformation_rate * (y - (dominant->cy + k * spec.velocity_y));
                }
                flow.u(x, y) = fu;
                flow.v(x, y) = fv;
            }
        }
        if (spec.noise_sigma > 0.0) {
            for (double& s : frame.data()) {
                s = std::clamp(s + spec.noise_sigma * rng.normal(), 0.0, 1.0);
            }
        }
        seq.frames.push_back(std::move(frame));
        seq.true_masks.push_back(std::move(mask));
        if (k < steps) seq.true_flow.push_back(std::move(flow));
    }
    return seq;
}

double endpoint_error(const FlowField& estimated, const FlowField& truth, const BinaryMask* roi) {
    if (!estimated.u.same_shape(truth.u)) {
        throw InvalidInput("endpoint error: flow sizes differ");
    }
    if (roi && (roi->width() != truth.width() || roi->height() != truth.height())) {
        throw InvalidInput("endpoint error: ROI size differs from flow size");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < truth.u.size(); ++i) {
        if (roi && !roi->bits()[i]) continue;
        const double du = estimated.u.data()[i] - truth.u.data()[i];
        const double dv = estimated.v.data()[i] - truth.v.data()[i];
        sum += std::hypot(du, dv);
        ++n;
    }
    if (n == 0) throw InvalidInput("endpoint error: empty region of interest");
    return sum / static_cast<double>(n);
}

}  // namespace cloudcast
