#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cloudcast/flow.hpp"
#include "cloudcast/image.hpp"
#include "cloudcast/mask.hpp"

namespace cloudcast {

/// xorshift64* (Vigna): state ^= state >> 12; state ^= state << 25;
/// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D. The seed is
/// expanded through one splitmix64 step so that seed 0 is valid.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

private:
    std::uint64_t state_;
};

struct SceneSpec {
    int width = 128;
    int height = 128;
    int n_frames = 12;
    double velocity_x = 2.0;  // px per frame
    double velocity_y = 0.0;
    double deformation_rate = 0.0;  // per-frame isotropic growth of blob scale
    int n_blobs = 8;
    double blob_scale = 8.0;  // Gaussian sigma of a blob, px
    double noise_sigma = 0.01;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Parses key=value text ('#' comments). Keys: width, height, n_frames, velocity_x,
/// velocity_y, deformation_rate, n_blobs, blob_scale, noise_sigma, seed.
/// Keys absent from the text keep the values of `base`.
SceneSpec parse_scene_spec(std::string_view text, const SceneSpec& base = {});

struct SyntheticSequence {
    std::vector<Image> frames;
    std::vector<FlowField> true_flow;  // frame k -> k+1
    std::vector<BinaryMask> true_masks;  // sky = set
};

// Colours of the rendered sky and of thin / thick cloud.
inline constexpr double kSkyRgb[3] = {0.30, 0.50, 0.85};
inline constexpr double kThinCloudRgb[3] = {0.80, 0.82, 0.90};
inline constexpr double kThickCloudRgb[3] = {0.86, 0.86, 0.86};

/// Renders Gaussian cloud blobs over a uniform blue sky. Blob centres move by
/// the commanded velocity each frame and their scales grow by
/// (1 + deformation_rate) per frame. Centres are drawn so that every blob stays
/// inside the frame for the whole sequence whenever the motion allows it.
SyntheticSequence generate(const SceneSpec& spec);

/// Mean Euclidean distance between flow vectors over `roi` (set = included; default all).
double endpoint_error(const FlowField& estimated, const FlowField& truth,
                      const BinaryMask* roi = nullptr);

}  // namespace cloudcast
