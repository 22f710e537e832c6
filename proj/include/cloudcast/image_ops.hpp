#pragma once

#include <utility>
#include <vector>

#include "cloudcast/image.hpp"

namespace cloudcast {

/// (B - R) / (B + R) per pixel, 0 where B + R = 0. Requires a 3-channel RGB image.
ScalarField ratio_channel(const Image& rgb);

struct Gradients {
    ScalarField dx;
    ScalarField dy;
};

/// Central differences in the interior, one-sided differences on the border rows/columns.
Gradients spatial_gradients(const ScalarField& f);

/// f2 - f1.
ScalarField temporal_gradient(const ScalarField& f1, const ScalarField& f2);

/// Normalized Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian smoothing with replicate borders.
ScalarField gaussian_blur(const ScalarField& f, double sigma);

/// Bilinear sample with coordinates clamped to the field (replicate border).
double bilinear_sample(const ScalarField& f, double x, double y);

/// Resample to a new size, mapping pixel centres: src = (dst + 0.5) * (src_size / dst_size) - 0.5.
ScalarField resize_bilinear(const ScalarField& f, int width, int height);

struct Pyramid {
    std::vector<ScalarField> levels;  // level 0 is full resolution
    double scale_factor = 0.5;
};

/// Level sizes produced by build_pyramid: each level is ceil(previous * scale_factor),
/// stopping before either dimension would fall below min_dim.
std::vector<std::pair<int, int>> pyramid_sizes(int width, int height, double scale_factor,
                                               int min_dim);

Pyramid build_pyramid(const ScalarField& f, double scale_factor = 0.5, int min_dim = 8);

}  // namespace cloudcast
