#include "cloudcast/image_ops.hpp"

#include <cmath>
#include <string>

#include "cloudcast/error.hpp"
#include "kernels/kernels.hpp"

namespace cloudcast {

ScalarField ratio_channel(const Image& rgb) {
    if (rgb.channels() != 3) {
        throw InvalidInput("ratio channel needs an RGB image, got " +
                           std::to_string(rgb.channels()) + " channel(s)");
    }
    ScalarField out(rgb.width(), rgb.height());
    detail::active_kernels().ratio(rgb.plane(0).data(), rgb.plane(2).data(), out.data().data(),
                                   out.size());
    return out;
}

Gradients spatial_gradients(const ScalarField& f) {
    const int w = f.width();
    const int h = f.height();
    Gradients g{ScalarField(w, h), ScalarField(w, h)};
    for (int y = 0; y < h; ++y) {
        const double* r = f.row(y);
        double* dx = g.dx.row(y);
        dx[0] = r[1] - r[0];
        for (int x = 1; x < w - 1; ++x) dx[x] = (r[x + 1] - r[x - 1]) * 0.5;
        dx[w - 1] = r[w - 1] - r[w - 2];
    }
    for (int y = 0; y < h; ++y) {
        double* dy = g.dy.row(y);
        if (y == 0) {
            for (int x = 0; x < w; ++x) dy[x] = f(x, 1) - f(x, 0);
        } else if (y == h - 1) {
            for (int x = 0; x < w; ++x) dy[x] = f(x, h - 1) - f(x, h - 2);
        } else {
            const double* above = f.row(y - 1);
            const double* below = f.row(y + 1);
            for (int x = 0; x < w; ++x) dy[x] = (below[x] - above[x]) * 0.5;
        }
    }
    return g;
}

ScalarField temporal_gradient(const ScalarField& f1, const ScalarField& f2) {
    if (!f1.same_shape(f2)) {
        throw InvalidInput("temporal gradient: frame sizes differ (" + std::to_string(f1.width()) +
                           "x" + std::to_string(f1.height()) + " vs " +
                           std::to_string(f2.width()) + "x" + std::to_string(f2.height()) + ")");
    }
    ScalarField out(f1.width(), f1.height());
    auto a = f1.data();
    auto b = f2.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] - a[i];
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidInput("gaussian sigma must be positive, got " + std::to_string(sigma));
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        sum += taps[k + radius];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

ScalarField gaussian_blur(const ScalarField& f, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const auto& k = detail::active_kernels();
    ScalarField tmp(f.width(), f.height());
    ScalarField out(f.width(), f.height());
    k.convolve_rows(f.data().data(), tmp.data().data(), f.width(), f.height(), taps.data(), radius);
    k.convolve_cols(tmp.data().data(), out.data().data(), f.width(), f.height(), taps.data(),
                    radius);
    return out;
}

double bilinear_sample(const ScalarField& f, double x, double y) {
    return detail::bilinear_at(f.data().data(), f.width(), f.height(), x, y);
}

ScalarField resize_bilinear(const ScalarField& f, int width, int height) {
    ScalarField out(width, height);
    const double sx = static_cast<double>(f.width()) / width;
    const double sy = static_cast<double>(f.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < width; ++x) {
            out(x, y) = bilinear_sample(f, (x + 0.5) * sx - 0.5, src_y);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> pyramid_sizes(int width, int height, double scale_factor,
                                               int min_dim) {
    if (!(scale_factor > 0.0 && scale_factor < 1.0)) {
        throw InvalidInput("pyramid scale factor must lie in (0, 1), got " +
                           std::to_string(scale_factor));
    }
    if (min_dim < 8) {
        throw InvalidInput("pyramid minimum dimension must be at least 8, got " +
                           std::to_string(min_dim));
    }
    std::vector<std::pair<int, int>> sizes{{width, height}};
    for (;;) {
        const auto [w, h] = sizes.back();
        const int nw = static_cast<int>(std::ceil(w * scale_factor));
        const int nh = static_cast<int>(std::ceil(h * scale_factor));
        if (nw < min_dim || nh < min_dim || (nw == w && nh == h)) break;
        sizes.emplace_back(nw, nh);
    }
    return sizes;
}

Pyramid build_pyramid(const ScalarField& f, double scale_factor, int min_dim) {
    const auto sizes = pyramid_sizes(f.width(), f.height(), scale_factor, min_dim);
    Pyramid p;
    p.scale_factor = scale_factor;
    p.levels.reserve(sizes.size());
    p.levels.push_back(f);
    for (std::size_t k = 1; k < sizes.size(); ++k) {
        const ScalarField smoothed = gaussian_blur(p.levels.back(), 1.0);
        p.levels.push_back(resize_bilinear(smoothed, sizes[k].first, sizes[k].second));
    }
    return p;
}

}  // namespace cloudcast
