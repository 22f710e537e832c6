#include "kernels.hpp"

namespace cloudcast::detail {

namespace {

void ratio_scalar(const double* red, const double* blue, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double den = blue[i] + red[i];
        out[i] = (den == 0.0) ? 0.0 : (blue[i] - red[i]) / den;
    }
}

void convolve_rows_scalar(const double* src, double* dst, int width, int height,
                          const double* taps, int radius) {
    for (int y = 0; y < height; ++y) {
        const double* s = src + static_cast<std::ptrdiff_t>(y) * width;
        double* d = dst + static_cast<std::ptrdiff_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sx = std::clamp(x + k, 0, width - 1);
                acc += taps[k + radius] * s[sx];
            }
            d[x] = acc;
        }
    }
}

void convolve_cols_scalar(const double* src, double* dst, int width, int height,
                          const double* taps, int radius) {
    for (int y = 0; y < height; ++y) {
        double* d = dst + static_cast<std::ptrdiff_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sy = std::clamp(y + k, 0, height - 1);
                acc += taps[k + radius] * src[static_cast<std::ptrdiff_t>(sy) * width + x];
            }
            d[x] = acc;
        }
    }
}

void jacobi_sweep_scalar(const TensorPlanes& t, double alpha2, const double* u, const double* v,
                         double* u_out, double* v_out, int width, int height) {
    for (int y = 0; y < height; ++y) {
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(y) * width;
        const std::ptrdiff_t up = (y > 0) ? row - width : row;
        const std::ptrdiff_t down = (y < height - 1) ? row + width : row;
        for (int x = 0; x < width; ++x) {
            const int xl = (x > 0) ? x - 1 : x;
            const int xr = (x < width - 1) ? x + 1 : x;
            const std::ptrdiff_t i = row + x;
            const double ub = neighbour_mean(u[row + xl], u[row + xr], u[up + x], u[down + x]);
            const double vb = neighbour_mean(v[row + xl], v[row + xr], v[up + x], v[down + x]);
            solve_flow_block(t.j11[i], t.j12[i], t.j22[i], t.j13[i], t.j23[i], alpha2, ub, vb,
                             u_out[i], v_out[i]);
        }
    }
}

void warp_plane_scalar(const double* src, const double* du, const double* dv, double direction,
                       double* dst, int width, int height) {
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(y) * width + x;
            dst[i] = bilinear_at(src, width, height, static_cast<double>(x) + direction * du[i],
                                 static_cast<double>(y) + direction * dv[i]);
        }
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar",           ratio_scalar,        convolve_rows_scalar,
                                   convolve_cols_scalar, jacobi_sweep_scalar, warp_plane_scalar};
    return table;
}

}  // namespace cloudcast::detail
