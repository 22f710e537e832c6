#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace cloudcast::detail {

/// Smoothed structure-tensor planes feeding the Jacobi update.
struct TensorPlanes {
    const double* j11;
    const double* j12;
    const double* j22;
    const double* j13;
    const double* j23;
};

struct KernelTable {
    const char* name;

    // out = (blue - red) / (blue + red), 0 where the denominator is 0.
    void (*ratio)(const double* red, const double* blue, double* out, std::size_t n);

    // Horizontal / vertical correlation with 2*radius+1 taps, replicate border.
    void (*convolve_rows)(const double* src, double* dst, int width, int height,
                          const double* taps, int radius);
    void (*convolve_cols)(const double* src, double* dst, int width, int height,
                          const double* taps, int radius);

    // One Jacobi sweep of the quadratic flow energy. Reads (u, v), writes (u_out, v_out).
    void (*jacobi_sweep)(const TensorPlanes& tensor, double alpha2, const double* u,
                         const double* v, double* u_out, double* v_out, int width, int height);

    // dst(x, y) = bilinear(src, x + direction*du(x, y), y + direction*dv(x, y)).
    void (*warp_plane)(const double* src, const double* du, const double* dv, double direction,
                       double* dst, int width, int height);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();  // nullptr when not compiled in
const KernelTable& active_kernels();

// Shared scalar building blocks. The SIMD kernels mirror these operation by
// operation, including the comparison forms of the clamps (max/min semantics
// of the vector instructions), so results agree bit for bit.

inline double clamp_coord(double c, double hi) {
    c = (c > 0.0) ? c : 0.0;
    return (c < hi) ? c : hi;
}

inline double bilinear_at(const double* data, int width, int height, double x, double y) {
    x = clamp_coord(x, static_cast<double>(width - 1));
    y = clamp_coord(y, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(std::floor(x)), width - 2);
    const int y0 = std::min(static_cast<int>(std::floor(y)), height - 2);
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    const double* r0 = data + static_cast<std::ptrdiff_t>(y0) * width + x0;
    const double* r1 = r0 + width;
    const double top = (1.0 - fx) * r0[0] + fx * r0[1];
    const double bottom = (1.0 - fx) * r1[0] + fx * r1[1];
    return (1.0 - fy) * top + fy * bottom;
}

inline void solve_flow_block(double j11, double j12, double j22, double j13, double j23,
                             double alpha2, double u_avg, double v_avg, double& u, double& v) {
    const double a11 = j11 + alpha2;
    const double a22 = j22 + alpha2;
    const double r1 = alpha2 * u_avg - j13;
    const double r2 = alpha2 * v_avg - j23;
    const double det = a11 * a22 - j12 * j12;
    u = (a22 * r1 - j12 * r2) / det;
    v = (a11 * r2 - j12 * r1) / det;
}

inline double neighbour_mean(double left, double right, double up, double down) {
    return ((left + right) + (up + down)) * 0.25;
}

}  // namespace cloudcast::detail
