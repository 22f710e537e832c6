// Compiled with -mavx2 (no FMA). Every vector expression mirrors the scalar
// kernels operation by operation; lanes that touch a border fall back to the
// shared scalar helpers.
#include <immintrin.h>

#include "kernels.hpp"

namespace cloudcast::detail {

namespace {

void ratio_avx2(const double* red, const double* blue, double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(red + i);
        const __m256d b = _mm256_loadu_pd(blue + i);
        const __m256d den = _mm256_add_pd(b, r);
        const __m256d q = _mm256_div_pd(_mm256_sub_pd(b, r), den);
        const __m256d is_zero = _mm256_cmp_pd(den, zero, _CMP_EQ_OQ);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(q, zero, is_zero));
    }
    for (; i < n; ++i) {
        const double den = blue[i] + red[i];
        out[i] = (den == 0.0) ? 0.0 : (blue[i] - red[i]) / den;
    }
}

inline double conv_row_pixel(const double* s, int x, int width, const double* taps, int radius) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * s[std::clamp(x + k, 0, width - 1)];
    }
    return acc;
}

void convolve_rows_avx2(const double* src, double* dst, int width, int height, const double* taps,
                        int radius) {
    for (int y = 0; y < height; ++y) {
        const double* s = src + static_cast<std::ptrdiff_t>(y) * width;
        double* d = dst + static_cast<std::ptrdiff_t>(y) * width;
        const int lo = std::min(radius, width);
        const int hi = width - radius;  // first x whose window crosses the right border
        int x = 0;
        for (; x < lo; ++x) d[x] = conv_row_pixel(s, x, width, taps, radius);
        for (; x + 4 <= hi; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int k = -radius; k <= radius; ++k) {
                const __m256d w = _mm256_set1_pd(taps[k + radius]);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(w, _mm256_loadu_pd(s + x + k)));
            }
            _mm256_storeu_pd(d + x, acc);
        }
        for (; x < width; ++x) d[x] = conv_row_pixel(s, x, width, taps, radius);
    }
}

void convolve_cols_avx2(const double* src, double* dst, int width, int height, const double* taps,
                        int radius) {
    for (int y = 0; y < height; ++y) {
        double* d = dst + static_cast<std::ptrdiff_t>(y) * width;
        int x = 0;
        for (; x + 4 <= width; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int k = -radius; k <= radius; ++k) {
                const int sy = std::clamp(y + k, 0, height - 1);
                const __m256d w = _mm256_set1_pd(taps[k + radius]);
                const __m256d s = _mm256_loadu_pd(src + static_cast<std::ptrdiff_t>(sy) * width + x);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(w, s));
            }
            _mm256_storeu_pd(d + x, acc);
        }
        for (; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sy = std::clamp(y + k, 0, height - 1);
                acc += taps[k + radius] * src[static_cast<std::ptrdiff_t>(sy) * width + x];
            }
            d[x] = acc;
        }
    }
}

inline void jacobi_pixel(const TensorPlanes& t, double alpha2, const double* u, const double* v,
                         double* u_out, double* v_out, int x, int width, std::ptrdiff_t row,
                         std::ptrdiff_t up, std::ptrdiff_t down) {
    const int xl = (x > 0) ? x - 1 : x;
    const int xr = (x < width - 1) ? x + 1 : x;
    const std::ptrdiff_t i = row + x;
    const double ub = neighbour_mean(u[row + xl], u[row + xr], u[up + x], u[down + x]);
    const double vb = neighbour_mean(v[row + xl], v[row + xr], v[up + x], v[down + x]);
    solve_flow_block(t.j11[i], t.j12[i], t.j22[i], t.j13[i], t.j23[i], alpha2, ub, vb, u_out[i],
                     v_out[i]);
}

inline __m256d neighbour_mean4(const double* p, std::ptrdiff_t i, std::ptrdiff_t up,
                               std::ptrdiff_t down, __m256d quarter) {
    const __m256d lr = _mm256_add_pd(_mm256_loadu_pd(p + i - 1), _mm256_loadu_pd(p + i + 1));
    const __m256d ud = _mm256_add_pd(_mm256_loadu_pd(p + up), _mm256_loadu_pd(p + down));
    return _mm256_mul_pd(_mm256_add_pd(lr, ud), quarter);
}

void jacobi_sweep_avx2(const TensorPlanes& t, double alpha2, const double* u, const double* v,
                       double* u_out, double* v_out, int width, int height) {
    const __m256d a2 = _mm256_set1_pd(alpha2);
    const __m256d quarter = _mm256_set1_pd(0.25);
    for (int y = 0; y < height; ++y) {
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(y) * width;
        const std::ptrdiff_t up = (y > 0) ? row - width : row;
        const std::ptrdiff_t down = (y < height - 1) ? row + width : row;

        jacobi_pixel(t, alpha2, u, v, u_out, v_out, 0, width, row, up, down);
        int x = 1;
        for (; x + 4 <= width - 1; x += 4) {
            const std::ptrdiff_t i = row + x;
            const __m256d ub = neighbour_mean4(u, i, up + x, down + x, quarter);
            const __m256d vb = neighbour_mean4(v, i, up + x, down + x, quarter);
            const __m256d j11 = _mm256_loadu_pd(t.j11 + i);
            const __m256d j12 = _mm256_loadu_pd(t.j12 + i);
            const __m256d j22 = _mm256_loadu_pd(t.j22 + i);
            const __m256d j13 = _mm256_loadu_pd(t.j13 + i);
            const __m256d j23 = _mm256_loadu_pd(t.j23 + i);

            const __m256d a11 = _mm256_add_pd(j11, a2);
            const __m256d a22 = _mm256_add_pd(j22, a2);
            const __m256d r1 = _mm256_sub_pd(_mm256_mul_pd(a2, ub), j13);
            const __m256d r2 = _mm256_sub_pd(_mm256_mul_pd(a2, vb), j23);
            const __m256d det = _mm256_sub_pd(_mm256_mul_pd(a11, a22), _mm256_mul_pd(j12, j12));
            const __m256d nu = _mm256_sub_pd(_mm256_mul_pd(a22, r1), _mm256_mul_pd(j12, r2));
            const __m256d nv = _mm256_sub_pd(_mm256_mul_pd(a11, r2), _mm256_mul_pd(j12, r1));
            _mm256_storeu_pd(u_out + i, _mm256_div_pd(nu, det));
            _mm256_storeu_pd(v_out + i, _mm256_div_pd(nv, det));
        }
        for (; x < width; ++x) jacobi_pixel(t, alpha2, u, v, u_out, v_out, x, width, row, up, down);
    }
}

void warp_plane_avx2(const double* src, const double* du, const double* dv, double direction,
                     double* dst, int width, int height) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d dir = _mm256_set1_pd(direction);
    const __m256d x_hi = _mm256_set1_pd(static_cast<double>(width - 1));
    const __m256d y_hi = _mm256_set1_pd(static_cast<double>(height - 1));
    const __m128i x_cap = _mm_set1_epi32(width - 2);
    const __m128i y_cap = _mm_set1_epi32(height - 2);
    const __m128i stride = _mm_set1_epi32(width);
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

    for (int y = 0; y < height; ++y) {
        const __m256d yv = _mm256_set1_pd(static_cast<double>(y));
        int x = 0;
        for (; x + 4 <= width; x += 4) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(y) * width + x;
            const __m256d xv = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(x)), lane);
            __m256d sx = _mm256_add_pd(xv, _mm256_mul_pd(dir, _mm256_loadu_pd(du + i)));
            __m256d sy = _mm256_add_pd(yv, _mm256_mul_pd(dir, _mm256_loadu_pd(dv + i)));
            sx = _mm256_min_pd(_mm256_max_pd(sx, zero), x_hi);
            sy = _mm256_min_pd(_mm256_max_pd(sy, zero), y_hi);

            const __m128i x0 = _mm_min_epi32(_mm256_cvttpd_epi32(_mm256_floor_pd(sx)), x_cap);
            const __m128i y0 = _mm_min_epi32(_mm256_cvttpd_epi32(_mm256_floor_pd(sy)), y_cap);
            const __m256d fx = _mm256_sub_pd(sx, _mm256_cvtepi32_pd(x0));
            const __m256d fy = _mm256_sub_pd(sy, _mm256_cvtepi32_pd(y0));
            const __m128i idx = _mm_add_epi32(_mm_mullo_epi32(y0, stride), x0);

            const __m256d p00 = _mm256_i32gather_pd(src, idx, 8);
            const __m256d p01 = _mm256_i32gather_pd(src + 1, idx, 8);
            const __m256d p10 = _mm256_i32gather_pd(src + width, idx, 8);
            const __m256d p11 = _mm256_i32gather_pd(src + width + 1, idx, 8);

            const __m256d gx = _mm256_sub_pd(one, fx);
            const __m256d top = _mm256_add_pd(_mm256_mul_pd(gx, p00), _mm256_mul_pd(fx, p01));
            const __m256d bottom = _mm256_add_pd(_mm256_mul_pd(gx, p10), _mm256_mul_pd(fx, p11));
            const __m256d out = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(one, fy), top),
                                              _mm256_mul_pd(fy, bottom));
            _mm256_storeu_pd(dst + i, out);
        }
        for (; x < width; ++x) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(y) * width + x;
            dst[i] = bilinear_at(src, width, height, static_cast<double>(x) + direction * du[i],
                                 static_cast<double>(y) + direction * dv[i]);
        }
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{"avx2",           ratio_avx2,        convolve_rows_avx2,
                                   convolve_cols_avx2, jacobi_sweep_avx2, warp_plane_avx2};
    return &table;
}

}  // namespace cloudcast::detail
