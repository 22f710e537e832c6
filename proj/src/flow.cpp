#include "cloudcast/flow.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cloudcast/error.hpp"
#include "cloudcast/image_ops.hpp"
#include "kernels/kernels.hpp"

namespace cloudcast {

namespace {

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what) {
    if (!a.same_shape(b)) {
        throw InvalidInput(std::string(what) + ": frame sizes differ (" +
                           std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                           std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
    }
}

ScalarField average(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.width(), a.height());
    auto o = out.data();
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5 * (x[i] + y[i]);
    return out;
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.width(), a.height());
    auto o = out.data();
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
    return out;
}

// Jacobi refinement of the total flow around `flow`, with f2 already warped by it.
void refine_global(const ScalarField& f1, const ScalarField& f2_warped, double window_sigma,
                   const FlowParams& params, FlowField& flow) {
    const DataTensor tensor = build_data_tensor(f1, f2_warped, window_sigma, &flow);
    jacobi_solve(tensor, effective_alpha(params), params.iterations, flow);
}

void add_in_place(ScalarField& acc, const ScalarField& inc) {
    auto a = acc.data();
    auto b = inc.data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace

FlowField::FlowField(ScalarField u_, ScalarField v_) : u(std::move(u_)), v(std::move(v_)) {
    if (!u.same_shape(v)) throw InvalidInput("flow components differ in size");
}

void FlowParams::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidInput("flow parameter " + msg); };
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be > 0");
    if (!(window_sigma >= 0.0) || !std::isfinite(window_sigma)) fail("window_sigma must be >= 0");
    if (method == FlowMethod::lucas_kanade && !(window_sigma > 0.0)) {
        fail("window_sigma must be > 0 for Lucas-Kanade");
    }
    if (iterations < 1) fail("iterations must be >= 1");
    if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) fail("pyramid_scale must lie in (0, 1)");
    if (pyramid_min_dim < 8) fail("pyramid_min_dim must be >= 8");
    if (pyramid_levels < 0) fail("pyramid_levels must be >= 0");
    if (warps_per_level < 1) fail("warps_per_level must be >= 1");
    if (!(lk_threshold >= 0.0)) fail("lk_threshold must be >= 0");
    if (!(data_scale > 0.0) || !std::isfinite(data_scale)) fail("data_scale must be > 0");
}

double effective_alpha(const FlowParams& params) { return params.alpha / params.data_scale; }

DataTensor build_data_tensor(const ScalarField& f1, const ScalarField& f2, double window_sigma,
                             const FlowField* linearized_at) {
    require_same_shape(f1, f2, "data tensor");
    if (!(window_sigma >= 0.0)) throw InvalidInput("window_sigma must be >= 0");
    const Gradients g = spatial_gradients(average(f1, f2));
    ScalarField it = temporal_gradient(f1, f2);
    if (linearized_at) {
        require_same_shape(f1, linearized_at->u, "data tensor");
        auto t = it.data();
        auto ix = g.dx.data();
        auto iy = g.dy.data();
        auto u = linearized_at->u.data();
        auto v = linearized_at->v.data();
        for (std::size_t i = 0; i < t.size(); ++i) t[i] -= ix[i] * u[i] + iy[i] * v[i];
    }
    DataTensor j{product(g.dx, g.dx), product(g.dx, g.dy), product(g.dy, g.dy),
                 product(g.dx, it),   product(g.dy, it),   product(it, it)};
    if (window_sigma > 0.0) {
        for (ScalarField* f : {&j.j11, &j.j12, &j.j22, &j.j13, &j.j23, &j.j33}) {
            *f = gaussian_blur(*f, window_sigma);
        }
    }
    return j;
}

ScalarField flow_residual(const ScalarField& f1, const ScalarField& f2, const FlowField& flow) {
    require_same_shape(f1, f2, "flow residual");
    require_same_shape(f1, flow.u, "flow residual");
    const Gradients g = spatial_gradients(average(f1, f2));
    const ScalarField it = temporal_gradient(f1, f2);
    ScalarField out(f1.width(), f1.height());
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = g.dx.data()[i] * flow.u.data()[i] + g.dy.data()[i] * flow.v.data()[i] +
               it.data()[i];
    }
    return out;
}

double flow_energy(const DataTensor& t, const FlowField& flow, double alpha) {
    const int w = flow.width();
    const int h = flow.height();
    double data = 0.0;
    for (std::size_t i = 0; i < flow.u.size(); ++i) {
        const double u = flow.u.data()[i];
        const double v = flow.v.data()[i];
        data += t.j11.data()[i] * u * u + 2.0 * t.j12.data()[i] * u * v +
                t.j22.data()[i] * v * v + 2.0 * t.j13.data()[i] * u +
                2.0 * t.j23.data()[i] * v + t.j33.data()[i];
    }
    double smooth = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) {
                const double du = flow.u(x + 1, y) - flow.u(x, y);
                const double dv = flow.v(x + 1, y) - flow.v(x, y);
                smooth += du * du + dv * dv;
            }
            if (y + 1 < h) {
                const double du = flow.u(x, y + 1) - flow.u(x, y);
                const double dv = flow.v(x, y + 1) - flow.v(x, y);
                smooth += du * du + dv * dv;
            }
        }
    }
    return data + 0.25 * alpha * alpha * smooth;
}

FlowField flow_energy_gradient(const DataTensor& t, const FlowField& flow, double alpha) {
    const int w = flow.width();
    const int h = flow.height();
    FlowField grad(w, h);
    const double k = 0.5 * alpha * alpha;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = flow.u(x, y);
            const double v = flow.v(x, y);
            double lap_u = 0.0;
            double lap_v = 0.0;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int n = 0; n < 4; ++n) {
                if (nx[n] < 0 || nx[n] >= w || ny[n] < 0 || ny[n] >= h) continue;
                lap_u += u - flow.u(nx[n], ny[n]);
                lap_v += v - flow.v(nx[n], ny[n]);
            }
            grad.u(x, y) = 2.0 * (t.j11(x, y) * u + t.j12(x, y) * v + t.j13(x, y)) + k * lap_u;
            grad.v(x, y) = 2.0 * (t.j12(x, y) * u + t.j22(x, y) * v + t.j23(x, y)) + k * lap_v;
        }
    }
    return grad;
}

void jacobi_solve(const DataTensor& t, double alpha, int sweeps, FlowField& flow,
                  std::vector<double>* energy_trace) {
    require_same_shape(t.j11, flow.u, "jacobi solve");
    const auto& kernels = detail::active_kernels();
    const detail::TensorPlanes planes{t.j11.data().data(), t.j12.data().data(),
                                      t.j22.data().data(), t.j13.data().data(),
                                      t.j23.data().data()};
    const double alpha2 = alpha * alpha;
    FlowField next(flow.width(), flow.height());
    for (int s = 0; s < sweeps; ++s) {
        kernels.jacobi_sweep(planes, alpha2, flow.u.data().data(), flow.v.data().data(),
                             next.u.data().data(), next.v.data().data(), flow.width(),
                             flow.height());
        std::swap(flow, next);
        if (energy_trace) energy_trace->push_back(flow_energy(t, flow, alpha));
    }
}

FlowField horn_schunck(const ScalarField& f1, const ScalarField& f2, const FlowParams& params,
                       const FlowField* initial, std::vector<double>* energy_trace) {
    params.validate();
    require_same_shape(f1, f2, "horn_schunck");
    const DataTensor tensor = build_data_tensor(f1, f2, 0.0);
    FlowField flow = initial ? *initial : FlowField(f1.width(), f1.height());
    require_same_shape(f1, flow.u, "horn_schunck initial flow");
    jacobi_solve(tensor, effective_alpha(params), params.iterations, flow, energy_trace);
    return flow;
}

FlowField clg_flow(const ScalarField& f1, const ScalarField& f2, const FlowParams& params,
                   const FlowField* initial, std::vector<double>* energy_trace) {
    params.validate();
    require_same_shape(f1, f2, "clg_flow");
    const DataTensor tensor = build_data_tensor(f1, f2, params.window_sigma);
    FlowField flow = initial ? *initial : FlowField(f1.width(), f1.height());
    require_same_shape(f1, flow.u, "clg_flow initial flow");
    jacobi_solve(tensor, effective_alpha(params), params.iterations, flow, energy_trace);
    return flow;
}

FlowField lucas_kanade(const ScalarField& f1, const ScalarField& f2, const FlowParams& params) {
    params.validate();
    require_same_shape(f1, f2, "lucas_kanade");
    if (!(params.window_sigma > 0.0)) throw InvalidInput("lucas_kanade needs window_sigma > 0");
    const DataTensor t = build_data_tensor(f1, f2, params.window_sigma);
    FlowField flow(f1.width(), f1.height());
    for (std::size_t i = 0; i < flow.u.size(); ++i) {
        const double a = t.j11.data()[i];
        const double b = t.j12.data()[i];
        const double c = t.j22.data()[i];
        const double min_eig = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4.0 * b * b));
        if (!(min_eig >= params.lk_threshold) || min_eig <= 0.0) continue;
        const double det = a * c - b * b;
        const double r1 = -t.j13.data()[i];
        const double r2 = -t.j23.data()[i];
        flow.u.data()[i] = (c * r1 - b * r2) / det;
        flow.v.data()[i] = (a * r2 - b * r1) / det;
    }
    return flow;
}

ScalarField warp_field(const ScalarField& f, const FlowField& flow, double direction) {
    require_same_shape(f, flow.u, "warp");
    ScalarField out(f.width(), f.height());
    detail::active_kernels().warp_plane(f.data().data(), flow.u.data().data(),
                                        flow.v.data().data(), direction, out.data().data(),
                                        f.width(), f.height());
    return out;
}

FlowField upsample_flow(const FlowField& flow, int width, int height) {
    FlowField out(resize_bilinear(flow.u, width, height), resize_bilinear(flow.v, width, height));
    const double sx = static_cast<double>(width) / flow.width();
    const double sy = static_cast<double>(height) / flow.height();
    for (double& s : out.u.data()) s *= sx;
    for (double& s : out.v.data()) s *= sy;
    return out;
}

FlowField pyramid_flow(const ScalarField& f1, const ScalarField& f2, const FlowParams& params) {
    params.validate();
    require_same_shape(f1, f2, "pyramid_flow");
    Pyramid p1 = build_pyramid(f1, params.pyramid_scale, params.pyramid_min_dim);
    Pyramid p2 = build_pyramid(f2, params.pyramid_scale, params.pyramid_min_dim);
    if (params.pyramid_levels > 0 &&
        p1.levels.size() > static_cast<std::size_t>(params.pyramid_levels)) {
        p1.levels.resize(params.pyramid_levels);
        p2.levels.resize(params.pyramid_levels);
    }

    const int coarsest = static_cast<int>(p1.levels.size()) - 1;
    FlowField flow(p1.levels[coarsest].width(), p1.levels[coarsest].height());
    for (int level = coarsest; level >= 0; --level) {
        const ScalarField& a = p1.levels[level];
        const ScalarField& b = p2.levels[level];
        if (level != coarsest) flow = upsample_flow(flow, a.width(), a.height());
        for (int w = 0; w < params.warps_per_level; ++w) {
            const ScalarField b_warped = warp_field(b, flow, +1.0);
            switch (params.method) {
                case FlowMethod::lucas_kanade: {
                    const FlowField inc = lucas_kanade(a, b_warped, params);
                    add_in_place(flow.u, inc.u);
                    add_in_place(flow.v, inc.v);
                    break;
                }
                case FlowMethod::horn_schunck:
                    refine_global(a, b_warped, 0.0, params, flow);
                    break;
                case FlowMethod::clg:
                    refine_global(a, b_warped, params.window_sigma, params, flow);
                    break;
            }
        }
    }
    return flow;
}

VelocityField to_velocity(const FlowField& flow, double frame_interval_minutes) {
    if (!(frame_interval_minutes > 0.0) || !std::isfinite(frame_interval_minutes)) {
        throw InvalidInput("frame interval must be > 0 minutes");
    }
    VelocityField vel{flow.u, flow.v};
    for (double& s : vel.u.data()) s /= frame_interval_minutes;
    for (double& s : vel.v.data()) s /= frame_interval_minutes;
    return vel;
}

}  // namespace cloudcast
