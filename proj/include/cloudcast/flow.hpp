#pragma once

#include <vector>

#include "cloudcast/image.hpp"

namespace cloudcast {

/// Dense displacement field in pixels per frame interval. A pixel at (x, y) in
/// the first frame is found at (x + u, y + v) in the second.
struct FlowField {
    FlowField() = default;
    FlowField(int width, int height) : u(width, height), v(width, height) {}
    FlowField(ScalarField u_, ScalarField v_);

    int width() const { return u.width(); }
    int height() const { return u.height(); }

    ScalarField u;
    ScalarField v;
};

/// Same layout as FlowField, in pixels per minute.
struct VelocityField {
    ScalarField u;
    ScalarField v;
};

enum class FlowMethod { horn_schunck, lucas_kanade, clg };

struct FlowParams {
    FlowMethod method = FlowMethod::clg;
    /// Smoothness weight of the global term (HS, CLG), in units of data_scale.
    double alpha = 15.0;
    /// Local integration scale of the structure tensor (LK, CLG). For CLG, 0
    /// disables tensor smoothing and the solver reduces to Horn-Schunck.
    double window_sigma = 4.0;
    /// Jacobi sweeps per solver call (HS, CLG).
    int iterations = 100;
    double pyramid_scale = 0.5;
    int pyramid_min_dim = 8;
    /// Upper bound on pyramid levels; 0 uses every level down to pyramid_min_dim.
    int pyramid_levels = 0;
    int warps_per_level = 3;
    /// LK: pixels whose smoothed tensor has smaller eigenvalue below this get zero flow.
    double lk_threshold = 1e-6;
    /// The data term is evaluated on the input channel multiplied by this factor,
    /// i.e. alpha is expressed in 8-bit grey-level units by default.
    double data_scale = 255.0;

    /// Throws InvalidInput naming the offending field.
    void validate() const;
};

/// Structure-tensor entries of the linearized data term
/// (Ix u + Iy v + It)^2 = [u v 1] J [u v 1]^T, optionally Gaussian-smoothed.
struct DataTensor {
    ScalarField j11, j12, j22, j13, j23, j33;
};

/// Builds J from the pair. Spatial derivatives come from (f1 + f2) / 2 and the
/// temporal one from f2 - f1. When `linearized_at` is given, f2 is assumed to
/// be already warped by that flow and the tensor is re-expressed in terms of
/// the total flow. window_sigma == 0 skips smoothing.
DataTensor build_data_tensor(const ScalarField& f1, const ScalarField& f2, double window_sigma,
                             const FlowField* linearized_at = nullptr);

/// Ix*u + Iy*v + It per pixel (left side of the optical-flow constraint).
ScalarField flow_residual(const ScalarField& f1, const ScalarField& f2, const FlowField& flow);

/// Discrete energy minimized by the Jacobi solvers:
///   sum_p [u v 1] J_p [u v 1]^T + (alpha^2 / 4) * sum_{4-neighbour edges} |w_p - w_q|^2.
/// The per-edge weight alpha^2/4 makes the replicate-border Jacobi update
/// u <- u_avg - Ix (Ix u_avg + Iy v_avg + It) / (alpha^2 + Ix^2 + Iy^2)
/// the exact block minimizer at interior pixels.
double flow_energy(const DataTensor& tensor, const FlowField& flow, double alpha);

/// Analytic gradient of flow_energy with respect to every u and v sample.
FlowField flow_energy_gradient(const DataTensor& tensor, const FlowField& flow, double alpha);

/// Runs `sweeps` Jacobi sweeps of the quadratic energy from `flow` (in place).
/// If `energy_trace` is non-null it receives the energy after each sweep.
void jacobi_solve(const DataTensor& tensor, double alpha, int sweeps, FlowField& flow,
                  std::vector<double>* energy_trace = nullptr);

/// Effective smoothness weight seen by the raw-channel data term.
double effective_alpha(const FlowParams& params);

/// Horn-Schunck: Jacobi sweeps on the unsmoothed data term. `initial` only seeds
/// the iteration (default zero); the data term is always linearized at zero flow.
FlowField horn_schunck(const ScalarField& f1, const ScalarField& f2, const FlowParams& params,
                       const FlowField* initial = nullptr,
                       std::vector<double>* energy_trace = nullptr);

FlowField lucas_kanade(const ScalarField& f1, const ScalarField& f2, const FlowParams& params);

/// Combined local-global: Horn-Schunck smoothness with the structure tensor
/// smoothed at params.window_sigma as data term.
FlowField clg_flow(const ScalarField& f1, const ScalarField& f2, const FlowParams& params,
                   const FlowField* initial = nullptr,
                   std::vector<double>* energy_trace = nullptr);

/// Coarse-to-fine estimation with iterative warping around the selected solver.
FlowField pyramid_flow(const ScalarField& f1, const ScalarField& f2, const FlowParams& params);

/// Samples `f` at (x + direction*u, y + direction*v) with clamped bilinear lookup.
/// direction = +1 aligns the second frame of a pair to the first.
ScalarField warp_field(const ScalarField& f, const FlowField& flow, double direction);

/// Upsamples a flow to a finer grid, rescaling each component by the size ratio of its axis.
FlowField upsample_flow(const FlowField& flow, int width, int height);

VelocityField to_velocity(const FlowField& flow, double frame_interval_minutes);

}  // namespace cloudcast
