#pragma once

#include <vector>

#include "mri/array.hpp"
#include "mri/calibration.hpp"
#include "mri/encoding.hpp"

namespace mri {

/// Gradient-descent settings for the least-squares unaliasing solve.
struct GdConfig {
  double alpha = 1.0;  // step size, must be in (0,2) for normalized maps
  int max_iter = 100;
  double tol = 0.0;  // stop when the relative cost decrease falls below this
};

/// One least-squares gradient step m - alpha * A^H(A m - d). When cost_out
/// is non-null it receives ||A m - d||^2 at the input m. Shared by the
/// plain and sparsity-regularized solvers so their trajectories coincide
/// exactly when the regularization weight is zero.
ComplexImage grad_step(const ComplexImage& m, const KSpaceData& d,
                       const ImagingModel& model, double alpha,
                       double* cost_out = nullptr);

struct GdResult {
  ComplexImage image;
  std::vector<double> cost_history;  // ||d - A m_t||^2 for t = 0..T
};

/// Gradient descent on ||d - A m||^2 from m_0 = 0. Requires normalized maps
/// (spectral norm of A is then at most 1, making alpha <= 1 monotone).
GdResult sense_gd(const KSpaceData& d, const ImagingModel& model, const GdConfig& cfg);

/// Least-squares solve via the minimum-residual normal-equation iteration.
SolveResult sense_cg(const KSpaceData& d, const ImagingModel& model, int max_iter = 200,
                     double tol = 1e-9);

/// Fills every missing k-space sample as a kernel-weighted combination of
/// acquired neighbors; acquired samples pass through bit-exactly.
KSpaceData grappa_apply(const KSpaceData& d_us, const SamplingMask& mask,
                        const GrappaKernel& kernel);

/// Pixelwise sqrt(sum_c |x_c|^2).
RealArray rss_combine(const CxArray& coil_images);

}  // namespace mri
