#pragma once

#include <string>
#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"

namespace mri {

/// Orthonormal multilevel 2-d Haar analysis of the trailing [ny,nx] axes.
/// Coefficients use the standard quadrant layout: the level-L approximation
/// block sits in the top-left (ny/2^L, nx/2^L) corner, detail bands around
/// it. Requires both trailing axes divisible by 2^levels.
CxArray haar2_forward(const CxArray& x, int levels);
CxArray haar2_inverse(const CxArray& coeffs, int levels);

/// Complex magnitude shrinkage: 0 where |x| <= tau, else x*(1 - tau/|x|).
CxArray soft_threshold(const CxArray& x, double tau);

/// sum |x_i| over all elements.
double l1_norm(const CxArray& x);

struct PicsConfig {
  double lambda = 1e-3;  // l1 weight, > 0 (0 degenerates to least squares)
  double alpha = 1.0;    // step size
  int max_iter = 200;
  double tol = 0.0;               // stop on relative objective decrease below tol
  std::string variant = "fista";  // subgradient | ista | fista
  int levels = 3;                 // wavelet decomposition depth
};

struct PicsResult {
  ComplexImage image;
  std::vector<double> cost_history;  // 0.5||d-Am||^2 + lambda*||Phi m||_1 per iterate
};

/// Objective 0.5*||d - A m||^2 + lambda*||Phi m||_1 (the gradient-step
/// scaling convention, under which alpha <= 1 descent holds for ista).
double pics_objective(const ComplexImage& m, const KSpaceData& d, const ImagingModel& model,
                      double lambda, int levels);

/// Subgradient descent exactly as printed:
///   m_{t+1} = m_t - alpha*A^H(A m_t - d) - alpha*lambda*Phi^H sign(Phi m_t)
/// with sign(0) = 0. With lambda = 0 the trajectory is bit-identical to
/// sense_gd at the same step size.
PicsResult pics_subgradient(const KSpaceData& d, const ImagingModel& model,
                            const PicsConfig& cfg);

/// Proximal-gradient variant (ista) with optional momentum (fista):
///   m_{t+1} = Phi^H ST(Phi(m_t - alpha*A^H(A m_t - d)), alpha*lambda).
PicsResult pics_ista(const KSpaceData& d, const ImagingModel& model, const PicsConfig& cfg);

}  // namespace mri
