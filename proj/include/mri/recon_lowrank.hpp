#pragma once

#include <utility>
#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"

namespace mri {

/// Structured low-rank completion settings. Exactly one of rank_ell (hard
/// rank projection) or tau (singular-value soft threshold) must be set.
struct HankelConfig {
  int radius = 2;     // neighborhood half-width; patch is (2r+1)^2
  int rank_ell = 0;   // > 0 selects hard rank projection
  double tau = 0.0;   // > 0 selects singular-value thresholding
  int max_iter = 100;
  double tol = 1e-7;  // stop on relative k-space change below tol

  void validate() const;
};

/// Sliding-window patch matrix lifted from multi-coil k-space.
struct LiftedMatrix {
  CxArray matrix;         // [n_windows, nc*(2r+1)^2]
  RealArray multiplicity; // [ny, nx] window cover counts, >= 1 everywhere
  int radius = 0;
  int nc = 0;
  int ny = 0;
  int nx = 0;
};

/// Rows are vectorized (coil x patch) windows centered on every interior
/// position; column layout (c*(2r+1) + dy)*(2r+1) + dx. Linear in d.
LiftedMatrix hankel_build(const KSpaceData& d, int radius);

/// Adjoint of hankel_build: scatter-adds matrix entries back onto the grid.
KSpaceData hankel_adjoint(const LiftedMatrix& m);

/// hankel_adjoint divided by the window multiplicity; inverts hankel_build
/// exactly on matrices with consistent windows.
KSpaceData unlift_average(const LiftedMatrix& m);

/// Best rank-ell approximation by truncated SVD; second member of the pair
/// is the squared Frobenius residual sum_{i>ell} sigma_i^2.
std::pair<CxArray, double> rank_project(const CxArray& m, int ell);

/// Soft-thresholds the singular values by tau, keeping singular vectors.
CxArray svt(const CxArray& m, double tau);

/// Alternating projection between the low-rank lifted set and the acquired
/// data: lift -> spectral shrink -> unlift-average -> overwrite acquired
/// entries with the measurements (bit-exactly). Returns completed k-space.
KSpaceData lowrank_complete(const KSpaceData& d_us, const SamplingMask& mask,
                            const HankelConfig& cfg, std::vector<double>* change_history = nullptr);

/// Root-sum-of-squares image of the per-coil inverse transforms of the
/// completed k-space (zero phase, real values in a complex container).
ComplexImage lowrank_recon(const KSpaceData& d_us, const SamplingMask& mask,
                           const HankelConfig& cfg);

}  // namespace mri
