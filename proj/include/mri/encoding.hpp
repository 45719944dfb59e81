#pragma once

#include <optional>
#include <vector>

#include "mri/array.hpp"
#include "mri/core.hpp"
#include "mri/fft.hpp"

namespace mri {

/// Per-coil complex sensitivity profiles, [nc, ny, nx].
struct CoilMaps {
  CxArray data;
  bool normalized = false;

  CoilMaps() = default;
  CoilMaps(CxArray d, bool norm) : data(std::move(d)), normalized(norm) {
    if (data.ndim() != 3)
      throw DimensionError("CoilMaps: expected [nc,ny,nx], got " + data.shape_str());
    if (norm) check_normalized();
  }

  int nc() const { return data.shape(0); }
  int ny() const { return data.ny(); }
  int nx() const { return data.nx(); }

  /// Verifies sum_c |c(r)|^2 = 1 (to 1e-10) at every pixel with any nonzero
  /// sensitivity.
  void check_normalized() const;
};

/// Binary k-space sampling pattern with its declared acceleration and the
/// number of fully-sampled center lines. Shape [ny, nx] or echo-resolved
/// [ne, ny, nx]. kx is always fully sampled along acquired lines by the
/// generators, but the type accepts arbitrary binary patterns.
struct SamplingMask {
  ByteArray data;
  int accel = 1;
  int acs_lines = 0;

  SamplingMask() = default;
  SamplingMask(ByteArray d, int r, int acs) : data(std::move(d)), accel(r), acs_lines(acs) {
    validate();
  }

  /// Builds a mask from raw binary data, declaring the acceleration as the
  /// rounded inverse sampled fraction (used for derived masks such as
  /// train/validation splits).
  static SamplingMask from_data(ByteArray d, int acs = 0);

  int ny() const { return data.ny(); }
  int nx() const { return data.nx(); }
  bool multi_echo() const { return data.ndim() == 3; }
  int ne() const { return multi_echo() ? data.shape(0) : 1; }

  std::size_t sampled_count() const;
  double sampled_fraction() const {
    return static_cast<double>(sampled_count()) / static_cast<double>(data.size());
  }
  bool line_sampled(int ky) const;  // 2-d masks: any sample on the line

  /// Mask as complex multiplier array (entries 0 or 1) for hadamard use.
  RealArray as_real() const;

  void validate() const;
};

/// Everything needed to apply the acquisition operator and its adjoint:
/// coil profiles, sampling pattern, and grid geometry.
struct ImagingModel {
  CoilMaps maps;
  SamplingMask mask;
  GridGeometry geometry;

  ImagingModel() = default;
  ImagingModel(CoilMaps m, SamplingMask p, GridGeometry g);

  int nc() const { return maps.nc(); }
  int ne() const { return mask.ne(); }
};

/// Forward acquisition: per coil c (and echo e when present)
///   out_c = mask .* fft2c(maps_c .* m).
/// m is [ny,nx] (-> out [nc,ny,nx]) or [ne,ny,nx] (-> out [nc,ne,ny,nx]);
/// a 2-d mask is shared across echoes, a 3-d mask is applied per echo.
KSpaceData apply_A(const ComplexImage& m, const ImagingModel& model);

/// Adjoint: sum_c conj(maps_c) .* ifft2c(mask .* d_c), per echo when present.
/// With missing samples zeroed this is the zero-filled baseline image.
ComplexImage apply_AH(const KSpaceData& d, const ImagingModel& model);

/// Result of an iterative linear solve.
struct SolveResult {
  CxArray x;
  int iterations = 0;
  std::vector<double> residual_history;  // relative residuals, entry 0 is the start
  bool converged = false;
};

/// Minimum-residual Krylov iteration for a Hermitian positive semidefinite
/// operator H: solves H x = b, guaranteeing a non-increasing residual norm at
/// every step (the conjugate-residual recurrence). With x0 omitted the solve
/// starts from zero and converges to the minimum-norm solution for
/// consistent systems.
template <typename ApplyH>
SolveResult solve_hermitian(const ApplyH& H, const CxArray& b, int max_iter, double tol,
                            const CxArray* x0 = nullptr) {
  if (max_iter < 1) throw ParameterError("solve_hermitian: max_iter must be >= 1");
  if (tol < 0.0) throw ParameterError("solve_hermitian: tol must be >= 0");
  SolveResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0 && x0 == nullptr) {
    res.x = CxArray::zeros(b.shape());
    res.residual_history = {0.0};
    res.converged = true;
    return res;
  }
  const double denom = bnorm > 0.0 ? bnorm : 1.0;

  CxArray x = x0 ? *x0 : CxArray::zeros(b.shape());
  CxArray r = b;
  if (x0) axpy(cx{-1.0, 0.0}, H(x), r);  // r = b - Hx0
  CxArray p = r;
  CxArray hr = H(r);
  CxArray hp = hr;
  double rho = inner_product(r, hr).real();

  res.residual_history.push_back(norm2(r) / denom);
  if (res.residual_history.back() <= tol) {
    res.x = std::move(x);
    res.converged = true;
    return res;
  }

  for (int it = 0; it < max_iter; ++it) {
    const double hp2 = inner_product(hp, hp).real();
    if (hp2 <= 0.0) break;  // stagnated (r in the null space), keep best iterate
    const double alpha = rho / hp2;
    axpy(cx{alpha, 0.0}, p, x);
    axpy(cx{-alpha, 0.0}, hp, r);
    res.iterations = it + 1;
    res.residual_history.push_back(norm2(r) / denom);
    if (res.residual_history.back() <= tol) {
      res.converged = true;
      break;
    }
    hr = H(r);
    const double rho_new = inner_product(r, hr).real();
    if (rho_new <= 0.0) break;  // residual left the range of H
    const double beta = rho_new / rho;
    rho = rho_new;
    // p = r + beta p; hp = hr + beta hp
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    for (std::size_t i = 0; i < hp.size(); ++i) hp[i] = hr[i] + beta * hp[i];
  }
  res.x = std::move(x);
  return res;
}

/// Regularized least-squares image solve:
///   minimize ||d - A m||^2 + lambda ||m - z||^2
/// via Krylov iteration on the normal equations
///   (A^H A + lambda I) m = A^H d + lambda z.
/// lambda = 0 gives the least-squares (pseudo-inverse) solution. A warm
/// start m0 may be supplied (used by proximal outer loops).
SolveResult cg_normal(const KSpaceData& d, const ImagingModel& model, double lambda,
                      const ComplexImage* z, int max_iter = 200, double tol = 1e-9,
                      const ComplexImage* m0 = nullptr);

}  // namespace mri
