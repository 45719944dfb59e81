#pragma once

#include "mri/array.hpp"
#include "mri/encoding.hpp"
#include "mri/signal_models.hpp"

namespace mri {

/// Per-pixel temporal mixing: echo images from coefficient maps,
///   x_e(r) = sum_k basis[e,k] * s_k(r).      [K,ny,nx] -> [ne,ny,nx]
ComplexImage synth_from_coeffs(const SubspaceBasis& basis, const CxArray& s);

/// Adjoint mixing: s_k(r) = sum_e basis[e,k] * x_e(r). [ne,ny,nx] -> [K,ny,nx]
CxArray coeff_adjoint(const SubspaceBasis& basis, const ComplexImage& x);

struct SubspaceResult {
  CxArray coeffs;  // [K, ny, nx]
  SolveResult solve;
};

/// Solves min_s ||d - A Gamma s||^2 + lambda ||s||^2 over coefficient maps
/// by the minimum-residual normal-equation iteration on the composite
/// operator. The model's mask may be per-echo ([ne,ny,nx]) or shared.
SubspaceResult subspace_recon(const KSpaceData& d, const ImagingModel& model,
                              const SubspaceBasis& basis, double lambda,
                              int max_iter = 200, double tol = 1e-9);

/// Per-pixel best-correlation dictionary lookup on echo series [ne,ny,nx]:
/// returns the T2 of the atom maximizing |<atom, signal>|; pixels with
/// ||signal|| < 1e-6 * max are set to 0.
RealArray t2_match(const ComplexImage& echo_signals, const Dictionary& dict);

}  // namespace mri
