#pragma once

#include <functional>
#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"

namespace mri {

enum class DenoiserKind { identity, wavelet, external };

/// A pluggable image denoiser slotted into the proximal iteration. The
/// external kind calls a user-provided procedure with the same contract
/// (image in, image of the same shape out).
struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::wavelet;
  double strength = 0.0;  // soft-threshold level for the wavelet kind
  int levels = 3;         // wavelet decomposition depth
  std::function<ComplexImage(const ComplexImage&)> callable;  // external kind

  void validate() const {
    if (strength < 0.0) throw ParameterError("DenoiserSpec: strength must be >= 0");
    if (levels < 1) throw ParameterError("DenoiserSpec: levels must be >= 1");
    if (kind == DenoiserKind::external && !callable)
      throw ParameterError("DenoiserSpec: external kind requires a callable");
  }
};

struct PnpConfig {
  double lambda = 1.0;     // coupling weight between prior and data terms
  int iterations = 10;     // outer denoise / data-consistency alternations
  int dc_inner_iter = 20;  // Krylov steps per data-consistency solve
  double dc_tol = 1e-9;    // relative residual target of each solve

  void validate() const {
    if (lambda <= 0.0) throw ParameterError("PnpConfig: lambda must be > 0");
    if (iterations < 1) throw ParameterError("PnpConfig: iterations must be >= 1");
    if (dc_inner_iter < 1) throw ParameterError("PnpConfig: dc_inner_iter must be >= 1");
    if (dc_tol < 0.0) throw ParameterError("PnpConfig: dc_tol must be >= 0");
  }
};

/// Per-iteration record of the alternation. objective(m) is
/// ||d - A m||^2 + lambda ||m - z||^2 for that iteration's denoiser output z;
/// the solve may not worsen it relative to its start at z.
struct PnpIterInfo {
  double objective_at_z = 0.0;     // objective evaluated at m = z
  double objective_after = 0.0;    // objective at the returned iterate
  double data_residual = 0.0;      // ||d - A m|| after the solve
  double dc_residual_rel = 0.0;    // final relative residual of the solve
  bool dc_converged = false;
};

struct PnpResult {
  ComplexImage image;
  std::vector<PnpIterInfo> history;
};

/// Applies the denoiser selected by spec to x.
ComplexImage denoise(const ComplexImage& x, const DenoiserSpec& spec);

/// Orthonormal-wavelet shrinkage: forward Haar transform, soft-threshold the
/// detail coefficients by strength (the coarse approximation block passes
/// through), inverse transform. Non-expansive in energy; constant images are
/// unchanged.
ComplexImage denoise_wavelet(const ComplexImage& x, double strength, int levels = 3);

/// Plug-and-play alternation: starting from the zero-filled adjoint image,
/// repeat z = denoise(m); m = argmin ||d - A m||^2 + lambda ||m - z||^2,
/// the inner solve warm-started at z. A non-converged inner solve is flagged
/// in the history and the best iterate is kept.
PnpResult pnp_recon(const KSpaceData& d, const ImagingModel& model,
                    const DenoiserSpec& spec, const PnpConfig& cfg);

}  // namespace mri
