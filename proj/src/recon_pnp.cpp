#include "mri/recon_pnp.hpp"

#include "mri/recon_sparse.hpp"

namespace mri {

ComplexImage denoise_wavelet(const ComplexImage& x, double strength, int levels) {
  const CxArray w = haar2_forward(x, levels);
  CxArray shrunk = soft_threshold(w, strength);
  // Shrink detail bands only: the coarse approximation block carries the
  // overall intensity level, so thresholding it would bias every pixel (a
  // constant image must pass through unchanged).
  const int ny = x.ny(), nx = x.nx();
  const int ay = ny >> levels, ax = nx >> levels;
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  const std::size_t slices = x.size() / px;
  for (std::size_t s = 0; s < slices; ++s)
    for (int y = 0; y < ay; ++y)
      for (int xq = 0; xq < ax; ++xq) {
        const std::size_t i = s * px + static_cast<std::size_t>(y) * nx + xq;
        shrunk[i] = w[i];
      }
  return haar2_inverse(shrunk, levels);
}

ComplexImage denoise(const ComplexImage& x, const DenoiserSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DenoiserKind::identity:
      return x;
    case DenoiserKind::wavelet:
      return denoise_wavelet(x, spec.strength, spec.levels);
    case DenoiserKind::external: {
      ComplexImage out = spec.callable(x);
      if (!out.same_shape(x))
        throw ReconstructionError("denoise: external callable changed the image shape");
      return out;
    }
  }
  throw ParameterError("denoise: unknown denoiser kind");
}

namespace {

double pnp_objective(const KSpaceData& d, const ImagingModel& model, const ComplexImage& m,
                     const ComplexImage& z, double lambda) {
  KSpaceData r = apply_A(m, model);
  axpy(cx{-1.0, 0.0}, d, r);
  double obj = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) obj += std::norm(r[i]);
  for (std::size_t i = 0; i < m.size(); ++i) obj += lambda * std::norm(m[i] - z[i]);
  return obj;
}

}  // namespace

PnpResult pnp_recon(const KSpaceData& d, const ImagingModel& model, const DenoiserSpec& spec,
                    const PnpConfig& cfg) {
  spec.validate();
  cfg.validate();

  PnpResult res;
  res.image = apply_AH(d, model);
  res.history.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int i = 0; i < cfg.iterations; ++i) {
    ComplexImage z = denoise(res.image, spec);
    SolveResult solve =
        cg_normal(d, model, cfg.lambda, &z, cfg.dc_inner_iter, cfg.dc_tol, &z);

    PnpIterInfo info;
    info.objective_at_z = pnp_objective(d, model, z, z, cfg.lambda);
    info.objective_after = pnp_objective(d, model, solve.x, z, cfg.lambda);
    info.dc_residual_rel = solve.residual_history.back();
    info.dc_converged = solve.converged;
    {
      KSpaceData r = apply_A(solve.x, model);
      axpy(cx{-1.0, 0.0}, d, r);
      info.data_residual = norm2(r);
    }
    res.history.push_back(info);
    res.image = std::move(solve.x);
  }
  return res;
}

}  // namespace mri
