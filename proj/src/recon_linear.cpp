#include "mri/recon_linear.hpp"

#include <cmath>

namespace mri {

ComplexImage grad_step(const ComplexImage& m, const KSpaceData& d,
                       const ImagingModel& model, double alpha, double* cost_out) {
  KSpaceData r = apply_A(m, model);
  if (!r.same_shape(d))
    throw DimensionError("grad_step: data " + d.shape_str() + " does not match the model");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= d[i];
  if (cost_out) {
    double c = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) c += std::norm(r[i]);
    *cost_out = c;
  }
  ComplexImage g = apply_AH(r, model);
  ComplexImage out = m;
  axpy(cx{-alpha, 0.0}, g, out);
  return out;
}

GdResult sense_gd(const KSpaceData& d, const ImagingModel& model, const GdConfig& cfg) {
  if (!model.maps.normalized)
    throw ParameterError("sense_gd: model requires normalized coil maps");
  if (cfg.alpha <= 0.0 || cfg.alpha >= 2.0)
    throw ParameterError("sense_gd: alpha must be in (0,2)");
  if (cfg.max_iter < 1) throw ParameterError("sense_gd: max_iter must be >= 1");

  GdResult res;
  res.image = ComplexImage::zeros(d.ndim() == 4
                                      ? std::vector<int>{d.shape(1), d.ny(), d.nx()}
                                      : std::vector<int>{d.ny(), d.nx()});
  bool stopped_early = false;
  for (int t = 0; t < cfg.max_iter; ++t) {
    double cost = 0.0;
    ComplexImage next = grad_step(res.image, d, model, cfg.alpha, &cost);
    res.cost_history.push_back(cost);  // f(m_t)
    if (res.cost_history.size() >= 2) {
      const double prev = res.cost_history[res.cost_history.size() - 2];
      if (prev - cost < cfg.tol * std::max(prev, 1e-300)) {
        stopped_early = true;  // history already ends at the returned iterate
        break;
      }
    }
    res.image = std::move(next);
  }
  if (!stopped_early) {
    KSpaceData r = apply_A(res.image, model);
    double cost = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) cost += std::norm(r[i] - d[i]);
    res.cost_history.push_back(cost);
  }
  return res;
}

SolveResult sense_cg(const KSpaceData& d, const ImagingModel& model, int max_iter,
                     double tol) {
  return cg_normal(d, model, 0.0, nullptr, max_iter, tol);
}

KSpaceData grappa_apply(const KSpaceData& d_us, const SamplingMask& mask,
                        const GrappaKernel& kernel) {
  if (d_us.ndim() != 3) throw DimensionError("grappa_apply: data must be [nc,ny,nx]");
  if (mask.multi_echo()) throw DimensionError("grappa_apply: needs a 2-d mask");
  if (d_us.ny() != mask.ny() || d_us.nx() != mask.nx())
    throw DimensionError("grappa_apply: data " + d_us.shape_str() + " does not match mask");
  const int nc = d_us.shape(0), ny = d_us.ny(), nx = d_us.nx();
  if (mask.accel != kernel.accel)
    throw ReconstructionError("grappa_apply: mask acceleration " +
                              std::to_string(mask.accel) + " does not match kernel (" +
                              std::to_string(kernel.accel) + ")");
  if (nc != kernel.nc)
    throw ReconstructionError("grappa_apply: coil count mismatch with kernel");
  if (kernel.accel == 1) return d_us;
  if (static_cast<int>(kernel.weights.size()) != kernel.accel - 1)
    throw ReconstructionError("grappa_apply: kernel is missing line-offset weights");

  std::vector<bool> sampled(ny);
  for (int y = 0; y < ny; ++y) sampled[y] = mask.line_sampled(y);

  // Uniform pattern check: every line on the acquired-line stride must be
  // present, and every missing line must sit at a fractional offset.
  for (int y = 0; y < ny; ++y) {
    if (y % kernel.accel == 0 && !sampled[y])
      throw ReconstructionError("grappa_apply: line " + std::to_string(y) +
                                " expected on the uniform R=" +
                                std::to_string(kernel.accel) + " grid but not sampled");
  }

  KSpaceData out = d_us;
  for (int t = 0; t < ny; ++t) {
    if (sampled[t]) continue;
    const int f = t % kernel.accel;
    const CxArray& w = kernel.weights[f - 1];
    for (int kx = 0; kx < nx; ++kx) {
      for (int j = 0; j < nc; ++j) {
        cx acc{0.0, 0.0};
        for (int c = 0; c < kernel.nc; ++c)
          for (int u = 0; u < kernel.nu; ++u) {
            const int sy = t + kernel.ky_offset(u, f);
            if (sy < 0 || sy >= ny) continue;  // virtual zero padding
            for (int v = 0; v < kernel.nv; ++v) {
              const int sx = kx + kernel.kx_offset(v);
              if (sx < 0 || sx >= nx) continue;
              acc += w.at(j, (c * kernel.nu + u) * kernel.nv + v) * d_us.at(c, sy, sx);
            }
          }
        out.at(j, t, kx) = acc;
      }
    }
  }
  return out;
}

RealArray rss_combine(const CxArray& coil_images) {
  if (coil_images.ndim() != 3)
    throw DimensionError("rss_combine: expected [nc,ny,nx], got " +
                         coil_images.shape_str());
  const int nc = coil_images.shape(0);
  const std::size_t px = static_cast<std::size_t>(coil_images.ny()) * coil_images.nx();
  RealArray out({coil_images.ny(), coil_images.nx()});
  for (std::size_t p = 0; p < px; ++p) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += std::norm(coil_images[static_cast<std::size_t>(c) * px + p]);
    out[p] = std::sqrt(s);
  }
  return out;
}

}  // namespace mri
