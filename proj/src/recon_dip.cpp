#include "mri/recon_dip.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mri/core.hpp"

namespace mri {

namespace {

constexpr int kK = DipNetwork::kK;

// Reflected neighbor-row/column tables for pad-1 3x3 convolution:
// rm[i] = reflect(i-1), rp[i] = reflect(i+1) with reflect(-1)=1,
// reflect(n)=n-2 (edge excluded, matching mirror-without-repeat padding).
std::vector<int> make_rm(int n) {
  std::vector<int> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = i == 0 ? 1 : i - 1;
  return t;
}
std::vector<int> make_rp(int n) {
  std::vector<int> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = i == n - 1 ? n - 2 : i + 1;
  return t;
}

/// y[oc] = b[oc] + sum_ic x[ic] * k[oc,ic]  (3x3, reflect pad).
void conv3x3_forward(const double* x, int cin, const double* w, const double* b,
                     double* y, int cout, int ny, int nx, const std::vector<int>& rm,
                     const std::vector<int>& rp) {
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  for (int oc = 0; oc < cout; ++oc) {
    double* yo = y + static_cast<std::size_t>(oc) * px;
    std::fill(yo, yo + px, b[oc]);
    for (int ic = 0; ic < cin; ++ic) {
      const double* xi = x + static_cast<std::size_t>(ic) * px;
      const double* k = w + static_cast<std::size_t>(oc * cin + ic) * kK * kK;
      const double k0 = k[0], k1 = k[1], k2 = k[2];
      const double k3 = k[3], k4 = k[4], k5 = k[5];
      const double k6 = k[6], k7 = k[7], k8 = k[8];
      for (int iy = 0; iy < ny; ++iy) {
        const double* r0 = xi + static_cast<std::size_t>(rm[static_cast<std::size_t>(iy)]) * nx;
        const double* r1 = xi + static_cast<std::size_t>(iy) * nx;
        const double* r2 = xi + static_cast<std::size_t>(rp[static_cast<std::size_t>(iy)]) * nx;
        double* yr = yo + static_cast<std::size_t>(iy) * nx;
        // left border (column -1 reflects to 1)
        yr[0] += k0 * r0[1] + k1 * r0[0] + k2 * r0[1] + k3 * r1[1] + k4 * r1[0] +
                 k5 * r1[1] + k6 * r2[1] + k7 * r2[0] + k8 * r2[1];
        for (int ix = 1; ix < nx - 1; ++ix) {
          yr[ix] += k0 * r0[ix - 1] + k1 * r0[ix] + k2 * r0[ix + 1] + k3 * r1[ix - 1] +
                    k4 * r1[ix] + k5 * r1[ix + 1] + k6 * r2[ix - 1] + k7 * r2[ix] +
                    k8 * r2[ix + 1];
        }
        // right border (column nx reflects to nx-2)
        const int e = nx - 1;
        yr[e] += k0 * r0[e - 1] + k1 * r0[e] + k2 * r0[e - 1] + k3 * r1[e - 1] +
                 k4 * r1[e] + k5 * r1[e - 1] + k6 * r2[e - 1] + k7 * r2[e] + k8 * r2[e - 1];
      }
    }
  }
}

/// Reverse pass of conv3x3_forward: accumulates weight/bias gradients and
/// (optionally) the gradient w.r.t. the input, which is the exact adjoint of
/// the reflect-padded gather (scatter-add at the reflected taps).
void conv3x3_backward(const double* x, int cin, const double* w, const double* gy,
                      int cout, int ny, int nx, const std::vector<int>& rm,
                      const std::vector<int>& rp, double* gw, double* gb, double* gx) {
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  if (gx) std::memset(gx, 0, sizeof(double) * px * static_cast<std::size_t>(cin));
  for (int oc = 0; oc < cout; ++oc) {
    const double* go = gy + static_cast<std::size_t>(oc) * px;
    double bacc = 0.0;
    for (std::size_t p = 0; p < px; ++p) bacc += go[p];
    gb[oc] += bacc;
    for (int ic = 0; ic < cin; ++ic) {
      const double* xi = x + static_cast<std::size_t>(ic) * px;
      const double* k = w + static_cast<std::size_t>(oc * cin + ic) * kK * kK;
      double* gk = gw + static_cast<std::size_t>(oc * cin + ic) * kK * kK;
      double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0, a8 = 0;
      double* gxi = gx ? gx + static_cast<std::size_t>(ic) * px : nullptr;
      for (int iy = 0; iy < ny; ++iy) {
        const std::size_t off_m = static_cast<std::size_t>(rm[static_cast<std::size_t>(iy)]) * nx;
        const std::size_t off_0 = static_cast<std::size_t>(iy) * nx;
        const std::size_t off_p = static_cast<std::size_t>(rp[static_cast<std::size_t>(iy)]) * nx;
        const double* r0 = xi + off_m;
        const double* r1 = xi + off_0;
        const double* r2 = xi + off_p;
        const double* gr = go + off_0;
        for (int ix = 0; ix < nx; ++ix) {
          const int xm = ix == 0 ? 1 : ix - 1;
          const int xp = ix == nx - 1 ? nx - 2 : ix + 1;
          const double g = gr[ix];
          a0 += g * r0[xm]; a1 += g * r0[ix]; a2 += g * r0[xp];
          a3 += g * r1[xm]; a4 += g * r1[ix]; a5 += g * r1[xp];
          a6 += g * r2[xm]; a7 += g * r2[ix]; a8 += g * r2[xp];
          if (gxi) {
            double* gm = gxi + off_m;
            double* g0 = gxi + off_0;
            double* gp = gxi + off_p;
            gm[xm] += k[0] * g; gm[ix] += k[1] * g; gm[xp] += k[2] * g;
            g0[xm] += k[3] * g; g0[ix] += k[4] * g; g0[xp] += k[5] * g;
            gp[xm] += k[6] * g; gp[ix] += k[7] * g; gp[xp] += k[8] * g;
          }
        }
      }
      gk[0] += a0; gk[1] += a1; gk[2] += a2; gk[3] += a3; gk[4] += a4;
      gk[5] += a5; gk[6] += a6; gk[7] += a7; gk[8] += a8;
    }
  }
}

struct ForwardCache {
  RealArray pre1, act1, pre2, act2, out;
};

void relu_into(const RealArray& pre, RealArray& act) {
  act = RealArray(pre.shape());
  for (std::size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
}

void forward_cached(const DipNetwork& net, const NoiseSeed& noise, ForwardCache& c) {
  const int ny = net.ny, nx = net.nx;
  if (noise.z.ndim() != 3 || noise.z.shape(0) != DipNetwork::kInCh ||
      noise.z.ny() != ny || noise.z.nx() != nx)
    throw DimensionError("dip_forward: noise shape does not match the network grid");
  const auto rm_y = make_rm(ny), rp_y = make_rp(ny);
  const double* th = net.theta.data();
  c.pre1 = RealArray({DipNetwork::kMidCh, ny, nx});
  conv3x3_forward(noise.z.data(), DipNetwork::kInCh, th + DipNetwork::oW1,
                  th + DipNetwork::oB1, c.pre1.data(), DipNetwork::kMidCh, ny, nx, rm_y,
                  rp_y);
  relu_into(c.pre1, c.act1);
  c.pre2 = RealArray({DipNetwork::kMidCh, ny, nx});
  conv3x3_forward(c.act1.data(), DipNetwork::kMidCh, th + DipNetwork::oW2,
                  th + DipNetwork::oB2, c.pre2.data(), DipNetwork::kMidCh, ny, nx, rm_y,
                  rp_y);
  relu_into(c.pre2, c.act2);
  c.out = RealArray({DipNetwork::kOutCh, ny, nx});
  conv3x3_forward(c.act2.data(), DipNetwork::kMidCh, th + DipNetwork::oW3,
                  th + DipNetwork::oB3, c.out.data(), DipNetwork::kOutCh, ny, nx, rm_y,
                  rp_y);
}

ComplexImage cache_to_image(const ForwardCache& c, int ny, int nx) {
  ComplexImage m({ny, nx});
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  for (std::size_t p = 0; p < px; ++p) m[p] = cx{c.out[p], c.out[px + p]};
  return m;
}

double masked_data_loss(const DipNetwork& net, const NoiseSeed& noise, const KSpaceData& d,
                        const ImagingModel& model) {
  ForwardCache c;
  forward_cached(net, noise, c);
  ComplexImage m = cache_to_image(c, net.ny, net.nx);
  KSpaceData r = apply_A(m, model);
  if (!d.same_shape(r))
    throw DimensionError("dip loss: data shape " + d.shape_str() +
                         " does not match the model output " + r.shape_str());
  const RealArray pm = model.mask.as_real();
  const std::size_t block = pm.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) loss += std::norm(r[i] - pm[i % block] * d[i]);
  return loss;
}

}  // namespace

void dip_init(std::uint64_t seed, int ny, int nx, DipNetwork& net, NoiseSeed& noise,
              AdamState& state) {
  net = DipNetwork(ny, nx);
  Rng rng(seed);
  auto fill_uniform = [&](int offset, int count, double half_width) {
    for (int i = 0; i < count; ++i)
      net.theta[static_cast<std::size_t>(offset + i)] =
          (2.0 * rng.uniform() - 1.0) * half_width;
  };
  const double hw1 = std::sqrt(1.0 / (DipNetwork::kInCh * kK * kK));
  const double hw2 = std::sqrt(1.0 / (DipNetwork::kMidCh * kK * kK));
  fill_uniform(DipNetwork::oW1, DipNetwork::kW1, hw1);
  fill_uniform(DipNetwork::oB1, DipNetwork::kB1, hw1);
  fill_uniform(DipNetwork::oW2, DipNetwork::kW2, hw2);
  fill_uniform(DipNetwork::oB2, DipNetwork::kB2, hw2);
  fill_uniform(DipNetwork::oW3, DipNetwork::kW3, hw2);
  fill_uniform(DipNetwork::oB3, DipNetwork::kB3, hw2);

  noise.seed = seed;
  noise.z = RealArray({DipNetwork::kInCh, ny, nx});
  for (std::size_t i = 0; i < noise.z.size(); ++i) noise.z[i] = rng.normal();

  state = AdamState{};
  state.m.assign(DipNetwork::kParams, 0.0);
  state.v.assign(DipNetwork::kParams, 0.0);
}

ComplexImage dip_forward(const DipNetwork& net, const NoiseSeed& noise) {
  ForwardCache c;
  forward_cached(net, noise, c);
  return cache_to_image(c, net.ny, net.nx);
}

DipGrad dip_loss_grad(const DipNetwork& net, const NoiseSeed& noise, const KSpaceData& d,
                      const ImagingModel& model) {
  const int ny = net.ny, nx = net.nx;
  if (model.maps.ny() != ny || model.maps.nx() != nx)
    throw DimensionError("dip_loss_grad: model grid does not match the network");
  ForwardCache c;
  forward_cached(net, noise, c);
  ComplexImage m = cache_to_image(c, ny, nx);

  // Residual against the acquired samples only.
  KSpaceData r = apply_A(m, model);
  if (!d.same_shape(r))
    throw DimensionError("dip_loss_grad: data shape " + d.shape_str() +
                         " does not match the model output " + r.shape_str());
  const RealArray pm = model.mask.as_real();
  const std::size_t block = pm.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= pm[i % block] * d[i];
    loss += std::norm(r[i]);
  }

  // Measurement-side gradient, split into the two output channels.
  ComplexImage gm = apply_AH(r, model);
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  RealArray g_out({DipNetwork::kOutCh, ny, nx});
  for (std::size_t p = 0; p < px; ++p) {
    g_out[p] = 2.0 * gm[p].real();
    g_out[px + p] = 2.0 * gm[p].imag();
  }

  DipGrad out;
  out.loss = loss;
  out.grad.assign(DipNetwork::kParams, 0.0);
  double* g = out.grad.data();
  const double* th = net.theta.data();
  const auto rm_y = make_rm(ny), rp_y = make_rp(ny);

  RealArray g_act2({DipNetwork::kMidCh, ny, nx});
  conv3x3_backward(c.act2.data(), DipNetwork::kMidCh, th + DipNetwork::oW3, g_out.data(),
                   DipNetwork::kOutCh, ny, nx, rm_y, rp_y, g + DipNetwork::oW3,
                   g + DipNetwork::oB3, g_act2.data());
  for (std::size_t i = 0; i < g_act2.size(); ++i)
    if (!(c.pre2[i] > 0.0)) g_act2[i] = 0.0;

  RealArray g_act1({DipNetwork::kMidCh, ny, nx});
  conv3x3_backward(c.act1.data(), DipNetwork::kMidCh, th + DipNetwork::oW2, g_act2.data(),
                   DipNetwork::kMidCh, ny, nx, rm_y, rp_y, g + DipNetwork::oW2,
                   g + DipNetwork::oB2, g_act1.data());
  for (std::size_t i = 0; i < g_act1.size(); ++i)
    if (!(c.pre1[i] > 0.0)) g_act1[i] = 0.0;

  conv3x3_backward(noise.z.data(), DipNetwork::kInCh, th + DipNetwork::oW1, g_act1.data(),
                   DipNetwork::kMidCh, ny, nx, rm_y, rp_y, g + DipNetwork::oW1,
                   g + DipNetwork::oB1, nullptr);
  return out;
}

void adam_step(DipNetwork& net, const std::vector<double>& grad, AdamState& state) {
  if (grad.size() != net.theta.size())
    throw DimensionError("adam_step: gradient size does not match parameters");
  if (state.m.size() != net.theta.size()) state.m.assign(net.theta.size(), 0.0);
  if (state.v.size() != net.theta.size()) state.v.assign(net.theta.size(), 0.0);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < net.theta.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    net.theta[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

std::pair<SamplingMask, SamplingMask> dip_split(const SamplingMask& mask,
                                                std::uint64_t seed, double val_fraction) {
  if (mask.multi_echo())
    throw DimensionError("dip_split: expected a single-echo [ky,kx] mask");
  if (!(val_fraction > 0.0) || val_fraction >= 1.0)
    throw ParameterError("dip_split: val_fraction must be in (0, 1)");
  std::vector<std::size_t> acquired;
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    if (mask.data[i]) acquired.push_back(i);
  const std::size_t n_acq = acquired.size();
  const auto n_val =
      static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n_acq)));
  if (n_val < 1)
    throw ParameterError("dip_split: validation split is empty; raise val_fraction");
  if (n_val >= n_acq)
    throw ParameterError("dip_split: validation split leaves no training samples");

  Rng rng(seed ^ 0x5DEECE66DULL);
  for (std::size_t i = 0; i < n_val; ++i) {
    const std::size_t span = n_acq - i;
    auto j = i + std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(span)),
                          span - 1);
    std::swap(acquired[i], acquired[j]);
  }

  ByteArray train_data = mask.data;
  ByteArray val_data = ByteArray::zeros(mask.data.shape());
  for (std::size_t i = 0; i < n_val; ++i) {
    train_data[acquired[i]] = 0;
    val_data[acquired[i]] = 1;
  }
  return {SamplingMask::from_data(std::move(train_data), 0),
          SamplingMask::from_data(std::move(val_data), 0)};
}

DipResult dip_recon(const KSpaceData& d, const ImagingModel& model, std::uint64_t seed,
                    int max_steps, double val_fraction, int patience) {
  if (d.ndim() != 3) throw DimensionError("dip_recon: data must be [nc,ky,kx]");
  if (model.mask.multi_echo())
    throw DimensionError("dip_recon: expected a single-echo mask");
  if (!(val_fraction > 0.0) || val_fraction > 0.2)
    throw ParameterError("dip_recon: val_fraction must be in (0, 0.2]");
  if (patience < 1) throw ParameterError("dip_recon: patience must be >= 1");
  if (max_steps < 1) throw ParameterError("dip_recon: max_steps must be >= 1");

  const int ny = model.maps.ny(), nx = model.maps.nx();
  auto [train_mask, val_mask] = dip_split(model.mask, seed, val_fraction);
  ImagingModel model_train(model.maps, train_mask, model.geometry);
  ImagingModel model_val(model.maps, val_mask, model.geometry);

  DipNetwork net;
  NoiseSeed noise;
  AdamState state;
  dip_init(seed, ny, nx, net, noise, state);

  DipResult res;
  std::vector<double> best_theta = net.theta;
  res.history.best_step = 0;
  res.history.best_val = masked_data_loss(net, noise, d, model_val);
  res.history.val_steps.push_back(0);
  res.history.val_loss.push_back(res.history.best_val);

  int bad_checks = 0;
  for (int step = 1; step <= max_steps; ++step) {
    DipGrad lg = dip_loss_grad(net, noise, d, model_train);
    res.history.train_loss.push_back(lg.loss);
    adam_step(net, lg.grad, state);
    res.history.steps_run = step;

    if (step % 25 == 0 || step == max_steps) {
      const double vl = masked_data_loss(net, noise, d, model_val);
      res.history.val_steps.push_back(step);
      res.history.val_loss.push_back(vl);
      if (vl < res.history.best_val) {
        res.history.best_val = vl;
        res.history.best_step = step;
        best_theta = net.theta;
        bad_checks = 0;
      } else {
        ++bad_checks;
        if (bad_checks >= patience) {
          res.history.stopped_early = true;
          break;
        }
      }
    }
  }

  net.theta = std::move(best_theta);
  res.image = dip_forward(net, noise);
  return res;
}

}  // namespace mri
