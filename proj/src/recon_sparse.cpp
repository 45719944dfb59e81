#include "mri/recon_sparse.hpp"

#include <cmath>

#include "mri/recon_linear.hpp"

namespace mri {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_levels(const CxArray& x, int levels, const char* who) {
  if (x.ndim() < 2) throw DimensionError(std::string(who) + ": need at least 2 axes");
  if (levels < 1) throw ParameterError(std::string(who) + ": levels must be >= 1");
  const int div = 1 << levels;
  if (x.ny() % div != 0 || x.nx() % div != 0)
    throw DimensionError(std::string(who) + ": trailing axes " + x.shape_str() +
                         " not divisible by 2^levels = " + std::to_string(div));
}

// One analysis level on the top-left (h, w) block of a [ny, nx] slice.
void haar_level_fwd(cx* s, int nx_full, int h, int w, std::vector<cx>& tmp) {
  // Rows: pairs (2k, 2k+1) -> (sum, diff)/sqrt(2), averages to the left half.
  for (int y = 0; y < h; ++y) {
    cx* row = s + static_cast<std::size_t>(y) * nx_full;
    for (int k = 0; k < w / 2; ++k) {
      const cx a = row[2 * k], b = row[2 * k + 1];
      tmp[k] = (a + b) * kInvSqrt2;
      tmp[w / 2 + k] = (a - b) * kInvSqrt2;
    }
    for (int k = 0; k < w; ++k) row[k] = tmp[k];
  }
  // Columns.
  for (int x = 0; x < w; ++x) {
    for (int k = 0; k < h / 2; ++k) {
      const cx a = s[static_cast<std::size_t>(2 * k) * nx_full + x];
      const cx b = s[static_cast<std::size_t>(2 * k + 1) * nx_full + x];
      tmp[k] = (a + b) * kInvSqrt2;
      tmp[h / 2 + k] = (a - b) * kInvSqrt2;
    }
    for (int k = 0; k < h; ++k) s[static_cast<std::size_t>(k) * nx_full + x] = tmp[k];
  }
}

void haar_level_inv(cx* s, int nx_full, int h, int w, std::vector<cx>& tmp) {
  for (int x = 0; x < w; ++x) {
    for (int k = 0; k < h / 2; ++k) {
      const cx a = s[static_cast<std::size_t>(k) * nx_full + x];
      const cx b = s[static_cast<std::size_t>(h / 2 + k) * nx_full + x];
      tmp[2 * k] = (a + b) * kInvSqrt2;
      tmp[2 * k + 1] = (a - b) * kInvSqrt2;
    }
    for (int k = 0; k < h; ++k) s[static_cast<std::size_t>(k) * nx_full + x] = tmp[k];
  }
  for (int y = 0; y < h; ++y) {
    cx* row = s + static_cast<std::size_t>(y) * nx_full;
    for (int k = 0; k < w / 2; ++k) {
      const cx a = row[k], b = row[w / 2 + k];
      tmp[2 * k] = (a + b) * kInvSqrt2;
      tmp[2 * k + 1] = (a - b) * kInvSqrt2;
    }
    for (int k = 0; k < w; ++k) row[k] = tmp[k];
  }
}

}  // namespace

CxArray haar2_forward(const CxArray& x, int levels) {
  check_levels(x, levels, "haar2_forward");
  const int ny = x.ny(), nx = x.nx();
  const std::size_t slice = static_cast<std::size_t>(ny) * nx;
  CxArray out = x;
  std::vector<cx> tmp(static_cast<std::size_t>(std::max(ny, nx)));
  for (std::size_t s = 0; s < out.size() / slice; ++s) {
    int h = ny, w = nx;
    for (int l = 0; l < levels; ++l) {
      haar_level_fwd(out.data() + s * slice, nx, h, w, tmp);
      h /= 2;
      w /= 2;
    }
  }
  return out;
}

CxArray haar2_inverse(const CxArray& coeffs, int levels) {
  check_levels(coeffs, levels, "haar2_inverse");
  const int ny = coeffs.ny(), nx = coeffs.nx();
  const std::size_t slice = static_cast<std::size_t>(ny) * nx;
  CxArray out = coeffs;
  std::vector<cx> tmp(static_cast<std::size_t>(std::max(ny, nx)));
  for (std::size_t s = 0; s < out.size() / slice; ++s) {
    for (int l = levels - 1; l >= 0; --l) {
      haar_level_inv(out.data() + s * slice, nx, ny >> l, nx >> l, tmp);
    }
  }
  return out;
}

CxArray soft_threshold(const CxArray& x, double tau) {
  if (tau < 0.0) throw ParameterError("soft_threshold: tau must be >= 0");
  CxArray out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = std::abs(out[i]);
    out[i] = a <= tau ? cx{0.0, 0.0} : out[i] * (1.0 - tau / a);
  }
  return out;
}

double l1_norm(const CxArray& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i]);
  return acc;
}

double pics_objective(const ComplexImage& m, const KSpaceData& d, const ImagingModel& model,
                      double lambda, int levels) {
  KSpaceData r = apply_A(m, model);
  double data = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) data += std::norm(r[i] - d[i]);
  const double l1 = lambda > 0.0 ? l1_norm(haar2_forward(m, levels)) : 0.0;
  return 0.5 * data + lambda * l1;
}

namespace {

void check_pics(const ImagingModel& model, const PicsConfig& cfg, bool prox) {
  if (!model.maps.normalized)
    throw ParameterError("pics: model requires normalized coil maps");
  if (cfg.lambda < 0.0) throw ParameterError("pics: lambda must be >= 0");
  if (cfg.alpha <= 0.0) throw ParameterError("pics: alpha must be > 0");
  if (prox && cfg.alpha > 1.0)
    throw ParameterError("pics: alpha must be <= 1 for the proximal variants");
  if (cfg.max_iter < 1) throw ParameterError("pics: max_iter must be >= 1");
}

ComplexImage zero_image(const KSpaceData& d) {
  return ComplexImage::zeros(d.ndim() == 4 ? std::vector<int>{d.shape(1), d.ny(), d.nx()}
                                           : std::vector<int>{d.ny(), d.nx()});
}

}  // namespace

PicsResult pics_subgradient(const KSpaceData& d, const ImagingModel& model,
                            const PicsConfig& cfg) {
  check_pics(model, cfg, false);
  PicsResult res;
  res.image = zero_image(d);
  for (int t = 0; t < cfg.max_iter; ++t) {
    double data_cost = 0.0;
    ComplexImage next = grad_step(res.image, d, model, cfg.alpha, &data_cost);
    double l1 = 0.0;
    if (cfg.lambda > 0.0) {
      CxArray w = haar2_forward(res.image, cfg.levels);
      l1 = l1_norm(w);
      // sign(w): w/|w| elementwise, 0 at 0.
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double a = std::abs(w[i]);
        w[i] = a > 0.0 ? w[i] / a : cx{0.0, 0.0};
      }
      ComplexImage pen = haar2_inverse(w, cfg.levels);
      axpy(cx{-cfg.alpha * cfg.lambda, 0.0}, pen, next);
    }
    res.cost_history.push_back(0.5 * data_cost + cfg.lambda * l1);
    res.image = std::move(next);
  }
  res.cost_history.push_back(pics_objective(res.image, d, model, cfg.lambda, cfg.levels));
  return res;
}

PicsResult pics_ista(const KSpaceData& d, const ImagingModel& model, const PicsConfig& cfg) {
  check_pics(model, cfg, true);
  const bool fista = cfg.variant == "fista";
  PicsResult res;
  res.image = zero_image(d);  // m_t
  ComplexImage y = res.image;  // extrapolation point (fista), equals m_t for ista
  double theta = 1.0;
  double l1_prev = 0.0;  // ||Phi m_t||_1 via the stored coefficient vector
  bool stopped_early = false;
  for (int t = 0; t < cfg.max_iter; ++t) {
    double data_cost = 0.0;
    if (fista) {
      // Objective history tracks m_t, the gradient is taken at y_t.
      KSpaceData r = apply_A(res.image, model);
      for (std::size_t i = 0; i < r.size(); ++i) data_cost += std::norm(r[i] - d[i]);
    }
    ComplexImage g = grad_step(y, d, model, cfg.alpha, fista ? nullptr : &data_cost);
    res.cost_history.push_back(0.5 * data_cost + cfg.lambda * l1_prev);
    if (cfg.tol > 0.0 && res.cost_history.size() >= 2) {
      const double prev = res.cost_history[res.cost_history.size() - 2];
      const double cur = res.cost_history.back();
      if (prev - cur < cfg.tol * std::max(prev, 1e-300)) {
        stopped_early = true;
        break;
      }
    }
    CxArray w = haar2_forward(g, cfg.levels);
    w = soft_threshold(w, cfg.alpha * cfg.lambda);
    l1_prev = l1_norm(w);
    ComplexImage m_next = haar2_inverse(w, cfg.levels);
    if (fista) {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double gamma = (theta - 1.0) / theta_next;
      y = m_next;
      axpy(cx{gamma, 0.0}, m_next, y);
      axpy(cx{-gamma, 0.0}, res.image, y);
      theta = theta_next;
    } else {
      y = m_next;
    }
    res.image = std::move(m_next);
  }
  if (!stopped_early)
    res.cost_history.push_back(pics_objective(res.image, d, model, cfg.lambda, cfg.levels));
  return res;
}

}  // namespace mri
