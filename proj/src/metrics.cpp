#include "mri/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mri/errors.hpp"

namespace mri {

namespace {

std::vector<double> magnitudes(const CxArray& x) {
  std::vector<double> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = std::abs(x[i]);
  return m;
}

std::vector<double> magnitudes(const RealArray& x) {
  std::vector<double> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = std::abs(x[i]);
  return m;
}

void check_pair(std::size_t xs, std::size_t rs, bool same) {
  if (!same) throw DimensionError("metrics: images must share one shape");
  if (xs == 0 || rs == 0) throw DimensionError("metrics: images must be non-empty");
}

double nrmse_mag(const std::vector<double>& mx, const std::vector<double>& mr) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double d = mx[i] - mr[i];
    num += d * d;
    den += mr[i] * mr[i];
  }
  if (den == 0.0) throw ParameterError("nrmse: reference image is identically zero");
  return std::sqrt(num / den);
}

double psnr_mag(const std::vector<double>& mx, const std::vector<double>& mr) {
  double peak = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    peak = std::max(peak, mr[i]);
    const double d = mx[i] - mr[i];
    mse += d * d;
  }
  if (peak == 0.0) throw ParameterError("psnr: reference image is identically zero");
  mse /= static_cast<double>(mx.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim_mag(std::vector<double> mx, std::vector<double> mr, int ny, int nx, int window,
                double k1, double k2) {
  if (window < 1) throw ParameterError("ssim: window must be >= 1");
  if (ny < window || nx < window)
    throw DimensionError("ssim: image smaller than the window");
  double peak = 0.0;
  for (double v : mr) peak = std::max(peak, v);
  if (peak == 0.0) throw ParameterError("ssim: reference image is identically zero");
  for (auto& v : mx) v /= peak;
  for (auto& v : mr) v /= peak;

  const double c1 = k1 * k1;  // data range is 1 after normalization
  const double c2 = k2 * k2;
  const double wn = static_cast<double>(window) * window;

  double total = 0.0;
  std::size_t count = 0;
  for (int y0 = 0; y0 + window <= ny; ++y0) {
    for (int x0 = 0; x0 + window <= nx; ++x0) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int dy = 0; dy < window; ++dy) {
        const std::size_t row = static_cast<std::size_t>(y0 + dy) * nx + x0;
        for (int dx = 0; dx < window; ++dx) {
          const double a = mx[row + static_cast<std::size_t>(dx)];
          const double b = mr[row + static_cast<std::size_t>(dx)];
          sx += a;
          sy += b;
          sxx += a * a;
          syy += b * b;
          sxy += a * b;
        }
      }
      const double mux = sx / wn, muy = sy / wn;
      const double vx = sxx / wn - mux * mux;
      const double vy = syy / wn - muy * muy;
      const double cov = sxy / wn - mux * muy;
      const double num = (2.0 * mux * muy + c1) * (2.0 * cov + c2);
      const double den = (mux * mux + muy * muy + c1) * (vx + vy + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

double nrmse(const CxArray& x, const CxArray& ref) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  return nrmse_mag(magnitudes(x), magnitudes(ref));
}
double nrmse(const RealArray& x, const RealArray& ref) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  return nrmse_mag(magnitudes(x), magnitudes(ref));
}

double psnr(const CxArray& x, const CxArray& ref) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  return psnr_mag(magnitudes(x), magnitudes(ref));
}
double psnr(const RealArray& x, const RealArray& ref) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  return psnr_mag(magnitudes(x), magnitudes(ref));
}

double ssim(const CxArray& x, const CxArray& ref, int window, double k1, double k2) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  if (x.ndim() != 2) throw DimensionError("ssim: expected 2-d images");
  return ssim_mag(magnitudes(x), magnitudes(ref), x.ny(), x.nx(), window, k1, k2);
}
double ssim(const RealArray& x, const RealArray& ref, int window, double k1, double k2) {
  check_pair(x.size(), ref.size(), x.same_shape(ref));
  if (x.ndim() != 2) throw DimensionError("ssim: expected 2-d images");
  return ssim_mag(magnitudes(x), magnitudes(ref), x.ny(), x.nx(), window, k1, k2);
}

}  // namespace mri
