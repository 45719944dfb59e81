#include "mri/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "mri/rng.hpp"

namespace mri {
namespace {

bool inside(const EllipseSpec& e, double x, double y) {
  const double dx = x - e.cx, dy = y - e.cy;
  const double c = std::cos(e.phi), s = std::sin(e.phi);
  const double u = (dx * c + dy * s) / e.a;
  const double v = (-dx * s + dy * c) / e.b;
  return u * u + v * v <= 1.0;
}

constexpr double kDeg = M_PI / 180.0;

}  // namespace

const std::vector<EllipseSpec>& head_ellipses() {
  static const std::vector<EllipseSpec> table = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, -18.0 * kDeg, -0.2},
      {-0.22, 0.0, 0.16, 0.41, 18.0 * kDeg, -0.2},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
      {0.0, -0.606, 0.023, 0.023, 0.0, 0.1},
      {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
  };
  return table;
}

ComplexImage shepp_logan(int n) {
  if (n < 16 || n % 2 != 0)
    throw ParameterError("shepp_logan: n must be even and >= 16");
  const auto& table = head_ellipses();
  ComplexImage img({n, n});
  for (int iy = 0; iy < n; ++iy) {
    const double y = 1.0 - 2.0 * (iy + 0.5) / n;
    for (int ix = 0; ix < n; ++ix) {
      const double x = -1.0 + 2.0 * (ix + 0.5) / n;
      double v = 0.0;
      for (const auto& e : table)
        if (inside(e, x, y)) v += e.intensity;
      img.at(iy, ix) = cx{v, 0.0};
    }
  }
  return img;
}

TissueMaps quant_phantom(int n) {
  if (n < 16 || n % 2 != 0)
    throw ParameterError("quant_phantom: n must be even and >= 16");
  const auto& e = head_ellipses();

  // Region table rows: {rho, t1, t2, diff}.
  constexpr double kBackground[4] = {0.0, 1000.0, 100.0, 0.0};
  constexpr double kOuter[4] = {1.0, 1200.0, 110.0, 1.0e-3};
  constexpr double kInner[4] = {0.8, 800.0, 80.0, 0.8e-3};
  constexpr double kFluid[4] = {1.0, 4000.0, 2000.0, 3.0e-3};

  TissueMaps maps;
  maps.rho = RealArray({n, n});
  maps.t1 = RealArray({n, n});
  maps.t2 = RealArray({n, n});
  maps.diff = RealArray({n, n});
  for (int iy = 0; iy < n; ++iy) {
    const double y = 1.0 - 2.0 * (iy + 0.5) / n;
    for (int ix = 0; ix < n; ++ix) {
      const double x = -1.0 + 2.0 * (ix + 0.5) / n;
      const double* row = kBackground;
      if (inside(e[2], x, y) || inside(e[3], x, y)) {
        row = kFluid;
      } else {
        bool small_feature = false;
        for (int j = 4; j < 10; ++j) small_feature |= inside(e[j], x, y);
        if (small_feature) {
          row = kOuter;
        } else if (inside(e[1], x, y)) {
          row = kInner;
        } else if (inside(e[0], x, y)) {
          row = kOuter;
        }
      }
      maps.rho.at(iy, ix) = row[0];
      maps.t1.at(iy, ix) = row[1];
      maps.t2.at(iy, ix) = row[2];
      maps.diff.at(iy, ix) = row[3];
    }
  }
  maps.validate();
  return maps;
}

CoilMaps simulate_coils(int n, int nc, std::uint64_t seed, double lobe_width) {
  if (n < 2 || n % 2 != 0) throw ParameterError("simulate_coils: n must be even and >= 2");
  if (nc < 1) throw ParameterError("simulate_coils: nc must be >= 1");
  if (lobe_width <= 0.0) throw ParameterError("simulate_coils: lobe_width must be > 0");

  Rng rng(seed);
  CxArray data({nc, n, n});
  const double ring_radius = 1.3;
  for (int c = 0; c < nc; ++c) {
    const double theta = 2.0 * M_PI * c / nc + 0.2 * (rng.uniform() - 0.5);
    const double cx0 = ring_radius * std::cos(theta);
    const double cy0 = ring_radius * std::sin(theta);
    // Low-order polynomial phase ramp coefficients, fixed per coil.
    const double p1 = (rng.uniform() - 0.5) * M_PI;
    const double p2 = (rng.uniform() - 0.5) * M_PI;
    const double p3 = (rng.uniform() - 0.5) * 0.5 * M_PI;
    const double p0 = (rng.uniform() - 0.5) * 2.0 * M_PI;
    for (int iy = 0; iy < n; ++iy) {
      const double y = 1.0 - 2.0 * (iy + 0.5) / n;
      for (int ix = 0; ix < n; ++ix) {
        const double x = -1.0 + 2.0 * (ix + 0.5) / n;
        const double r2 = (x - cx0) * (x - cx0) + (y - cy0) * (y - cy0);
        const double mag = std::exp(-r2 / (2.0 * lobe_width * lobe_width));
        const double phase = p0 + p1 * x + p2 * y + p3 * x * y;
        data.at(c, iy, ix) = cx{mag * std::cos(phase), mag * std::sin(phase)};
      }
    }
  }
  // Pixelwise normalization: sum_c |c|^2 = 1 everywhere.
  const std::size_t px = static_cast<std::size_t>(n) * n;
  for (std::size_t p = 0; p < px; ++p) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += std::norm(data[static_cast<std::size_t>(c) * px + p]);
    const double inv = 1.0 / std::sqrt(s);
    for (int c = 0; c < nc; ++c) data[static_cast<std::size_t>(c) * px + p] *= inv;
  }
  return CoilMaps(std::move(data), true);
}

SamplingMask make_mask(int n, const MaskSpec& spec) {
  if (n < 2 || n % 2 != 0) throw ParameterError("make_mask: n must be even and >= 2");
  if (spec.accel < 1) throw ParameterError("make_mask: accel must be >= 1");
  if (spec.acs_lines < 0 || spec.acs_lines >= n)
    throw ParameterError("make_mask: acs_lines must be in [0, n)");
  if (spec.acs_lines > n / spec.accel)
    throw ParameterError("make_mask: acs_lines " + std::to_string(spec.acs_lines) +
                         " alone exceeds the line budget n/R = " +
                         std::to_string(n / spec.accel));

  std::vector<bool> line(n, false);
  const int acs_start = (n - spec.acs_lines) / 2;
  for (int i = 0; i < spec.acs_lines; ++i) line[acs_start + i] = true;

  if (spec.kind == MaskSpec::Kind::uniform) {
    for (int ky = 0; ky < n; ky += spec.accel) line[ky] = true;
  } else {
    const int budget = std::max(1, static_cast<int>(std::lround(static_cast<double>(n) /
                                                                spec.accel)));
    int remaining = budget - spec.acs_lines;
    if (remaining > 0) {
      // Weighted sampling without replacement: keep the top `remaining`
      // lines ranked by u^(1/w), the standard exponential-key method.
      Rng rng(spec.seed);
      const double center = n / 2.0;
      std::vector<std::pair<double, int>> keys;
      keys.reserve(n);
      for (int ky = 0; ky < n; ++ky) {
        const double u = rng.uniform();  // one draw per line, fixed order
        if (line[ky]) continue;          // ACS lines are already in
        const double w =
            std::pow(1.0 + std::abs(ky - center) / center, -spec.density_exponent);
        keys.emplace_back(std::pow(u, 1.0 / w), ky);
      }
      std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      for (int i = 0; i < remaining && i < static_cast<int>(keys.size()); ++i)
        line[keys[i].second] = true;
    }
  }

  ByteArray data({n, n});
  for (int ky = 0; ky < n; ++ky)
    if (line[ky])
      for (int kx = 0; kx < n; ++kx) data.at(ky, kx) = 1;
  return SamplingMask(std::move(data), spec.accel, spec.acs_lines);
}

SamplingMask full_mask(int ny, int nx) {
  ByteArray data({ny, nx});
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = 1;
  return SamplingMask(std::move(data), 1, 0);
}

ComplexImage synth_multiecho(const TissueMaps& maps, const std::vector<double>& te_list,
                             double tr, double k_const) {
  maps.validate();
  if (te_list.empty()) throw ParameterError("synth_multiecho: te_list must be nonempty");
  const int ne = static_cast<int>(te_list.size());
  const int ny = maps.rho.shape(0), nx = maps.rho.shape(1);
  ComplexImage out({ne, ny, nx});
  for (int e = 0; e < ne; ++e) {
    SequenceParams params;
    params.tr = tr;
    params.te = {te_list[e]};
    params.k_const = k_const;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const double v = maps.rho.at(iy, ix) > 0.0
                             ? spin_echo_signal(maps.rho.at(iy, ix), maps.t1.at(iy, ix),
                                                maps.t2.at(iy, ix), params)
                             : 0.0;
        out.at(e, iy, ix) = cx{v, 0.0};
      }
  }
  return out;
}

ComplexImage synth_image(const TissueMaps& maps, const SequenceParams& params) {
  maps.validate();
  params.validate();
  const int ny = maps.rho.shape(0), nx = maps.rho.shape(1);
  ComplexImage out({ny, nx});
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double v = 0.0;
      if (maps.rho.at(iy, ix) > 0.0) {
        v = params.b > 0.0
                ? diffusion_signal(maps.rho.at(iy, ix), maps.t1.at(iy, ix),
                                   maps.t2.at(iy, ix), maps.diff.at(iy, ix), params)
                : spin_echo_signal(maps.rho.at(iy, ix), maps.t1.at(iy, ix),
                                   maps.t2.at(iy, ix), params);
      }
      out.at(iy, ix) = cx{v, 0.0};
    }
  return out;
}

CxArray add_noise(const CxArray& data, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ParameterError("add_noise: sigma must be >= 0");
  CxArray out = data;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  const double scale = sigma / std::sqrt(2.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    out[i] += cx{scale * re, scale * im};
  }
  return out;
}

}  // namespace mri
