#include "mri/calibration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "mri/fft.hpp"

namespace mri {

AcsBlock extract_acs(const KSpaceData& d, const SamplingMask& mask) {
  if (d.ndim() != 3) throw DimensionError("extract_acs: data must be [nc,ny,nx]");
  if (mask.multi_echo()) throw DimensionError("extract_acs: needs a 2-d mask");
  if (d.ny() != mask.ny() || d.nx() != mask.nx())
    throw DimensionError("extract_acs: data " + d.shape_str() + " does not match mask");
  if (mask.acs_lines < 1)
    throw CalibrationError("extract_acs: mask declares no calibration lines");

  const int nc = d.shape(0), ny = d.ny(), nx = d.nx();
  const int row0 = (ny - mask.acs_lines) / 2;
  for (int a = 0; a < mask.acs_lines; ++a)
    for (int x = 0; x < nx; ++x)
      if (mask.data.at(row0 + a, x) == 0)
        throw CalibrationError("extract_acs: declared calibration line " +
                               std::to_string(row0 + a) + " is not sampled");

  AcsBlock block;
  block.row0 = row0;
  block.data = CxArray({nc, mask.acs_lines, nx});
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < mask.acs_lines; ++a)
      for (int x = 0; x < nx; ++x) block.data.at(c, a, x) = d.at(c, row0 + a, x);
  return block;
}

GrappaKernel grappa_fit(const AcsBlock& acs, int accel, int nu, int nv, double tikhonov) {
  if (accel < 2) throw ParameterError("grappa_fit: acceleration must be >= 2");
  if (nu < 2 || nu % 2 != 0) throw ParameterError("grappa_fit: nu must be even and >= 2");
  if (nv < 1 || nv % 2 == 0) throw ParameterError("grappa_fit: nv must be odd and >= 1");
  if (tikhonov < 0.0) throw ParameterError("grappa_fit: tikhonov must be >= 0");

  const int nc = acs.nc(), na = acs.n_acs(), nx = acs.nx();
  GrappaKernel kernel;
  kernel.accel = accel;
  kernel.nu = nu;
  kernel.nv = nv;
  kernel.nc = nc;
  const int ncols = kernel.cols();
  const int half_v = (nv - 1) / 2;

  for (int f = 1; f < accel; ++f) {
    // Valid target rows: the global ky index must have undersampling phase f
    // (so sources sit on acquired-grid lines, the same geometry the kernel is
    // applied with), and all source rows tau + ky_offset(u, f) must lie in
    // the ACS block; valid target columns keep kx + kx_offset(v) in range.
    std::vector<int> taus;
    for (int tau = 0; tau < na; ++tau) {
      if ((acs.row0 + tau) % accel != f) continue;
      bool ok = true;
      for (int u = 0; u < nu; ++u) {
        const int src = tau + kernel.ky_offset(u, f);
        ok &= (src >= 0 && src < na);
      }
      if (ok) taus.push_back(tau);
    }
    const int n_eq = static_cast<int>(taus.size()) * (nx - nv + 1);
    if (n_eq < ncols)
      throw CalibrationError("grappa_fit: underdetermined system, " + std::to_string(n_eq) +
                             " equations for " + std::to_string(ncols) +
                             " unknowns per target coil");

    Eigen::MatrixXcd S(n_eq, ncols), T(n_eq, nc);
    int row = 0;
    for (int tau : taus) {
      for (int kx = half_v; kx < nx - half_v; ++kx) {
        for (int c = 0; c < nc; ++c)
          for (int u = 0; u < nu; ++u) {
            const int sy = tau + kernel.ky_offset(u, f);
            for (int v = 0; v < nv; ++v)
              S(row, (c * nu + u) * nv + v) = acs.data.at(c, sy, kx + kernel.kx_offset(v));
          }
        for (int j = 0; j < nc; ++j) T(row, j) = acs.data.at(j, tau, kx);
        ++row;
      }
    }

    Eigen::MatrixXcd N = S.adjoint() * S;
    const double reg = tikhonov * N.trace().real() / ncols;
    for (int i = 0; i < ncols; ++i) N(i, i) += reg;
    Eigen::MatrixXcd G = N.ldlt().solve(S.adjoint() * T);  // [ncols, nc]

    CxArray w({nc, ncols});
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < ncols; ++i) w.at(j, i) = G(i, j);
    kernel.weights.push_back(std::move(w));
  }
  return kernel;
}

CalibrationMatrix calib_matrix(const AcsBlock& acs, int ky_k, int kx_k) {
  const int nc = acs.nc(), na = acs.n_acs(), nx = acs.nx();
  if (ky_k < 1 || kx_k < 1) throw ParameterError("calib_matrix: kernel sizes must be >= 1");
  if (ky_k > na || kx_k > nx)
    throw CalibrationError("calib_matrix: calibration block " + std::to_string(na) + "x" +
                           std::to_string(nx) + " smaller than kernel " +
                           std::to_string(ky_k) + "x" + std::to_string(kx_k));
  const int wy = na - ky_k + 1, wx = nx - kx_k + 1;
  CalibrationMatrix cm;
  cm.ky_k = ky_k;
  cm.kx_k = kx_k;
  cm.nc = nc;
  cm.rows = CxArray({wy * wx, nc * ky_k * kx_k});
  int row = 0;
  for (int y0 = 0; y0 < wy; ++y0)
    for (int x0 = 0; x0 < wx; ++x0) {
      for (int c = 0; c < nc; ++c)
        for (int dy = 0; dy < ky_k; ++dy)
          for (int dx = 0; dx < kx_k; ++dx)
            cm.rows.at(row, (c * ky_k + dy) * kx_k + dx) = acs.data.at(c, y0 + dy, x0 + dx);
      ++row;
    }
  return cm;
}

CoilMaps espirit_maps(const AcsBlock& acs, int ky_k, int kx_k, double sigma_rel,
                      double eig_crop, int full_ny, int full_nx) {
  if (sigma_rel <= 0.0 || sigma_rel >= 1.0)
    throw ParameterError("espirit_maps: sigma_rel must be in (0,1)");
  if (eig_crop < 0.0 || eig_crop > 1.0)
    throw ParameterError("espirit_maps: eig_crop must be in [0,1]");
  if (full_ny < ky_k || full_nx < kx_k || full_ny % 2 != 0 || full_nx % 2 != 0)
    throw ParameterError("espirit_maps: bad output grid size");

  CalibrationMatrix cm = calib_matrix(acs, ky_k, kx_k);
  const int nc = cm.nc;
  const int n_win = cm.rows.shape(0), ncols = cm.rows.shape(1);
  if (n_win < ncols)
    throw CalibrationError("espirit_maps: calibration matrix underdetermined (" +
                           std::to_string(n_win) + " windows for " + std::to_string(ncols) +
                           " columns)");

  Eigen::MatrixXcd A(n_win, ncols);
  for (int r = 0; r < n_win; ++r)
    for (int c = 0; c < ncols; ++c) A(r, c) = cm.rows.at(r, c);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinV);
  const auto& sig = svd.singularValues();
  int n_keep = 1;
  while (n_keep < sig.size() && sig(n_keep) >= sigma_rel * sig(0)) ++n_keep;

  // Accumulate the per-pixel signal-subspace operator Q(r) = M(r)^H M(r)
  // where M(r)[s, c] is the image transform of kernel s, coil c. The
  // sqrt(N/n_k) scale makes the top eigenvalue approach 1 inside the object
  // support for an adequately sampled calibration region.
  const std::size_t px = static_cast<std::size_t>(full_ny) * full_nx;
  const double scale = std::sqrt(static_cast<double>(px) / (ky_k * kx_k));
  std::vector<cx> Q(px * nc * nc, cx{0.0, 0.0});
  CxArray kern({nc, full_ny, full_nx});
  const int y0 = full_ny / 2 - ky_k / 2, x0 = full_nx / 2 - kx_k / 2;
  for (int s = 0; s < n_keep; ++s) {
    for (std::size_t i = 0; i < kern.size(); ++i) kern[i] = cx{0.0, 0.0};
    // Each tap goes to the frequency-reflected slot: the window condition
    // constrains the sliding correlation of the kernel with the data, and the
    // inverse transform turns a correlation into a product only after the
    // kernel is reflected through the frequency origin. Embedding unreflected
    // taps would mirror every output map through the image origin.
    for (int c = 0; c < nc; ++c)
      for (int dy = 0; dy < ky_k; ++dy)
        for (int dx = 0; dx < kx_k; ++dx)
          kern.at(c, (full_ny - (y0 + dy)) % full_ny, (full_nx - (x0 + dx)) % full_nx) =
              svd.matrixV()((c * ky_k + dy) * kx_k + dx, s);
    CxArray img = ifft2c(kern);
    for (std::size_t p = 0; p < px; ++p) {
      cx* q = Q.data() + p * nc * nc;
      for (int a = 0; a < nc; ++a) {
        const cx va = scale * img[static_cast<std::size_t>(a) * px + p];
        for (int b = 0; b < nc; ++b) {
          const cx vb = scale * img[static_cast<std::size_t>(b) * px + p];
          q[a * nc + b] += std::conj(va) * vb;  // Q = M^H M
        }
      }
    }
  }

  // Dominant eigenvector per pixel by power iteration.
  CxArray maps({nc, full_ny, full_nx});
  std::vector<cx> v(nc), w(nc);
  for (std::size_t p = 0; p < px; ++p) {
    const cx* q = Q.data() + p * nc * nc;
    const double start = 1.0 / std::sqrt(static_cast<double>(nc));
    for (int a = 0; a < nc; ++a) v[a] = cx{start, 0.0};
    double eigval = 0.0;
    for (int it = 0; it < 50; ++it) {
      for (int a = 0; a < nc; ++a) {
        cx acc{0.0, 0.0};
        for (int b = 0; b < nc; ++b) acc += q[a * nc + b] * v[b];
        w[a] = acc;
      }
      double nrm = 0.0;
      for (int a = 0; a < nc; ++a) nrm += std::norm(w[a]);
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) break;
      double delta = 0.0;
      for (int a = 0; a < nc; ++a) {
        w[a] /= nrm;
        delta += std::norm(w[a] - v[a]);
        v[a] = w[a];
      }
      eigval = nrm;  // after normalization of the previous iterate, |Qv| -> lambda
      if (std::sqrt(delta) < 1e-10) break;
    }
    if (eigval >= eig_crop) {
      // Rotate the largest-magnitude component onto the positive real axis.
      int ref = 0;
      double best = 0.0;
      for (int a = 0; a < nc; ++a)
        if (std::norm(v[a]) > best) {
          best = std::norm(v[a]);
          ref = a;
        }
      const cx phase = std::abs(v[ref]) > 0.0 ? std::conj(v[ref]) / std::abs(v[ref])
                                              : cx{1.0, 0.0};
      for (int a = 0; a < nc; ++a) maps[static_cast<std::size_t>(a) * px + p] = v[a] * phase;
    } else {
      for (int a = 0; a < nc; ++a) maps[static_cast<std::size_t>(a) * px + p] = cx{0.0, 0.0};
    }
  }
  return CoilMaps(std::move(maps), true);
}

}  // namespace mri
