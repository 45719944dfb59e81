#include "mri/recon_lowrank.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "mri/fft.hpp"
#include "mri/recon_linear.hpp"

namespace mri {

void HankelConfig::validate() const {
  if (radius < 0) throw ParameterError("HankelConfig: radius must be >= 0");
  const bool hard = rank_ell > 0, soft = tau > 0.0;
  if (hard == soft)
    throw ParameterError("HankelConfig: exactly one of rank_ell / tau must be set");
  if (rank_ell < 0 || tau < 0.0) throw ParameterError("HankelConfig: negative shrink parameter");
  if (max_iter < 1) throw ParameterError("HankelConfig: max_iter must be >= 1");
}

namespace {

Eigen::MatrixXcd to_eigen(const CxArray& m) {
  const int rows = m.shape(0), cols = m.shape(1);
  Eigen::MatrixXcd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = m.at(r, c);
  return out;
}

CxArray from_eigen(const Eigen::MatrixXcd& m) {
  CxArray out({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.at(r, c) = m(r, c);
  return out;
}

}  // namespace

LiftedMatrix hankel_build(const KSpaceData& d, int radius) {
  if (d.ndim() != 3) throw DimensionError("hankel_build: data must be [nc,ny,nx]");
  if (radius < 0) throw ParameterError("hankel_build: radius must be >= 0");
  const int nc = d.shape(0), ny = d.ny(), nx = d.nx();
  const int p = 2 * radius + 1;
  if (ny < p || nx < p)
    throw DimensionError("hankel_build: patch " + std::to_string(p) + "x" +
                         std::to_string(p) + " larger than grid " + d.shape_str());

  LiftedMatrix lm;
  lm.radius = radius;
  lm.nc = nc;
  lm.ny = ny;
  lm.nx = nx;
  const int wy = ny - p + 1, wx = nx - p + 1;
  lm.matrix = CxArray({wy * wx, nc * p * p});
  lm.multiplicity = RealArray({ny, nx});
  int row = 0;
  for (int y0 = 0; y0 < wy; ++y0)
    for (int x0 = 0; x0 < wx; ++x0) {
      for (int c = 0; c < nc; ++c)
        for (int dy = 0; dy < p; ++dy)
          for (int dx = 0; dx < p; ++dx)
            lm.matrix.at(row, (c * p + dy) * p + dx) = d.at(c, y0 + dy, x0 + dx);
      ++row;
    }
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      const int cy = std::min({y + 1, wy, ny - y, p});
      const int cxn = std::min({x + 1, wx, nx - x, p});
      lm.multiplicity.at(y, x) = static_cast<double>(cy) * cxn;
    }
  return lm;
}

KSpaceData hankel_adjoint(const LiftedMatrix& m) {
  const int p = 2 * m.radius + 1;
  const int wy = m.ny - p + 1, wx = m.nx - p + 1;
  if (m.matrix.shape(0) != wy * wx || m.matrix.shape(1) != m.nc * p * p)
    throw DimensionError("hankel_adjoint: matrix shape " + m.matrix.shape_str() +
                         " inconsistent with lift geometry");
  KSpaceData out({m.nc, m.ny, m.nx});
  int row = 0;
  for (int y0 = 0; y0 < wy; ++y0)
    for (int x0 = 0; x0 < wx; ++x0) {
      for (int c = 0; c < m.nc; ++c)
        for (int dy = 0; dy < p; ++dy)
          for (int dx = 0; dx < p; ++dx)
            out.at(c, y0 + dy, x0 + dx) += m.matrix.at(row, (c * p + dy) * p + dx);
      ++row;
    }
  return out;
}

KSpaceData unlift_average(const LiftedMatrix& m) {
  KSpaceData out = hankel_adjoint(m);
  const std::size_t px = static_cast<std::size_t>(m.ny) * m.nx;
  for (int c = 0; c < m.nc; ++c)
    for (std::size_t p = 0; p < px; ++p)
      out[static_cast<std::size_t>(c) * px + p] /= m.multiplicity[p];
  return out;
}

std::pair<CxArray, double> rank_project(const CxArray& m, int ell) {
  if (m.ndim() != 2) throw DimensionError("rank_project: expected a 2-d matrix");
  const int rows = m.shape(0), cols = m.shape(1);
  if (ell < 1 || ell > std::min(rows, cols))
    throw ParameterError("rank_project: ell must be in [1, min(rows, cols)]");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m),
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sig = svd.singularValues();
  double residual = 0.0;
  for (int i = ell; i < sig.size(); ++i) residual += sig(i) * sig(i);
  Eigen::MatrixXcd approx = svd.matrixU().leftCols(ell) *
                            sig.head(ell).asDiagonal() *
                            svd.matrixV().leftCols(ell).adjoint();
  return {from_eigen(approx), residual};
}

CxArray svt(const CxArray& m, double tau) {
  if (m.ndim() != 2) throw DimensionError("svt: expected a 2-d matrix");
  if (tau < 0.0) throw ParameterError("svt: tau must be >= 0");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m),
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sig = svd.singularValues();
  for (int i = 0; i < sig.size(); ++i) sig(i) = std::max(sig(i) - tau, 0.0);
  Eigen::MatrixXcd out = svd.matrixU() * sig.asDiagonal() * svd.matrixV().adjoint();
  return from_eigen(out);
}

KSpaceData lowrank_complete(const KSpaceData& d_us, const SamplingMask& mask,
                            const HankelConfig& cfg, std::vector<double>* change_history) {
  cfg.validate();
  if (d_us.ndim() != 3) throw DimensionError("lowrank_complete: data must be [nc,ny,nx]");
  if (mask.multi_echo()) throw DimensionError("lowrank_complete: needs a 2-d mask");
  if (d_us.ny() != mask.ny() || d_us.nx() != mask.nx())
    throw DimensionError("lowrank_complete: data does not match mask");

  const int nc = d_us.shape(0);
  const std::size_t px = static_cast<std::size_t>(mask.ny()) * mask.nx();
  KSpaceData k = d_us;  // zero-filled start
  for (int it = 0; it < cfg.max_iter; ++it) {
    LiftedMatrix lm = hankel_build(k, cfg.radius);
    if (cfg.rank_ell > 0)
      lm.matrix = rank_project(lm.matrix, cfg.rank_ell).first;
    else
      lm.matrix = svt(lm.matrix, cfg.tau);
    KSpaceData next = unlift_average(lm);
    // Data consistency last: acquired entries equal measurements bit-exactly.
    for (int c = 0; c < nc; ++c)
      for (std::size_t p = 0; p < px; ++p)
        if (mask.data[p]) next[static_cast<std::size_t>(c) * px + p] = d_us[static_cast<std::size_t>(c) * px + p];
    double change = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      change += std::norm(next[i] - k[i]);
      scale += std::norm(k[i]);
    }
    const double rel = scale > 0.0 ? std::sqrt(change / scale) : 0.0;
    if (change_history) change_history->push_back(rel);
    k = std::move(next);
    if (rel < cfg.tol) break;
  }
  return k;
}

ComplexImage lowrank_recon(const KSpaceData& d_us, const SamplingMask& mask,
                           const HankelConfig& cfg) {
  KSpaceData k = lowrank_complete(d_us, mask, cfg);
  RealArray img = rss_combine(ifft2c(k));
  ComplexImage out({img.shape(0), img.shape(1)});
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = cx{img[i], 0.0};
  return out;
}

}  // namespace mri
