#include "mri/recon_subspace.hpp"

#include <cmath>

namespace mri {

ComplexImage synth_from_coeffs(const SubspaceBasis& basis, const CxArray& s) {
  if (s.ndim() != 3) throw DimensionError("synth_from_coeffs: expected [K,ny,nx]");
  const int k = basis.k(), ne = basis.n_echo();
  if (s.shape(0) != k)
    throw DimensionError("synth_from_coeffs: coefficient count " +
                         std::to_string(s.shape(0)) + " does not match basis K=" +
                         std::to_string(k));
  const int ny = s.ny(), nx = s.nx();
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  ComplexImage out({ne, ny, nx});
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < k; ++j) {
      const double g = basis.basis.at(e, j);
      const cx* src = s.data() + static_cast<std::size_t>(j) * px;
      cx* dst = out.data() + static_cast<std::size_t>(e) * px;
      for (std::size_t p = 0; p < px; ++p) dst[p] += g * src[p];
    }
  return out;
}

CxArray coeff_adjoint(const SubspaceBasis& basis, const ComplexImage& x) {
  if (x.ndim() != 3) throw DimensionError("coeff_adjoint: expected [ne,ny,nx]");
  const int k = basis.k(), ne = basis.n_echo();
  if (x.shape(0) != ne)
    throw DimensionError("coeff_adjoint: echo count " + std::to_string(x.shape(0)) +
                         " does not match basis (" + std::to_string(ne) + ")");
  const int ny = x.ny(), nx = x.nx();
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  CxArray out({k, ny, nx});
  for (int j = 0; j < k; ++j)
    for (int e = 0; e < ne; ++e) {
      const double g = basis.basis.at(e, j);
      const cx* src = x.data() + static_cast<std::size_t>(e) * px;
      cx* dst = out.data() + static_cast<std::size_t>(j) * px;
      for (std::size_t p = 0; p < px; ++p) dst[p] += g * src[p];
    }
  return out;
}

SubspaceResult subspace_recon(const KSpaceData& d, const ImagingModel& model,
                              const SubspaceBasis& basis, double lambda, int max_iter,
                              double tol) {
  if (lambda < 0.0) throw ParameterError("subspace_recon: lambda must be >= 0");
  if (d.ndim() != 4) throw DimensionError("subspace_recon: data must be [nc,ne,ky,kx]");
  const int ne = d.shape(1);
  if (basis.n_echo() != ne)
    throw DimensionError("subspace_recon: basis echo count " +
                         std::to_string(basis.n_echo()) + " does not match data (" +
                         std::to_string(ne) + ")");
  if (model.mask.multi_echo() && model.mask.ne() != ne)
    throw DimensionError("subspace_recon: mask echo count does not match data");

  CxArray b = coeff_adjoint(basis, apply_AH(d, model));
  auto H = [&](const CxArray& s) {
    CxArray y = coeff_adjoint(basis, apply_AH(apply_A(synth_from_coeffs(basis, s), model), model));
    if (lambda > 0.0) axpy(cx{lambda, 0.0}, s, y);
    return y;
  };
  SubspaceResult res;
  res.solve = solve_hermitian(H, b, max_iter, tol);
  res.coeffs = res.solve.x;
  return res;
}

RealArray t2_match(const ComplexImage& echo_signals, const Dictionary& dict) {
  if (echo_signals.ndim() != 3) throw DimensionError("t2_match: expected [ne,ny,nx]");
  const int ne = echo_signals.shape(0);
  if (dict.n_echo() != ne)
    throw DimensionError("t2_match: dictionary echo count " +
                         std::to_string(dict.n_echo()) + " does not match data (" +
                         std::to_string(ne) + ")");
  const int ny = echo_signals.ny(), nx = echo_signals.nx();
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  const int na = dict.n_atoms();

  std::vector<double> norms(px, 0.0);
  double max_norm = 0.0;
  for (std::size_t p = 0; p < px; ++p) {
    double s = 0.0;
    for (int e = 0; e < ne; ++e)
      s += std::norm(echo_signals[static_cast<std::size_t>(e) * px + p]);
    norms[p] = std::sqrt(s);
    max_norm = std::max(max_norm, norms[p]);
  }

  RealArray out({ny, nx});
  const double cutoff = 1e-6 * max_norm;
  for (std::size_t p = 0; p < px; ++p) {
    if (norms[p] < cutoff || norms[p] == 0.0) {
      out[p] = 0.0;
      continue;
    }
    int best = 0;
    double best_score = -1.0;
    for (int a = 0; a < na; ++a) {
      cx acc{0.0, 0.0};
      for (int e = 0; e < ne; ++e)
        acc += dict.atoms.at(a, e) * echo_signals[static_cast<std::size_t>(e) * px + p];
      const double score = std::abs(acc);
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    out[p] = dict.t2_grid[static_cast<std::size_t>(best)];
  }
  return out;
}

}  // namespace mri
