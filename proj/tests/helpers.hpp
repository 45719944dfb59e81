#pragma once

// Shared test utilities. The reference computations here are deliberately
// written from first principles (naive summation DFT, dense matrices,
// explicit Kronecker products) so they share no code path with the library
// implementations they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mri/array.hpp"
#include "mri/encoding.hpp"
#include "mri/rng.hpp"

namespace testutil {

using mri::cx;
using mri::CxArray;
using mri::RealArray;

inline CxArray random_cx(const std::vector<int>& shape, mri::Rng& rng) {
  CxArray a(shape);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.cnormal();
  return a;
}

inline RealArray random_real(const std::vector<int>& shape, mri::Rng& rng) {
  RealArray a(shape);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.normal();
  return a;
}

/// Relative L2 error ||a - b|| / ||b||.
inline double rel_err(const CxArray& a, const CxArray& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double rel_err(const RealArray& a, const RealArray& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline double max_abs_diff(const CxArray& a, const CxArray& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Naive centered orthonormal 2-d DFT, O(N^4): for even n and center c = n/2,
//   out[ky,kx] = (1/sqrt(ny*nx)) * sum_{y,x} in[y,x]
//                * exp(-2*pi*i*((ky-cy)(y-cy)/ny + (kx-cx)(x-cx)/nx)).
// The inverse flips the exponent sign.
// ---------------------------------------------------------------------------

inline CxArray naive_dft2c_sign(const CxArray& in, double sign) {
  const int ny = in.ny(), nx = in.nx();
  const int cy = ny / 2, cxn = nx / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(ny) * nx);
  CxArray out(in.shape());
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  const std::size_t slices = in.size() / px;
  for (std::size_t s = 0; s < slices; ++s) {
    for (int ky = 0; ky < ny; ++ky)
      for (int kx = 0; kx < nx; ++kx) {
        cx acc{0.0, 0.0};
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            const double phase =
                sign * 2.0 * std::numbers::pi *
                (static_cast<double>((ky - cy) * (y - cy)) / ny +
                 static_cast<double>((kx - cxn) * (x - cxn)) / nx);
            acc += in[s * px + static_cast<std::size_t>(y) * nx + x] *
                   cx{std::cos(phase), std::sin(phase)};
          }
        out[s * px + static_cast<std::size_t>(ky) * nx + kx] = acc * scale;
      }
  }
  return out;
}

inline CxArray naive_dft2c(const CxArray& in) { return naive_dft2c_sign(in, -1.0); }
inline CxArray naive_idft2c(const CxArray& in) { return naive_dft2c_sign(in, +1.0); }

// ---------------------------------------------------------------------------
// Dense forward acquisition matrix, built entry-by-entry from the naive DFT
// formula (no library FFT anywhere): row (c*ny + ky)*nx + kx, column
// y*nx + x, entry mask(ky,kx) * dft(ky,kx;y,x) * maps(c,y,x).
// ---------------------------------------------------------------------------

inline Eigen::MatrixXcd dense_operator(const mri::CoilMaps& maps,
                                       const mri::SamplingMask& mask) {
  const int nc = maps.nc(), ny = maps.ny(), nx = maps.nx();
  const int cy = ny / 2, cxn = nx / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(ny) * nx);
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(nc) * ny * nx,
                     static_cast<Eigen::Index>(ny) * nx);
  A.setZero();
  for (int c = 0; c < nc; ++c)
    for (int ky = 0; ky < ny; ++ky)
      for (int kx = 0; kx < nx; ++kx) {
        if (mask.data.at(ky, kx) == 0) continue;
        const Eigen::Index row = (static_cast<Eigen::Index>(c) * ny + ky) * nx + kx;
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            const double phase =
                -2.0 * std::numbers::pi *
                (static_cast<double>((ky - cy) * (y - cy)) / ny +
                 static_cast<double>((kx - cxn) * (x - cxn)) / nx);
            A(row, static_cast<Eigen::Index>(y) * nx + x) =
                scale * cx{std::cos(phase), std::sin(phase)} * maps.data.at(c, y, x);
          }
      }
  return A;
}

inline Eigen::VectorXcd to_vec(const CxArray& a) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i];
  return v;
}

inline CxArray from_vec(const Eigen::VectorXcd& v, const std::vector<int>& shape) {
  CxArray a(shape);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = v[static_cast<Eigen::Index>(i)];
  return a;
}

inline Eigen::MatrixXcd to_mat(const CxArray& m) {
  const int r = m.shape(0), c = m.shape(1);
  Eigen::MatrixXcd out(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out(i, j) = m.at(i, j);
  return out;
}

/// Minimum-norm least-squares solution of A x = b via a rank-revealing
/// orthogonal decomposition (the solution Krylov iterations from zero
/// converge to).
inline Eigen::VectorXcd pinv_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
  return cod.solve(b);
}

// ---------------------------------------------------------------------------
// Dense multilevel 2-d Haar analysis matrix (orthonormal). One level on an
// m-point axis: first m/2 outputs (a+b)/sqrt(2) over adjacent pairs, last
// m/2 outputs (a-b)/sqrt(2). Level l acts on the top-left
// (n/2^l, n/2^l) block of the previous level's output.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd haar_level_matrix(int m) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < m / 2; ++i) {
    g(i, 2 * i) = s;
    g(i, 2 * i + 1) = s;
    g(m / 2 + i, 2 * i) = s;
    g(m / 2 + i, 2 * i + 1) = -s;
  }
  return g;
}

inline Eigen::MatrixXd dense_haar2(int n, int levels) {
  const Eigen::Index np = static_cast<Eigen::Index>(n) * n;
  Eigen::MatrixXd total = Eigen::MatrixXd::Identity(np, np);
  int m = n;
  for (int l = 0; l < levels; ++l) {
    // Embed the one-level transform of the top-left m x m block into the
    // full n x n pixel ordering.
    const Eigen::MatrixXd g = haar_level_matrix(m);
    Eigen::MatrixXd step = Eigen::MatrixXd::Identity(np, np);
    // 2-d one-level transform on the block: out[u,v] = sum_{y,x} g(u,y) g(v,x) in[y,x].
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v) {
        const Eigen::Index row = static_cast<Eigen::Index>(u) * n + v;
        for (Eigen::Index col = 0; col < np; ++col) step(row, col) = 0.0;
        for (int y = 0; y < m; ++y)
          for (int x = 0; x < m; ++x)
            step(row, static_cast<Eigen::Index>(y) * n + x) = g(u, y) * g(v, x);
      }
    total = step * total;
    m /= 2;
  }
  return total;
}

}  // namespace testutil
