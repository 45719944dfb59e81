#pragma once

#include <cmath>
#include <complex>

#include "mri/array.hpp"
#include "mri/errors.hpp"

namespace mri {

/// Cartesian sampling grid. Matrix sizes must be even so that the centered
/// transform shift is an involution; dk is the k-space pitch 1/FOV and
/// wk = n*dk is the sampled bandwidth per axis.
struct GridGeometry {
  int ny = 0;
  int nx = 0;
  double dky = 1.0;
  double dkx = 1.0;

  GridGeometry() = default;
  GridGeometry(int ny_, int nx_, double dky_ = 1.0, double dkx_ = 1.0)
      : ny(ny_), nx(nx_), dky(dky_), dkx(dkx_) {
    if (ny < 2 || nx < 2 || ny % 2 != 0 || nx % 2 != 0)
      throw ParameterError("GridGeometry: matrix sizes must be even and >= 2");
    if (dky <= 0.0 || dkx <= 0.0)
      throw ParameterError("GridGeometry: k-space pitch must be positive");
  }

  double wky() const { return ny * dky; }
  double wkx() const { return nx * dkx; }
  std::size_t pixels() const {
    return static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx);
  }
};

/// <x, y> = sum_i conj(x_i) * y_i  (conjugate-linear in the first argument).
inline cx inner_product(const CxArray& x, const CxArray& y) {
  if (x.size() != y.size())
    throw DimensionError("inner_product: size mismatch " + x.shape_str() + " vs " +
                         y.shape_str());
  cx acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

/// Euclidean norm sqrt(<x, x>).
inline double norm2(const CxArray& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i]);
  return std::sqrt(acc);
}

inline double norm2(const RealArray& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * x[i];
  return std::sqrt(acc);
}

/// y <- a*x + y, shapes must match exactly.
inline void axpy(cx a, const CxArray& x, CxArray& y) {
  if (!x.same_shape(y))
    throw DimensionError("axpy: shape mismatch " + x.shape_str() + " vs " +
                         y.shape_str());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

/// Elementwise product with trailing-axis broadcast: if `b` has fewer axes
/// than `a`, its shape must equal the trailing axes of `a` and it is repeated
/// over the leading axes (e.g. a [nc,ny,nx] stack times a [ny,nx] mask).
inline CxArray hadamard(const CxArray& a, const CxArray& b) {
  if (b.ndim() > a.ndim())
    throw DimensionError("hadamard: second factor has more axes than first");
  const int off = a.ndim() - b.ndim();
  for (int i = 0; i < b.ndim(); ++i)
    if (a.shape(off + i) != b.shape(i))
      throw DimensionError("hadamard: trailing shape mismatch " + a.shape_str() +
                           " vs " + b.shape_str());
  CxArray out = a;
  const std::size_t block = b.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i % block];
  return out;
}

inline CxArray hadamard(const CxArray& a, const RealArray& b) {
  if (b.ndim() > a.ndim())
    throw DimensionError("hadamard: second factor has more axes than first");
  const int off = a.ndim() - b.ndim();
  for (int i = 0; i < b.ndim(); ++i)
    if (a.shape(off + i) != b.shape(i))
      throw DimensionError("hadamard: trailing shape mismatch " + a.shape_str() +
                           " vs " + b.shape_str());
  CxArray out = a;
  const std::size_t block = b.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i % block];
  return out;
}

/// x <- s*x for scalar s.
inline void scale(cx s, CxArray& x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= s;
}

/// Elementwise conjugate.
inline CxArray conj(const CxArray& a) {
  CxArray out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(out[i]);
  return out;
}

/// Elementwise magnitude as a real array of the same shape.
inline RealArray magnitude(const CxArray& a) {
  RealArray out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::abs(a[i]);
  return out;
}

}  // namespace mri
