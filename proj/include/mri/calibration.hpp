#pragma once

#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"

namespace mri {

/// Fully-sampled central k-space block used for kernel / map estimation.
struct AcsBlock {
  CxArray data;  // [nc, n_acs, nx]
  int row0 = 0;  // first ky line of the block within the full grid

  int nc() const { return data.shape(0); }
  int n_acs() const { return data.shape(1); }
  int nx() const { return data.shape(2); }
};

/// Interpolation weights mapping acquired neighborhoods to missing samples.
/// For each fractional line offset f = 1..R-1 there is one weight matrix
/// [nc_target, nc_source*nu*nv]; the source column layout is
/// (coil*nu + u)*nv + v with ky offsets (u - (nu-1)/2)*R - f in acquired-line
/// strides and centered kx offsets v - (nv-1)/2.
struct GrappaKernel {
  int accel = 1;
  int nu = 2;  // source ky blocks
  int nv = 3;  // source kx columns (odd)
  int nc = 1;
  std::vector<CxArray> weights;  // size accel-1, each [nc, nc*nu*nv]

  int cols() const { return nc * nu * nv; }
  int ky_offset(int u, int f) const { return (u - (nu - 1) / 2) * accel - f; }
  int kx_offset(int v) const { return v - (nv - 1) / 2; }
};

/// Vectorized sliding calibration windows from an ACS block.
struct CalibrationMatrix {
  CxArray rows;  // [n_windows, nc*ky_k*kx_k], column layout (c*ky_k + dy)*kx_k + dx
  int ky_k = 0;
  int kx_k = 0;
  int nc = 0;
};

/// Returns the centered fully-sampled block declared by the mask, verifying
/// every returned line is actually sampled.
AcsBlock extract_acs(const KSpaceData& d, const SamplingMask& mask);

/// Fits per-target-coil interpolation weights by ridge-regularized least
/// squares over all source/target pairs the ACS block provides. The ridge
/// term is tikhonov * trace(S^H S)/n_cols.
GrappaKernel grappa_fit(const AcsBlock& acs, int accel, int nu, int nv, double tikhonov);

/// Builds the sliding-window calibration matrix (exposed for testing).
CalibrationMatrix calib_matrix(const AcsBlock& acs, int ky_k, int kx_k);

/// Coil sensitivity estimation from the dominant per-pixel eigenvector of
/// the image-domain signal-subspace operator. Pixels whose eigenvalue falls
/// below eig_crop get zero maps; elsewhere maps are unit-norm per pixel with
/// the largest-magnitude coil component rotated to the positive real axis.
CoilMaps espirit_maps(const AcsBlock& acs, int ky_k, int kx_k, double sigma_rel,
                      double eig_crop, int full_ny, int full_nx);

}  // namespace mri
