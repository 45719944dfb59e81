#pragma once

#include "mri/array.hpp"

namespace mri {

/// Centered orthonormal 2-d DFT of the trailing [ny,nx] axes; any leading
/// axes are transformed slice by slice. Both directions carry the 1/sqrt(N)
/// factor, so fft2c and ifft2c are exact inverses and both are unitary:
///   fft2c  = shift . DFT  . shift^-1, scaled by 1/sqrt(ny*nx)
///   ifft2c = shift . IDFT . shift^-1, scaled by 1/sqrt(ny*nx)
/// Matrix sizes must be even, which makes the centering shift an involution.
CxArray fft2c(const CxArray& img);
CxArray ifft2c(const CxArray& ksp);

/// Circular shift of the trailing two axes by (ny/2, nx/2), i.e. swap the
/// four quadrants. For even sizes this is its own inverse.
CxArray fftshift2(const CxArray& a);

}  // namespace mri
