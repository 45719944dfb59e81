#pragma once

#include "mri/array.hpp"

namespace mri {

/// Magnitude-domain normalized root-mean-square error:
///   || |x| - |ref| ||_2 / || ref ||_2.
/// Throws ParameterError when ref is identically zero.
double nrmse(const CxArray& x, const CxArray& ref);
double nrmse(const RealArray& x, const RealArray& ref);

/// Peak signal-to-noise ratio in dB over magnitudes,
///   10 log10( max|ref|^2 / MSE(|x|, |ref|) ),
/// +infinity when the MSE is zero.
double psnr(const CxArray& x, const CxArray& ref);
double psnr(const RealArray& x, const RealArray& ref);

/// Mean local structural similarity over magnitudes normalized by max|ref|,
/// uniform window (default 7x7), standard stability constants. Uses every
/// fully-interior window position; images must be at least window x window.
double ssim(const CxArray& x, const CxArray& ref, int window = 7, double k1 = 0.01,
            double k2 = 0.03);
double ssim(const RealArray& x, const RealArray& ref, int window = 7, double k1 = 0.01,
            double k2 = 0.03);

}  // namespace mri
