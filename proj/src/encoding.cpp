#include "mri/encoding.hpp"

#include <cmath>

namespace mri {

void CoilMaps::check_normalized() const {
  const int n_c = nc();
  const std::size_t px = static_cast<std::size_t>(ny()) * nx();
  for (std::size_t p = 0; p < px; ++p) {
    double s = 0.0;
    for (int c = 0; c < n_c; ++c) s += std::norm(data[static_cast<std::size_t>(c) * px + p]);
    if (s > 0.0 && std::abs(s - 1.0) > 1e-10)
      throw ParameterError("CoilMaps: declared normalized but sum|c|^2 deviates from 1 by " +
                           std::to_string(std::abs(s - 1.0)));
  }
}

SamplingMask SamplingMask::from_data(ByteArray d, int acs) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.size(); ++i) count += (d[i] != 0);
  if (count == 0) throw ParameterError("SamplingMask: empty pattern");
  const double frac = static_cast<double>(count) / static_cast<double>(d.size());
  const int r = std::max(1, static_cast<int>(std::lround(1.0 / frac)));
  return SamplingMask(std::move(d), r, acs);
}

std::size_t SamplingMask::sampled_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) count += (data[i] != 0);
  return count;
}

bool SamplingMask::line_sampled(int ky) const {
  if (multi_echo())
    throw DimensionError("SamplingMask::line_sampled: needs a 2-d mask");
  for (int x = 0; x < nx(); ++x)
    if (data.at(ky, x) != 0) return true;
  return false;
}

RealArray SamplingMask::as_real() const {
  RealArray out(data.shape());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i] ? 1.0 : 0.0;
  return out;
}

void SamplingMask::validate() const {
  if (data.ndim() != 2 && data.ndim() != 3)
    throw DimensionError("SamplingMask: expected [ny,nx] or [ne,ny,nx], got " +
                         data.shape_str());
  if (accel < 1) throw ParameterError("SamplingMask: acceleration must be >= 1");
  if (acs_lines < 0) throw ParameterError("SamplingMask: acs_lines must be >= 0");
  if (acs_lines >= ny()) throw ParameterError("SamplingMask: acs_lines must be < ny");
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] != 0 && data[i] != 1)
      throw ParameterError("SamplingMask: entries must be 0 or 1");
    count += (data[i] != 0);
  }
  if (count == 0) throw ParameterError("SamplingMask: at least one sample required");
  const double frac = static_cast<double>(count) / static_cast<double>(data.size());
  const double r = static_cast<double>(accel);
  if (frac < 0.5 / r - 1e-12 || frac > 2.0 / r + 1e-12)
    throw ParameterError("SamplingMask: sampled fraction " + std::to_string(frac) +
                         " outside [0.5/R, 2/R] for declared R=" + std::to_string(accel));
}

ImagingModel::ImagingModel(CoilMaps m, SamplingMask p, GridGeometry g)
    : maps(std::move(m)), mask(std::move(p)), geometry(g) {
  if (maps.ny() != geometry.ny || maps.nx() != geometry.nx)
    throw DimensionError("ImagingModel: coil maps " + maps.data.shape_str() +
                         " do not match the grid");
  if (mask.ny() != geometry.ny || mask.nx() != geometry.nx)
    throw DimensionError("ImagingModel: mask " + mask.data.shape_str() +
                         " does not match the grid");
}

namespace {

void check_image(const ComplexImage& m, const ImagingModel& model, const char* who) {
  if (m.ndim() != 2 && m.ndim() != 3)
    throw DimensionError(std::string(who) + ": image must be [ny,nx] or [ne,ny,nx]");
  if (m.ny() != model.geometry.ny || m.nx() != model.geometry.nx)
    throw DimensionError(std::string(who) + ": image " + m.shape_str() +
                         " does not match the grid");
  const int ne = m.ndim() == 3 ? m.shape(0) : 1;
  if (model.mask.multi_echo() && model.mask.ne() != ne)
    throw DimensionError(std::string(who) + ": echo count mismatch between image and mask");
}

}  // namespace

KSpaceData apply_A(const ComplexImage& m, const ImagingModel& model) {
  check_image(m, model, "apply_A");
  const int nc = model.nc();
  const int ny = model.geometry.ny, nx = model.geometry.nx;
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  const bool echoed = m.ndim() == 3;
  const int ne = echoed ? m.shape(0) : 1;

  KSpaceData out(echoed ? std::vector<int>{nc, ne, ny, nx} : std::vector<int>{nc, ny, nx});
  CxArray slice({ny, nx});
  for (int c = 0; c < nc; ++c) {
    const cx* map = model.maps.data.data() + static_cast<std::size_t>(c) * px;
    for (int e = 0; e < ne; ++e) {
      const cx* img = m.data() + static_cast<std::size_t>(echoed ? e : 0) * px;
      for (std::size_t i = 0; i < px; ++i) slice[i] = map[i] * img[i];
      CxArray k = fft2c(slice);
      const std::uint8_t* msk = model.mask.data.data() +
                                (model.mask.multi_echo() ? static_cast<std::size_t>(e) * px : 0);
      cx* dst = out.data() + (static_cast<std::size_t>(c) * ne + e) * px;
      for (std::size_t i = 0; i < px; ++i) dst[i] = msk[i] ? k[i] : cx{0.0, 0.0};
    }
  }
  return out;
}

ComplexImage apply_AH(const KSpaceData& d, const ImagingModel& model) {
  const int nc = model.nc();
  const int ny = model.geometry.ny, nx = model.geometry.nx;
  const std::size_t px = static_cast<std::size_t>(ny) * nx;
  const bool echoed = d.ndim() == 4;
  if (!echoed && d.ndim() != 3)
    throw DimensionError("apply_AH: data must be [nc,ny,nx] or [nc,ne,ny,nx]");
  if (d.shape(0) != nc || d.ny() != ny || d.nx() != nx)
    throw DimensionError("apply_AH: data " + d.shape_str() + " does not match the model");
  const int ne = echoed ? d.shape(1) : 1;
  if (model.mask.multi_echo() && model.mask.ne() != ne)
    throw DimensionError("apply_AH: echo count mismatch between data and mask");

  ComplexImage out(echoed ? std::vector<int>{ne, ny, nx} : std::vector<int>{ny, nx});
  CxArray slice({ny, nx});
  for (int c = 0; c < nc; ++c) {
    const cx* map = model.maps.data.data() + static_cast<std::size_t>(c) * px;
    for (int e = 0; e < ne; ++e) {
      const cx* src = d.data() + (static_cast<std::size_t>(c) * ne + e) * px;
      const std::uint8_t* msk = model.mask.data.data() +
                                (model.mask.multi_echo() ? static_cast<std::size_t>(e) * px : 0);
      for (std::size_t i = 0; i < px; ++i) slice[i] = msk[i] ? src[i] : cx{0.0, 0.0};
      CxArray img = ifft2c(slice);
      cx* dst = out.data() + static_cast<std::size_t>(echoed ? e : 0) * px;
      for (std::size_t i = 0; i < px; ++i) dst[i] += std::conj(map[i]) * img[i];
    }
  }
  return out;
}

SolveResult cg_normal(const KSpaceData& d, const ImagingModel& model, double lambda,
                      const ComplexImage* z, int max_iter, double tol,
                      const ComplexImage* m0) {
  if (lambda < 0.0) throw ParameterError("cg_normal: lambda must be >= 0");
  if (lambda > 0.0 && z == nullptr)
    throw ParameterError("cg_normal: lambda > 0 requires a prior image z");

  CxArray b = apply_AH(d, model);
  if (lambda > 0.0) {
    if (!z->same_shape(b))
      throw DimensionError("cg_normal: prior image z has shape " + z->shape_str() +
                           ", expected " + b.shape_str());
    axpy(cx{lambda, 0.0}, *z, b);
  }
  auto H = [&](const CxArray& x) {
    CxArray y = apply_AH(apply_A(x, model), model);
    if (lambda > 0.0) axpy(cx{lambda, 0.0}, x, y);
    return y;
  };
  return solve_hermitian(H, b, max_iter, tol, m0);
}

}  // namespace mri
