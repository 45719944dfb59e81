#include "mri/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "mri/errors.hpp"

namespace mri {
namespace {

// Plan cache keyed by (ny, nx, sign). Plans are created with FFTW_ESTIMATE
// and FFTW_UNALIGNED so they can be replayed on any caller buffer via
// fftw_execute_dft. FFTW planning is not thread-safe, hence the mutex.
class PlanCache {
public:
  fftw_plan get(int ny, int nx, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(ny, nx, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(ny) * nx);
    fftw_plan p = fftw_plan_dft_2d(ny, nx, scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_[key] = p;
    return p;
  }

private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void check_even_2d(const CxArray& a, const char* who) {
  if (a.ndim() < 2)
    throw DimensionError(std::string(who) + ": need at least 2 axes, got " +
                         a.shape_str());
  if (a.ny() % 2 != 0 || a.nx() % 2 != 0)
    throw DimensionError(std::string(who) + ": trailing axes must be even, got " +
                         a.shape_str());
}

// In-place half-size circular shift of one [ny,nx] slice (even sizes only).
void shift_slice(cx* s, int ny, int nx) {
  const int hy = ny / 2, hx = nx / 2;
  for (int y = 0; y < hy; ++y) {
    cx* row = s + static_cast<std::size_t>(y) * nx;
    cx* opp = s + static_cast<std::size_t>(y + hy) * nx;
    for (int x = 0; x < hx; ++x) {
      std::swap(row[x], opp[x + hx]);        // Q1 <-> Q4
      std::swap(row[x + hx], opp[x]);        // Q2 <-> Q3
    }
  }
}

CxArray transform(const CxArray& in, int sign) {
  check_even_2d(in, sign == FFTW_FORWARD ? "fft2c" : "ifft2c");
  const int ny = in.ny(), nx = in.nx();
  const std::size_t slice = static_cast<std::size_t>(ny) * nx;
  const std::size_t nslices = in.size() / slice;
  const double scale = 1.0 / std::sqrt(static_cast<double>(slice));

  CxArray out = in;
  fftw_plan plan = cache().get(ny, nx, sign);
  for (std::size_t s = 0; s < nslices; ++s) {
    cx* p = out.data() + s * slice;
    shift_slice(p, ny, nx);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(p),
                     reinterpret_cast<fftw_complex*>(p));
    shift_slice(p, ny, nx);
    for (std::size_t i = 0; i < slice; ++i) p[i] *= scale;
  }
  return out;
}

}  // namespace

CxArray fft2c(const CxArray& img) { return transform(img, FFTW_FORWARD); }

CxArray ifft2c(const CxArray& ksp) { return transform(ksp, FFTW_BACKWARD); }

CxArray fftshift2(const CxArray& a) {
  check_even_2d(a, "fftshift2");
  const int ny = a.ny(), nx = a.nx();
  const std::size_t slice = static_cast<std::size_t>(ny) * nx;
  CxArray out = a;
  for (std::size_t s = 0; s < out.size() / slice; ++s)
    shift_slice(out.data() + s * slice, ny, nx);
  return out;
}

}  // namespace mri
