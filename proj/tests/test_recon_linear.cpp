#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mri/fft.hpp"
#include "mri/phantom.hpp"
#include "mri/recon_linear.hpp"
#include "mri/rng.hpp"

using namespace mri;
using testutil::random_cx;

namespace {

ImagingModel sim_model(int n, int nc, int accel, int acs, std::uint64_t seed) {
  MaskSpec spec;
  spec.accel = accel;
  spec.acs_lines = acs;
  SamplingMask mask = accel == 1 ? full_mask(n, n) : make_mask(n, spec);
  return ImagingModel(simulate_coils(n, nc, seed), std::move(mask), GridGeometry(n, n));
}

double real_nrmse(const RealArray& x, const RealArray& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("recon_linear") {

TEST_CASE("gradient step: matches the explicit update and reports the cost") {
  Rng rng(71);
  ImagingModel model = sim_model(8, 3, 2, 2, 81);
  CxArray m = random_cx({8, 8}, rng);
  KSpaceData d = random_cx({3, 8, 8}, rng);

  const double alpha = 0.7;
  double cost = -1.0;
  ComplexImage next = grad_step(m, d, model, alpha, &cost);

  KSpaceData r = apply_A(m, model);
  double want_cost = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= d[i];
    want_cost += std::norm(r[i]);
  }
  CHECK(cost == doctest::Approx(want_cost).epsilon(1e-12));
  ComplexImage g = apply_AH(r, model);
  for (std::size_t i = 0; i < next.size(); ++i) {
    const cx want = m[i] - alpha * g[i];
    CHECK(std::abs(next[i] - want) <= 1e-14);
  }

  CHECK_THROWS_AS(grad_step(m, KSpaceData({3, 6, 6}), model, alpha), DimensionError);
}

TEST_CASE("least-squares descent: fully sampled data solved in two iterations") {
  Rng rng(72);
  ImagingModel model = sim_model(8, 4, 1, 0, 82);
  CxArray truth = random_cx({8, 8}, rng);
  KSpaceData d = apply_A(truth, model);

  GdConfig cfg;
  cfg.alpha = 1.0;
  cfg.max_iter = 2;
  GdResult res = sense_gd(d, model, cfg);
  CHECK(testutil::rel_err(res.image, truth) < 1e-8);
  // History carries the cost at every visited iterate, start and end included.
  REQUIRE(res.cost_history.size() >= 2);
  CHECK(res.cost_history.front() == doctest::Approx(norm2(d) * norm2(d)).epsilon(1e-12));
  CHECK(res.cost_history.back() <= 1e-16 * res.cost_history.front());
}

TEST_CASE("least-squares descent: monotone cost for unit step size") {
  Rng rng(73);
  ImagingModel model = sim_model(16, 4, 2, 4, 83);
  KSpaceData d = apply_A(random_cx({16, 16}, rng), model);
  GdConfig cfg;
  cfg.alpha = 1.0;
  cfg.max_iter = 40;
  GdResult res = sense_gd(d, model, cfg);
  REQUIRE(res.cost_history.size() == 41);
  for (std::size_t i = 1; i < res.cost_history.size(); ++i)
    CHECK(res.cost_history[i] <= res.cost_history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("least-squares descent: relative-decrease stopping") {
  Rng rng(74);
  ImagingModel model = sim_model(16, 4, 2, 4, 84);
  // Random data is not in the range of the forward model, so the cost
  // bottoms out at a positive floor and the relative decrease goes to zero.
  // (Consistent data keeps shrinking geometrically and never triggers the
  // stop.)
  KSpaceData d = hadamard(random_cx({4, 16, 16}, rng), model.mask.as_real());
  GdConfig cfg;
  cfg.alpha = 1.0;
  cfg.max_iter = 500;
  cfg.tol = 1e-3;
  GdResult res = sense_gd(d, model, cfg);
  CHECK(res.cost_history.size() < 501);  // stopped early
  // The final recorded cost belongs to the returned image.
  KSpaceData r = apply_A(res.image, model);
  double cost = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) cost += std::norm(r[i] - d[i]);
  CHECK(cost == doctest::Approx(res.cost_history.back()).epsilon(1e-10));
}

TEST_CASE("least-squares descent: parameter validation") {
  Rng rng(75);
  ImagingModel model = sim_model(8, 2, 2, 2, 85);
  KSpaceData d = random_cx({2, 8, 8}, rng);
  GdConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(sense_gd(d, model, cfg), ParameterError);
  cfg.alpha = 2.0;
  CHECK_THROWS_AS(sense_gd(d, model, cfg), ParameterError);
  cfg.alpha = 1.0;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(sense_gd(d, model, cfg), ParameterError);

  CxArray raw = random_cx({2, 8, 8}, rng);
  ImagingModel un(CoilMaps(raw, false), full_mask(8, 8), GridGeometry(8, 8));
  cfg.max_iter = 5;
  CHECK_THROWS_AS(sense_gd(KSpaceData({2, 8, 8}), un, cfg), ParameterError);
}

TEST_CASE("descent and Krylov agree with the dense pseudo-inverse at 16x16, R=2") {
  Rng rng(76);
  CoilMaps maps = simulate_coils(16, 4, 86);
  MaskSpec spec;
  spec.accel = 2;
  spec.acs_lines = 4;
  SamplingMask mask = make_mask(16, spec);
  ImagingModel model(maps, mask, GridGeometry(16, 16));
  CxArray truth = random_cx({16, 16}, rng);
  KSpaceData d = apply_A(truth, model);

  const Eigen::MatrixXcd A = testutil::dense_operator(maps, mask);
  const Eigen::VectorXcd mstar = testutil::pinv_solve(A, testutil::to_vec(d));
  CxArray want = testutil::from_vec(mstar, truth.shape());

  SolveResult cg = sense_cg(d, model, 400, 1e-13);
  CHECK(testutil::rel_err(cg.x, want) < 1e-6);

  GdConfig cfg;
  cfg.alpha = 1.0;
  cfg.max_iter = 4000;
  GdResult gd = sense_gd(d, model, cfg);
  CHECK(testutil::rel_err(gd.image, want) < 1e-4);
}

TEST_CASE("Krylov solve from zero returns the minimum-norm solution when underdetermined") {
  Rng rng(77);
  CxArray ones({1, 8, 8});
  for (std::size_t i = 0; i < ones.size(); ++i) ones[i] = cx{1.0, 0.0};
  MaskSpec spec;
  spec.accel = 2;
  spec.acs_lines = 2;
  SamplingMask mask = make_mask(8, spec);
  ImagingModel model(CoilMaps(ones, true), mask, GridGeometry(8, 8));
  KSpaceData d = apply_A(random_cx({8, 8}, rng), model);

  const Eigen::MatrixXcd A = testutil::dense_operator(model.maps, mask);
  const Eigen::VectorXcd mn = testutil::pinv_solve(A, testutil::to_vec(d));
  SolveResult r = sense_cg(d, model, 300, 1e-13);
  CHECK(testutil::rel_err(r.x, testutil::from_vec(mn, r.x.shape())) < 1e-8);
}

TEST_CASE("multi-echo least-squares descent recovers echo images under full sampling") {
  Rng rng(78);
  ImagingModel model = sim_model(8, 3, 1, 0, 87);
  CxArray truth = random_cx({2, 8, 8}, rng);
  KSpaceData d = apply_A(truth, model);
  GdConfig cfg;
  cfg.alpha = 1.0;
  cfg.max_iter = 2;
  GdResult res = sense_gd(d, model, cfg);
  REQUIRE(res.image.ndim() == 3);
  CHECK(testutil::rel_err(res.image, truth) < 1e-8);
}

TEST_CASE("kernel interpolation beats zero filling on simulated data") {
  const int n = 32, nc = 4, accel = 2, acs = 12;
  CoilMaps maps = simulate_coils(n, nc, 88);
  ComplexImage img = shepp_logan(n);
  ImagingModel full_model(maps, full_mask(n, n), GridGeometry(n, n));
  KSpaceData full = apply_A(img, full_model);

  MaskSpec spec;
  spec.accel = accel;
  spec.acs_lines = acs;
  SamplingMask mask = make_mask(n, spec);
  KSpaceData d_us(full.shape());
  for (int c = 0; c < nc; ++c)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        d_us.at(c, y, x) = mask.data.at(y, x) ? full.at(c, y, x) : cx{0.0, 0.0};

  RealArray ref = rss_combine(ifft2c(full));

  AcsBlock acs_block = extract_acs(d_us, mask);
  GrappaKernel kernel = grappa_fit(acs_block, accel, 2, 3, 1e-6);
  KSpaceData filled = grappa_apply(d_us, mask, kernel);
  const double err_grappa = real_nrmse(rss_combine(ifft2c(filled)), ref);
  const double err_zf = real_nrmse(rss_combine(ifft2c(d_us)), ref);

  CHECK(err_grappa < 0.7 * err_zf);
  CHECK(err_grappa < 0.1);
}

TEST_CASE("root-sum-of-squares combination") {
  CxArray imgs({2, 2, 2});
  imgs.at(0, 0, 0) = cx{3.0, 0.0};
  imgs.at(1, 0, 0) = cx{0.0, 4.0};
  imgs.at(0, 1, 1) = cx{1.0, 1.0};
  imgs.at(1, 1, 1) = cx{-1.0, 1.0};
  RealArray out = rss_combine(imgs);
  REQUIRE(out.ndim() == 2);
  CHECK(out.at(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(out.at(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(out.at(0, 1) == 0.0);
  CHECK_THROWS_AS(rss_combine(CxArray({4, 4})), DimensionError);
}

}  // TEST_SUITE("recon_linear")
