#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mri/fft.hpp"
#include "mri/recon_linear.hpp"
#include "mri/recon_lowrank.hpp"
#include "mri/rng.hpp"

using namespace mri;
using testutil::random_cx;

namespace {

// Multi-coil k-space built from a few 2-d complex exponentials; every sliding
// patch of such data is a fixed profile scaled by the top-left sample, so the
// lifted matrix has rank at most the number of exponentials.
KSpaceData exponential_kspace(int nc, int n, int terms, std::uint64_t seed) {
  Rng rng(seed);
  KSpaceData d = KSpaceData::zeros({nc, n, n});
  for (int j = 0; j < terms; ++j) {
    const double fy = rng.uniform() * 0.8 + 0.05;
    const double fx = rng.uniform() * 0.8 + 0.05;
    for (int c = 0; c < nc; ++c) {
      const double amp = 0.5 + rng.uniform();
      const double ph0 = 2.0 * M_PI * rng.uniform();
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const double ph = ph0 + 2.0 * M_PI * (fy * y + fx * x);
          d.at(c, y, x) += amp * cx{std::cos(ph), std::sin(ph)};
        }
    }
  }
  return d;
}

SamplingMask random_entry_mask(int n, double fraction, std::uint64_t seed) {
  Rng rng(seed);
  ByteArray data = ByteArray::zeros({n, n});
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (rng.uniform() < fraction) {
      data[i] = 1;
      ++count;
    }
  }
  if (count == 0) data[0] = 1;
  return SamplingMask::from_data(std::move(data));
}

Eigen::VectorXd singvals(const CxArray& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(testutil::to_mat(m));
  return svd.singularValues();
}

}  // namespace

TEST_SUITE("recon_lowrank") {

TEST_CASE("patch lift: layout, multiplicity, and validation") {
  Rng rng(111);
  KSpaceData d = random_cx({2, 4, 4}, rng);
  LiftedMatrix lm = hankel_build(d, 1);
  REQUIRE(lm.matrix.shape(0) == 4);       // 2x2 window positions
  REQUIRE(lm.matrix.shape(1) == 2 * 9);   // nc * patch
  int row = 0;
  for (int y0 = 0; y0 < 2; ++y0)
    for (int x0 = 0; x0 < 2; ++x0) {
      for (int c = 0; c < 2; ++c)
        for (int dy = 0; dy < 3; ++dy)
          for (int dx = 0; dx < 3; ++dx)
            CHECK(lm.matrix.at(row, (c * 3 + dy) * 3 + dx) == d.at(c, y0 + dy, x0 + dx));
      ++row;
    }

  // Multiplicity equals a brute-force count of covering windows.
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      int count = 0;
      for (int y0 = 0; y0 < 2; ++y0)
        for (int x0 = 0; x0 < 2; ++x0)
          if (y >= y0 && y < y0 + 3 && x >= x0 && x < x0 + 3) ++count;
      CHECK(lm.multiplicity.at(y, x) == static_cast<double>(count));
      CHECK(lm.multiplicity.at(y, x) >= 1.0);
    }

  CHECK_THROWS_AS(hankel_build(d, -1), ParameterError);
  CHECK_THROWS_AS(hankel_build(d, 2), DimensionError);  // 5x5 patch on 4x4 grid
  CHECK_THROWS_AS(hankel_build(CxArray({4, 4}), 1), DimensionError);
}

TEST_CASE("patch lift: radius zero is a reshape") {
  Rng rng(112);
  KSpaceData d = random_cx({2, 4, 4}, rng);
  LiftedMatrix lm = hankel_build(d, 0);
  REQUIRE(lm.matrix.shape(0) == 16);
  REQUIRE(lm.matrix.shape(1) == 2);
  for (std::size_t i = 0; i < lm.multiplicity.size(); ++i) CHECK(lm.multiplicity[i] == 1.0);
  KSpaceData back = unlift_average(lm);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(back[i] == d[i]);
}

TEST_CASE("scatter-add is the exact adjoint of the lift") {
  Rng rng(113);
  KSpaceData d = random_cx({2, 6, 8}, rng);
  LiftedMatrix lifted = hankel_build(d, 1);

  LiftedMatrix probe = lifted;
  probe.matrix = random_cx(lifted.matrix.shape(), rng);
  const cx lhs = inner_product(lifted.matrix, probe.matrix);
  const cx rhs = inner_product(d, hankel_adjoint(probe));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * norm2(lifted.matrix) * norm2(probe.matrix));

  // Adjoint-of-lift weights every sample by its window count.
  KSpaceData weighted = hankel_adjoint(lifted);
  const std::size_t px = 6 * 8;
  for (int c = 0; c < 2; ++c)
    for (std::size_t p = 0; p < px; ++p) {
      const cx want = d[c * px + p] * lifted.multiplicity[p];
      CHECK(std::abs(weighted[c * px + p] - want) <= 1e-13 * std::abs(want));
    }

  LiftedMatrix broken = lifted;
  broken.matrix = CxArray({3, 3});
  CHECK_THROWS_AS(hankel_adjoint(broken), DimensionError);
}

TEST_CASE("multiplicity-normalized unlift inverts the lift") {
  Rng rng(114);
  SUBCASE("bit-exact on integer-valued data") {
    KSpaceData d({2, 8, 8});
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = cx{std::floor(rng.uniform() * 9.0) - 4.0, std::floor(rng.uniform() * 9.0) - 4.0};
    KSpaceData back = unlift_average(hankel_build(d, 2));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back[i] == d[i]);
  }
  SUBCASE("to rounding on generic data") {
    KSpaceData d = random_cx({3, 10, 12}, rng);
    KSpaceData back = unlift_average(hankel_build(d, 1));
    CHECK(testutil::rel_err(back, d) < 1e-14);
  }
}

TEST_CASE("hard rank projection matches the Gram-matrix oracle") {
  Rng rng(115);
  CxArray m = random_cx({20, 12}, rng);
  const Eigen::MatrixXcd M = testutil::to_mat(m);

  // Oracle: eigenvectors of M^H M give the right singular subspace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M.adjoint() * M);
  const Eigen::MatrixXcd V = eig.eigenvectors();   // ascending eigenvalues
  const Eigen::VectorXd lam = eig.eigenvalues();

  auto to_cx = [](const Eigen::MatrixXcd& w) {
    CxArray out({static_cast<int>(w.rows()), static_cast<int>(w.cols())});
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) out.at(r, c) = w(r, c);
    return out;
  };
  for (int ell : {1, 3, 7, 12}) {
    auto [proj, residual] = rank_project(m, ell);
    const Eigen::MatrixXcd Vl = V.rightCols(ell);
    CHECK(testutil::rel_err(proj, to_cx(M * Vl * Vl.adjoint())) < 1e-10);
    double tail = 0.0;
    for (int i = 0; i < 12 - ell; ++i) tail += lam(i);
    if (tail > 0.0)
      CHECK(residual == doctest::Approx(tail).epsilon(1e-10));
    else
      CHECK(residual <= 1e-18);
  }

  // Projecting an exactly rank-2 matrix at ell = 2 is the identity.
  CxArray low({6, 5});
  Rng rng2(116);
  CxArray a = random_cx({6, 2}, rng2), b = random_cx({2, 5}, rng2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 5; ++c) {
      cx acc{0.0, 0.0};
      for (int k = 0; k < 2; ++k) acc += a.at(r, k) * b.at(k, c);
      low.at(r, c) = acc;
    }
  auto [same, res2] = rank_project(low, 2);
  CHECK(testutil::rel_err(same, low) < 1e-12);
  CHECK(res2 <= 1e-20 * norm2(low) * norm2(low));

  CHECK_THROWS_AS(rank_project(m, 0), ParameterError);
  CHECK_THROWS_AS(rank_project(m, 13), ParameterError);
  CHECK_THROWS_AS(rank_project(CxArray({2, 2, 2}), 1), DimensionError);
}

TEST_CASE("singular-value shrinkage is the nuclear-norm proximal map") {
  Rng rng(117);
  CxArray m = random_cx({10, 8}, rng);
  const double tau = 0.8;
  CxArray y = svt(m, tau);

  // Singular values shift down by tau and clip at zero.
  Eigen::VectorXd sm = singvals(m);
  Eigen::VectorXd sy = singvals(y);
  for (int i = 0; i < sy.size(); ++i)
    CHECK(sy(i) == doctest::Approx(std::max(sm(i) - tau, 0.0)).epsilon(1e-10));

  // Objective 0.5||Y-M||_F^2 + tau||Y||_* is not beaten by other candidates.
  auto nuclear = [](const CxArray& a) {
    Eigen::VectorXd s = singvals(a);
    return s.sum();
  };
  auto objective = [&](const CxArray& cand) {
    double fro = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) fro += std::norm(cand[i] - m[i]);
    return 0.5 * fro + tau * nuclear(cand);
  };
  const double fstar = objective(y);
  CHECK(fstar <= objective(m) + 1e-12);
  CHECK(fstar <= objective(CxArray::zeros(m.shape())) + 1e-12);
  for (int t = 0; t < 5; ++t) {
    CxArray cand = y;
    CxArray delta = random_cx(m.shape(), rng);
    axpy(cx{0.01, 0.0}, delta, cand);
    CHECK(fstar <= objective(cand) + 1e-12);
  }

  // Large tau annihilates the matrix; tau = 0 reproduces it.
  CxArray zeroed = svt(m, sm(0) + 1.0);
  CHECK(norm2(zeroed) <= 1e-12 * norm2(m));
  CHECK(testutil::rel_err(svt(m, 0.0), m) < 1e-12);

  CHECK_THROWS_AS(svt(m, -0.5), ParameterError);
  CHECK_THROWS_AS(svt(CxArray({8}), 0.1), DimensionError);
}

TEST_CASE("alternating completion recovers structured data from 30% of entries") {
  const int n = 32;
  KSpaceData full = exponential_kspace(1, n, 4, 118);
  SamplingMask mask = random_entry_mask(n, 0.3, 119);

  KSpaceData d_us = full;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (mask.data.at(y, x) == 0) d_us.at(0, y, x) = cx{0.0, 0.0};

  HankelConfig cfg;
  cfg.radius = 2;
  cfg.rank_ell = 4;
  cfg.max_iter = 100;
  cfg.tol = 1e-9;
  std::vector<double> history;
  KSpaceData completed = lowrank_complete(d_us, mask, cfg, &history);

  CHECK(testutil::rel_err(completed, full) < 1e-3);
  REQUIRE(!history.empty());
  CHECK(history.size() <= 100);

  // Acquired entries are the measurements, bit-exactly.
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (mask.data.at(y, x) == 1) CHECK(completed.at(0, y, x) == full.at(0, y, x));
}

TEST_CASE("soft-threshold completion improves on zero filling") {
  const int n = 24;
  KSpaceData full = exponential_kspace(2, n, 3, 120);
  SamplingMask mask = random_entry_mask(n, 0.4, 121);
  KSpaceData d_us = full;
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (mask.data.at(y, x) == 0) d_us.at(c, y, x) = cx{0.0, 0.0};

  HankelConfig cfg;
  cfg.radius = 2;
  // The entries here have magnitude ~1, so patch-matrix singular values sit
  // well above 2; this shrinkage level reaches ~0.11 relative error within
  // the iteration budget (smaller values converge too slowly to clear 0.5x).
  cfg.tau = 2.0;
  cfg.max_iter = 80;
  KSpaceData completed = lowrank_complete(d_us, mask, cfg);
  CHECK(testutil::rel_err(completed, full) < 0.5 * testutil::rel_err(d_us, full));
}

TEST_CASE("completion configuration validation") {
  Rng rng(122);
  KSpaceData d = random_cx({1, 8, 8}, rng);
  SamplingMask mask = random_entry_mask(8, 0.5, 123);

  HankelConfig cfg;  // neither rank_ell nor tau set
  CHECK_THROWS_AS(lowrank_complete(d, mask, cfg), ParameterError);
  cfg.rank_ell = 2;
  cfg.tau = 0.5;  // both set
  CHECK_THROWS_AS(lowrank_complete(d, mask, cfg), ParameterError);
  cfg.tau = 0.0;
  cfg.radius = -1;
  CHECK_THROWS_AS(lowrank_complete(d, mask, cfg), ParameterError);
  cfg.radius = 2;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(lowrank_complete(d, mask, cfg), ParameterError);
  cfg.max_iter = 10;
  CHECK_THROWS_AS(lowrank_complete(CxArray({8, 8}), mask, cfg), DimensionError);
  CHECK_THROWS_AS(lowrank_complete(random_cx({1, 6, 6}, rng), mask, cfg), DimensionError);
}

TEST_CASE("image-domain output is the coil-combined magnitude") {
  const int n = 16;
  KSpaceData full = exponential_kspace(2, n, 2, 124);
  SamplingMask mask = random_entry_mask(n, 0.5, 125);
  KSpaceData d_us = full;
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (mask.data.at(y, x) == 0) d_us.at(c, y, x) = cx{0.0, 0.0};

  HankelConfig cfg;
  cfg.radius = 1;
  cfg.rank_ell = 2;
  cfg.max_iter = 30;
  ComplexImage img = lowrank_recon(d_us, mask, cfg);
  REQUIRE(img.ndim() == 2);
  REQUIRE(img.ny() == n);

  KSpaceData completed = lowrank_complete(d_us, mask, cfg);
  RealArray want = rss_combine(ifft2c(completed));
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(img[i].imag() == 0.0);
    CHECK(img[i].real() == want[i]);
  }
}

}  // TEST_SUITE("recon_lowrank")
