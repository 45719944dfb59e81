// mrecon: simulate, calibrate, reconstruct, and score MRI k-space data.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mri/bench.hpp"
#include "mri/calibration.hpp"
#include "mri/config.hpp"
#include "mri/io.hpp"
#include "mri/metrics.hpp"
#include "mri/recon_dip.hpp"
#include "mri/recon_linear.hpp"
#include "mri/recon_lowrank.hpp"
#include "mri/recon_pnp.hpp"
#include "mri/recon_sparse.hpp"
#include "mri/recon_subspace.hpp"
#include "mri/rng.hpp"
#include "mri/signal_models.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kFormat = 3;
constexpr int kNotConverged = 4;
constexpr int kSelftestFail = 5;

void emit_error(int code, const std::string& message, const std::string& context) {
  json e;
  e["code"] = code;
  e["message"] = message;
  e["context"] = context;
  std::cerr << e.dump() << "\n";
}

mri::SamplingMask load_mask(const std::string& path) {
  mri::ArrayHeader h;
  mri::ByteArray data = mri::read_bytes(path, &h);
  int accel = 0, acs = 0;
  if (h.meta.is_object()) {
    accel = h.meta.value("accel", 0);
    acs = h.meta.value("acs", 0);
  }
  if (accel >= 1) return mri::SamplingMask(std::move(data), accel, acs);
  return mri::SamplingMask::from_data(std::move(data), acs);
}

std::vector<std::string> image_dims(const mri::CxArray& a, bool leading_is_echo = false) {
  switch (a.ndim()) {
    case 2: return {"ky", "kx"};
    case 3: return leading_is_echo ? std::vector<std::string>{"echo", "ky", "kx"}
                                   : std::vector<std::string>{"coil", "ky", "kx"};
    case 4: return {"coil", "echo", "ky", "kx"};
    default: throw mri::DimensionError("unsupported array rank for writing");
  }
}

/// Restores unit per-pixel coil norm after the float32 file round trip.
mri::CoilMaps load_maps(const std::string& path) {
  mri::CxArray m = mri::read_complex(path);
  if (m.ndim() != 3) throw mri::DimensionError("maps: expected [coil,ky,kx]");
  const std::size_t px = static_cast<std::size_t>(m.ny()) * m.nx();
  const int nc = m.shape(0);
  for (std::size_t p = 0; p < px; ++p) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += std::norm(m[static_cast<std::size_t>(c) * px + p]);
    if (s > 0.0) {
      const double inv = 1.0 / std::sqrt(s);
      for (int c = 0; c < nc; ++c) m[static_cast<std::size_t>(c) * px + p] *= inv;
    }
  }
  return mri::CoilMaps(std::move(m), true);
}

std::vector<double> te_list_from(const json& sim) {
  const int ne = sim.at("echoes").get<int>();
  const double te0 = sim.at("te_first").get<double>();
  const double dte = sim.at("te_spacing").get<double>();
  std::vector<double> te;
  for (int e = 0; e < ne; ++e) te.push_back(te0 + dte * e);
  return te;
}

mri::Dictionary dict_from_config(const json& sub, const std::vector<double>& te) {
  std::vector<double> grid;
  const double lo = sub.at("t2_min").get<double>();
  const double hi = sub.at("t2_max").get<double>();
  const double step = sub.at("t2_step").get<double>();
  if (step <= 0.0) throw mri::ParameterError("subspace.t2_step must be > 0");
  for (double t2 = lo; t2 <= hi + 1e-9; t2 += step) grid.push_back(t2);
  const double extra = sub.at("t2_extra").get<double>();
  if (extra > 0.0 && extra > grid.back()) grid.push_back(extra);
  return mri::dict_generate(grid, te);
}

// ---------------------------------------------------------------- sim ----
int run_sim(const std::string& model, int size, int coils, std::uint64_t seed,
            const std::string& out_dir, const json& cfg) {
  std::filesystem::create_directories(out_dir);
  mri::TissueMaps tissue = mri::quant_phantom(size);
  mri::CoilMaps maps = mri::simulate_coils(
      size, coils, seed, cfg.at("simulation").at("coil_width").get<double>());
  const json& sim = cfg.at("simulation");
  const double tr = sim.at("tr").get<double>();

  mri::ComplexImage truth;
  std::vector<double> te;
  if (model == "multiecho") {
    te = te_list_from(sim);
    if (te.size() < 2)
      throw mri::ParameterError("sim multiecho: set simulation.echoes >= 2 in the config");
    truth = mri::synth_multiecho(tissue, te, tr);
  } else {
    mri::SequenceParams params;
    params.tr = tr;
    if (model == "t1w") {
      params.te = {15.0};
      params.tr = 500.0;
    } else if (model == "t2w") {
      params.te = {sim.at("te_first").get<double>()};
    } else if (model == "pd") {
      params.te = {15.0};
    } else if (model == "dwi") {
      params.te = {sim.at("te_first").get<double>()};
      params.b = sim.at("b_value").get<double>() > 0.0 ? sim.at("b_value").get<double>()
                                                       : 1000.0;
    } else {
      throw mri::ParameterError("sim: unknown model '" + model + "'");
    }
    truth = mri::synth_image(tissue, params);
    te = params.te;
  }

  mri::GridGeometry geom(size, size);
  mri::SamplingMask full = mri::full_mask(size, size);
  mri::ImagingModel fm(maps, full, geom);
  mri::KSpaceData ksp = mri::apply_A(truth, fm);

  json prov{{"seed", seed}, {"model", model}};
  mri::write_array(out_dir + "/truth", truth, image_dims(truth, true), json(), prov);
  mri::write_array(out_dir + "/maps", maps.data, {"coil", "ky", "kx"}, json(), prov);
  mri::write_array(out_dir + "/kspace", ksp, image_dims(ksp),
                   json{{"te", te}, {"tr", tr}}, prov);
  return kOk;
}

// --------------------------------------------------------------- mask ----
int run_mask(int size, const std::string& type, int accel, int acs, std::uint64_t seed,
             const std::string& out, const json& cfg) {
  mri::MaskSpec spec;
  if (type == "uniform")
    spec.kind = mri::MaskSpec::Kind::uniform;
  else if (type == "vdrandom")
    spec.kind = mri::MaskSpec::Kind::vdrandom;
  else
    throw mri::ParameterError("mask: unknown type '" + type + "'");
  spec.accel = accel;
  spec.acs_lines = acs;
  spec.seed = seed;
  spec.density_exponent = cfg.at("mask").at("density_exponent").get<double>();
  mri::SamplingMask mask = mri::make_mask(size, spec);
  mri::write_array(out, mask.data, {"ky", "kx"},
                   json{{"accel", mask.accel}, {"acs", mask.acs_lines}},
                   json{{"seed", seed}});
  return kOk;
}

// -------------------------------------------------------------- calib ----
int run_calib(const std::string& method, const std::string& kspace_path,
              const std::string& mask_path, const std::string& out, const json& cfg) {
  mri::KSpaceData d = mri::read_complex(kspace_path);
  mri::SamplingMask mask = load_mask(mask_path);
  if (d.ndim() != 3) throw mri::DimensionError("calib: k-space must be [coil,ky,kx]");
  mri::AcsBlock acs = mri::extract_acs(d, mask);
  const json& cal = cfg.at("calibration");
  if (method == "grappa") {
    mri::GrappaKernel k =
        mri::grappa_fit(acs, mask.accel, cal.at("grappa_nu").get<int>(),
                        cal.at("grappa_nv").get<int>(), cal.at("tikhonov").get<double>());
    // Stack the per-offset weight matrices into one [offset, target, source]
    // array; offsets use the echo axis slot.
    mri::CxArray stacked({static_cast<int>(k.weights.size()), k.nc, k.cols()});
    for (std::size_t f = 0; f < k.weights.size(); ++f)
      for (std::size_t i = 0; i < k.weights[f].size(); ++i)
        stacked[f * k.weights[f].size() + i] = k.weights[f][i];
    mri::write_array(out, stacked, {"echo", "coil", "kx"},
                     json{{"accel", k.accel}, {"nu", k.nu}, {"nv", k.nv}, {"nc", k.nc}});
  } else if (method == "espirit") {
    mri::CoilMaps maps = mri::espirit_maps(
        acs, cal.at("kernel_ky").get<int>(), cal.at("kernel_kx").get<int>(),
        cal.at("sigma_rel").get<double>(), cal.at("eig_crop").get<double>(), mask.ny(),
        mask.nx());
    mri::write_array(out, maps.data, {"coil", "ky", "kx"});
  } else {
    throw mri::ParameterError("calib: unknown method '" + method + "'");
  }
  return kOk;
}

mri::GrappaKernel load_kernel(const std::string& path) {
  mri::ArrayHeader h;
  mri::CxArray stacked = mri::read_complex(path, &h);
  if (stacked.ndim() != 3 || !h.meta.is_object())
    throw mri::FormatError("kernel file: expected [offset,target,source] with meta");
  mri::GrappaKernel k;
  k.accel = h.meta.at("accel").get<int>();
  k.nu = h.meta.at("nu").get<int>();
  k.nv = h.meta.at("nv").get<int>();
  k.nc = h.meta.at("nc").get<int>();
  const std::size_t per = static_cast<std::size_t>(k.nc) * k.cols();
  for (int f = 0; f < stacked.shape(0); ++f) {
    mri::CxArray w({k.nc, k.cols()});
    for (std::size_t i = 0; i < per; ++i) w[i] = stacked[f * per + i];
    k.weights.push_back(std::move(w));
  }
  return k;
}

// -------------------------------------------------------------- recon ----
int run_recon(const std::string& method, const std::string& kspace_path,
              const std::string& mask_path, const std::string& maps_path,
              const std::string& kernel_path, const std::string& basis_path,
              const std::string& out, const json& cfg) {
  mri::KSpaceData d = mri::read_complex(kspace_path);
  mri::SamplingMask mask = load_mask(mask_path);

  auto need_maps = [&]() -> mri::CoilMaps {
    if (maps_path.empty())
      throw mri::ParameterError("recon " + method + ": --maps is required");
    return load_maps(maps_path);
  };

  bool converged = true;
  if (method == "grappa") {
    if (kernel_path.empty())
      throw mri::ParameterError("recon grappa: --kernel is required");
    if (d.ndim() != 3) throw mri::DimensionError("recon grappa: k-space must be [coil,ky,kx]");
    mri::GrappaKernel k = load_kernel(kernel_path);
    mri::KSpaceData full = mri::grappa_apply(d, mask, k);
    mri::RealArray img = mri::rss_combine(mri::ifft2c(full));
    mri::ComplexImage out_img({img.shape(0), img.shape(1)});
    for (std::size_t i = 0; i < img.size(); ++i) out_img[i] = mri::cx{img[i], 0.0};
    mri::write_array(out, out_img, {"ky", "kx"});
    return kOk;
  }
  if (method == "lowrank") {
    const json& lc = cfg.at("lowrank");
    mri::HankelConfig hc;
    hc.radius = lc.at("radius").get<int>();
    hc.rank_ell = lc.at("rank_ell").get<int>();
    hc.tau = lc.at("tau").get<double>();
    hc.max_iter = lc.at("max_iter").get<int>();
    hc.tol = lc.at("tol").get<double>();
    mri::ComplexImage img = mri::lowrank_recon(d, mask, hc);
    mri::write_array(out, img, {"ky", "kx"});
    return kOk;
  }

  mri::CoilMaps maps = need_maps();
  mri::GridGeometry geom(mask.ny(), mask.nx());
  mri::ImagingModel model(maps, mask, geom);

  mri::ComplexImage img;
  if (method == "adjoint") {
    img = mri::apply_AH(d, model);
  } else if (method == "sense") {
    const json& sc = cfg.at("sense");
    if (sc.at("solver").get<std::string>() == "gd") {
      mri::GdConfig gd;
      gd.alpha = sc.at("alpha").get<double>();
      gd.max_iter = sc.at("max_iter").get<int>();
      gd.tol = sc.at("tol").get<double>();
      img = mri::sense_gd(d, model, gd).image;
    } else {
      mri::SolveResult r = mri::sense_cg(d, model, sc.at("max_iter").get<int>(),
                                         sc.at("tol").get<double>());
      img = std::move(r.x);
      converged = r.converged;
    }
  } else if (method == "pics") {
    const json& pc = cfg.at("pics");
    mri::PicsConfig pcfg;
    pcfg.lambda = pc.at("lambda").get<double>();
    pcfg.alpha = pc.at("alpha").get<double>();
    pcfg.max_iter = pc.at("max_iter").get<int>();
    pcfg.tol = pc.at("tol").get<double>();
    pcfg.variant = pc.at("variant").get<std::string>();
    pcfg.levels = pc.at("levels").get<int>();
    img = (pcfg.variant == "subgradient" ? mri::pics_subgradient(d, model, pcfg)
                                         : mri::pics_ista(d, model, pcfg))
              .image;
  } else if (method == "subspace") {
    if (basis_path.empty())
      throw mri::ParameterError("recon subspace: --basis is required");
    mri::ArrayHeader bh;
    mri::RealArray b = mri::read_real(basis_path, &bh);
    mri::SubspaceBasis basis;
    basis.basis = std::move(b);
    basis.energy_captured =
        bh.meta.is_object() ? bh.meta.value("energy_captured", 0.0) : 0.0;
    const json& sub = cfg.at("subspace");
    mri::SubspaceResult r =
        mri::subspace_recon(d, model, basis, sub.at("lambda").get<double>(),
                            sub.at("max_iter").get<int>(), sub.at("tol").get<double>());
    converged = r.solve.converged;
    img = mri::synth_from_coeffs(basis, r.coeffs);
  } else if (method == "pnp") {
    const json& pc = cfg.at("pnp");
    mri::DenoiserSpec den;
    const std::string kind = pc.at("denoiser").get<std::string>();
    if (kind == "identity")
      den.kind = mri::DenoiserKind::identity;
    else if (kind == "wavelet")
      den.kind = mri::DenoiserKind::wavelet;
    else
      throw mri::ParameterError("pnp.denoiser must be identity or wavelet");
    den.strength = pc.at("strength").get<double>();
    den.levels = pc.at("levels").get<int>();
    mri::PnpConfig pcfg;
    pcfg.lambda = pc.at("lambda").get<double>();
    pcfg.iterations = pc.at("iterations").get<int>();
    pcfg.dc_inner_iter = pc.at("dc_inner_iter").get<int>();
    pcfg.dc_tol = pc.at("dc_tol").get<double>();
    mri::PnpResult r = mri::pnp_recon(d, model, den, pcfg);
    for (const auto& h : r.history) converged = converged && h.dc_converged;
    img = std::move(r.image);
  } else if (method == "dip") {
    const json& dc = cfg.at("dip");
    mri::DipResult r = mri::dip_recon(
        d, model, cfg.at("seeds").at("dip").get<std::uint64_t>(),
        dc.at("max_steps").get<int>(), dc.at("val_fraction").get<double>(),
        dc.at("patience").get<int>());
    img = std::move(r.image);
  } else {
    throw mri::ParameterError("recon: unknown method '" + method + "'");
  }

  mri::write_array(out, img, image_dims(img, method == "subspace"));
  return converged ? kOk : kNotConverged;
}

// --------------------------------------------------------------- eval ----
int run_eval(const std::string& recon_path, const std::string& ref_path,
             const std::string& out, const json& cfg) {
  mri::CxArray x = mri::read_complex(recon_path);
  mri::CxArray ref = mri::read_complex(ref_path);
  const json& met = cfg.at("metrics");
  json report;
  report["nrmse"] = mri::nrmse(x, ref);
  const double p = mri::psnr(x, ref);
  report["psnr_db"] = std::isinf(p) ? json("inf") : json(p);
  if (x.ndim() == 2) {
    report["ssim"] = mri::ssim(x, ref, met.at("ssim_window").get<int>(),
                               met.at("ssim_k1").get<double>(),
                               met.at("ssim_k2").get<double>());
  }
  report["recon"] = recon_path;
  report["ref"] = ref_path;
  mri::write_json_atomic(out, report);
  std::cout << report.dump(2) << "\n";
  return kOk;
}

// --------------------------------------------------------------- dict ----
int run_dict_gen(const std::string& out, const json& cfg) {
  const json& sub = cfg.at("subspace");
  std::vector<double> te = te_list_from(cfg.at("simulation"));
  mri::Dictionary dict = dict_from_config(sub, te);
  mri::write_array(out, dict.atoms, {"basis", "echo"},
                   json{{"t2_grid", dict.t2_grid}, {"te_list", dict.te_list}});
  return kOk;
}

int run_dict_basis(const std::string& dict_path, int k, const std::string& out) {
  mri::ArrayHeader h;
  mri::RealArray atoms = mri::read_real(dict_path, &h);
  if (!h.meta.is_object() || !h.meta.contains("t2_grid") || !h.meta.contains("te_list"))
    throw mri::FormatError("dict file: missing t2_grid/te_list metadata");
  mri::Dictionary dict;
  dict.atoms = std::move(atoms);
  dict.t2_grid = h.meta.at("t2_grid").get<std::vector<double>>();
  dict.te_list = h.meta.at("te_list").get<std::vector<double>>();
  mri::SubspaceBasis basis = mri::svd_basis(dict, k);
  mri::write_array(out, basis.basis, {"echo", "basis"},
                   json{{"energy_captured", basis.energy_captured}});
  return kOk;
}

// ----------------------------------------------------------- selftest ----
int run_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  // Adjoint identity on a random 16x16 / 3-coil / R=2 model.
  {
    mri::Rng rng(7001);
    const int n = 16, nc = 3;
    mri::CoilMaps maps = mri::simulate_coils(n, nc, 42);
    mri::MaskSpec spec;
    spec.accel = 2;
    spec.acs_lines = 4;
    mri::SamplingMask mask = mri::make_mask(n, spec);
    mri::ImagingModel model(maps, mask, mri::GridGeometry(n, n));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      mri::ComplexImage m({n, n});
      mri::KSpaceData d({nc, n, n});
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.cnormal();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.cnormal();
      const mri::cx lhs = mri::inner_product(mri::apply_A(m, model), d);
      const mri::cx rhs = mri::inner_product(m, mri::apply_AH(d, model));
      const double scale =
          mri::norm2(mri::apply_A(m, model)) * mri::norm2(d) + 1e-300;
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    check("adjoint identity <A m, d> = <m, A^H d>", worst < 1e-10);
  }

  // Unitarity of the centered transform.
  {
    mri::Rng rng(7002);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      mri::CxArray x({8, 8});
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.cnormal();
      const double a = mri::norm2(x);
      const double b = mri::norm2(mri::fft2c(x));
      worst = std::max(worst, std::abs(a - b) / a);
    }
    check("transform energy preservation", worst < 1e-12);
  }

  // Shrinkage is the exact magnitude prox.
  {
    mri::Rng rng(7003);
    mri::CxArray x({64});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.cnormal();
    const double tau = 0.7;
    mri::CxArray y = mri::soft_threshold(x, tau);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      // scan candidate minimizers of 0.5|y - x|^2 + tau|y| along the ray of x
      const double r = std::abs(x[i]);
      double best = 0.5 * r * r;  // y = 0
      double best_t = 0.0;
      for (int s = 1; s <= 2000; ++s) {
        const double t = r * s / 2000.0;
        const double v = 0.5 * (t - r) * (t - r) + tau * t;
        if (v < best) {
          best = v;
          best_t = t;
        }
      }
      const double got = std::abs(y[i]);
      worst = std::max(worst, std::abs(got - best_t));
    }
    check("shrinkage matches prox line search", worst < 1e-3);
  }

  // Hand-rolled gradient vs finite differences on a tiny problem.
  {
    const int n = 8;
    mri::CoilMaps maps = mri::simulate_coils(n, 2, 11);
    mri::SamplingMask mask = mri::full_mask(n, n);
    mri::ImagingModel model(maps, mask, mri::GridGeometry(n, n));
    mri::DipNetwork net;
    mri::NoiseSeed noise;
    mri::AdamState state;
    mri::dip_init(99, n, n, net, noise, state);
    mri::KSpaceData d({2, n, n});
    mri::Rng rng(7004);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.cnormal();
    mri::DipGrad g = mri::dip_loss_grad(net, noise, d, model);
    double worst = 0.0;
    const double h = 1e-4;
    for (int t = 0; t < 10; ++t) {
      const auto idx = static_cast<std::size_t>(rng.uniform() * mri::DipNetwork::kParams);
      mri::DipNetwork pert = net;
      pert.theta[idx] += h;
      const double lp = mri::dip_loss_grad(pert, noise, d, model).loss;
      pert.theta[idx] -= 2 * h;
      const double lm = mri::dip_loss_grad(pert, noise, d, model).loss;
      const double fd = (lp - lm) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(g.grad[idx]), 1e-8});
      worst = std::max(worst, std::abs(fd - g.grad[idx]) / denom);
    }
    check("network gradient matches finite differences", worst < 1e-4);
  }

  std::cout << (failures == 0 ? "selftest: all checks passed\n"
                              : "selftest: FAILURES PRESENT\n");
  return failures == 0 ? kOk : kSelftestFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MRI reconstruction toolkit: simulate, calibrate, reconstruct, score"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  std::string config_path;

  // sim
  auto* sim = app.add_subcommand("sim", "simulate a synthetic scan");
  auto* sim_ph = sim->add_subcommand("phantom", "head-phantom scene");
  int sim_size = 64, sim_coils = 8;
  std::uint64_t sim_seed = 101;
  std::string sim_model = "t2w", sim_out = ".";
  sim_ph->add_option("--size", sim_size, "grid size (even)");
  sim_ph->add_option("--coils", sim_coils, "receiver coils");
  sim_ph->add_option("--model", sim_model, "t1w|t2w|pd|multiecho|dwi");
  sim_ph->add_option("--seed", sim_seed, "coil-profile seed");
  sim_ph->add_option("--out", sim_out, "output directory")->required();
  sim_ph->add_option("--config", config_path, "config JSON");
  sim->require_subcommand(1);

  // mask
  auto* msk = app.add_subcommand("mask", "generate a sampling pattern");
  int m_size = 64, m_accel = 4, m_acs = 16;
  std::uint64_t m_seed = 303;
  std::string m_type = "uniform", m_out;
  msk->add_option("--size", m_size, "grid size (even)");
  msk->add_option("--type", m_type, "uniform|vdrandom");
  msk->add_option("--accel", m_accel, "acceleration R");
  msk->add_option("--acs", m_acs, "fully-sampled center lines");
  msk->add_option("--seed", m_seed, "line-selection seed");
  msk->add_option("--out", m_out, "output array base path")->required();
  msk->add_option("--config", config_path, "config JSON");

  // calib
  auto* cal = app.add_subcommand("calib", "estimate kernel weights or coil maps");
  std::string cal_method, cal_kspace, cal_mask, cal_out;
  cal->add_option("method", cal_method, "grappa|espirit")->required();
  cal->add_option("--kspace", cal_kspace, "k-space array")->required();
  cal->add_option("--mask", cal_mask, "mask array")->required();
  cal->add_option("--out", cal_out, "output array base path")->required();
  cal->add_option("--config", config_path, "config JSON");

  // recon
  auto* rec = app.add_subcommand("recon", "reconstruct an image");
  std::string r_method, r_kspace, r_mask, r_maps, r_kernel, r_basis, r_out;
  rec->add_option("method", r_method,
                  "adjoint|sense|grappa|pics|lowrank|subspace|pnp|dip")
      ->required();
  rec->add_option("--kspace", r_kspace, "k-space array")->required();
  rec->add_option("--mask", r_mask, "mask array")->required();
  rec->add_option("--maps", r_maps, "coil-map array");
  rec->add_option("--kernel", r_kernel, "interpolation kernel array");
  rec->add_option("--basis", r_basis, "temporal basis array");
  rec->add_option("--out", r_out, "output array base path")->required();
  rec->add_option("--config", config_path, "config JSON");

  // eval
  auto* ev = app.add_subcommand("eval", "score a reconstruction against a reference");
  std::string e_recon, e_ref, e_out = "report.json";
  ev->add_option("--recon", e_recon, "reconstruction array")->required();
  ev->add_option("--ref", e_ref, "reference array")->required();
  ev->add_option("--out", e_out, "report path");
  ev->add_option("--config", config_path, "config JSON");

  // dict
  auto* dic = app.add_subcommand("dict", "signal dictionary / temporal basis");
  auto* dic_gen = dic->add_subcommand("gen", "generate decay dictionary");
  std::string dg_out;
  dic_gen->add_option("--out", dg_out, "output array base path")->required();
  dic_gen->add_option("--config", config_path, "config JSON");
  auto* dic_basis = dic->add_subcommand("basis", "truncated basis from a dictionary");
  std::string db_dict, db_out;
  int db_k = 3;
  dic_basis->add_option("--dict", db_dict, "dictionary array")->required();
  dic_basis->add_option("--k", db_k, "basis size");
  dic_basis->add_option("--out", db_out, "output array base path")->required();
  dic->require_subcommand(1);

  // bench
  auto* ben = app.add_subcommand("bench", "run the method comparison on one scene");
  std::string b_out = "bench_out";
  ben->add_option("--config", config_path, "config JSON");
  ben->add_option("--out", b_out, "output directory");

  // selftest
  auto* st = app.add_subcommand("selftest", "run built-in numerical checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream msg;
    msg << e.what();
    emit_error(kUsage, msg.str(), "argument parsing");
    return kUsage;
  }

  try {
    const json cfg = mri::load_config(config_path);
    if (sim_ph->parsed())
      return run_sim(sim_model, sim_size, sim_coils, sim_seed, sim_out, cfg);
    if (msk->parsed())
      return run_mask(m_size, m_type, m_accel, m_acs, m_seed, m_out, cfg);
    if (cal->parsed()) return run_calib(cal_method, cal_kspace, cal_mask, cal_out, cfg);
    if (rec->parsed())
      return run_recon(r_method, r_kspace, r_mask, r_maps, r_kernel, r_basis, r_out, cfg);
    if (ev->parsed()) return run_eval(e_recon, e_ref, e_out, cfg);
    if (dic_gen->parsed()) return run_dict_gen(dg_out, cfg);
    if (dic_basis->parsed()) return run_dict_basis(db_dict, db_k, db_out);
    if (ben->parsed()) {
      mri::bench_run(cfg, b_out);
      return kOk;
    }
    if (st->parsed()) return run_selftest();
    emit_error(kUsage, "no subcommand selected", "argument parsing");
    return kUsage;
  } catch (const mri::FormatError& e) {
    emit_error(kFormat, e.what(), "file format");
    return kFormat;
  } catch (const mri::ReconstructionError& e) {
    emit_error(kNotConverged, e.what(), "reconstruction");
    return kNotConverged;
  } catch (const mri::CalibrationError& e) {
    emit_error(kNotConverged, e.what(), "calibration");
    return kNotConverged;
  } catch (const mri::Error& e) {
    emit_error(kUsage, e.what(), "parameters/configuration");
    return kUsage;
  } catch (const std::exception& e) {
    emit_error(kUsage, e.what(), "unexpected");
    return kUsage;
  }
}
