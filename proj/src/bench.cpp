#include "mri/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "mri/config.hpp"
#include "mri/io.hpp"
#include "mri/metrics.hpp"
#include "mri/recon_dip.hpp"
#include "mri/recon_linear.hpp"
#include "mri/recon_lowrank.hpp"
#include "mri/recon_pnp.hpp"
#include "mri/recon_sparse.hpp"
#include "mri/signal_models.hpp"

namespace mri {

namespace {

nlohmann::json json_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

BenchScene build_scene(const nlohmann::json& config) {
  const auto& sim = config.at("simulation");
  const auto& mk = config.at("mask");
  const auto& seeds = config.at("seeds");
  const int n = sim.at("size").get<int>();
  const int nc = sim.at("coils").get<int>();

  BenchScene s;
  TissueMaps tissue = quant_phantom(n);
  s.maps = simulate_coils(n, nc, seeds.at("coils").get<std::uint64_t>(),
                          sim.at("coil_width").get<double>());

  SequenceParams params;
  params.tr = sim.at("tr").get<double>();
  params.te = {sim.at("te_first").get<double>()};
  params.b = sim.at("b_value").get<double>();
  s.truth = synth_image(tissue, params);

  GridGeometry geom(n, n);
  ImagingModel full_model(s.maps, full_mask(n, n), geom);
  s.full = apply_A(s.truth, full_model);

  const double sigma_rel = sim.at("noise_sigma_rel").get<double>();
  if (sigma_rel > 0.0) {
    const double rms = norm2(s.full) / std::sqrt(static_cast<double>(s.full.size()));
    s.noise_sigma = sigma_rel * rms;
    s.full = add_noise(s.full, s.noise_sigma, seeds.at("noise").get<std::uint64_t>());
  }

  MaskSpec spec;
  const std::string type = mk.at("type").get<std::string>();
  if (type == "uniform")
    spec.kind = MaskSpec::Kind::uniform;
  else if (type == "vdrandom")
    spec.kind = MaskSpec::Kind::vdrandom;
  else
    throw ParameterError("mask.type must be uniform or vdrandom, got '" + type + "'");
  spec.accel = mk.at("accel").get<int>();
  spec.acs_lines = mk.at("acs").get<int>();
  spec.seed = seeds.at("mask").get<std::uint64_t>();
  spec.density_exponent = mk.at("density_exponent").get<double>();
  s.mask = make_mask(n, spec);

  s.data = hadamard(s.full, s.mask.as_real());
  s.model = ImagingModel(s.maps, s.mask, geom);
  return s;
}

nlohmann::json bench_run(const nlohmann::json& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  BenchScene s = build_scene(config);
  const auto& met = config.at("metrics");
  const int win = met.at("ssim_window").get<int>();
  const double k1 = met.at("ssim_k1").get<double>();
  const double k2 = met.at("ssim_k2").get<double>();

  struct MethodRun {
    std::string name;
    ComplexImage image;
    bool converged = true;
  };
  std::vector<MethodRun> runs;

  runs.push_back({"adjoint", apply_AH(s.data, s.model), true});

  {
    const auto& sc = config.at("sense");
    if (sc.at("solver").get<std::string>() == "gd") {
      GdConfig gd;
      gd.alpha = sc.at("alpha").get<double>();
      gd.max_iter = sc.at("max_iter").get<int>();
      gd.tol = sc.at("tol").get<double>();
      runs.push_back({"sense", sense_gd(s.data, s.model, gd).image, true});
    } else {
      SolveResult r = sense_cg(s.data, s.model, sc.at("max_iter").get<int>(),
                               sc.at("tol").get<double>());
      runs.push_back({"sense", std::move(r.x), r.converged});
    }
  }
  {
    const auto& pc = config.at("pics");
    PicsConfig cfg;
    cfg.lambda = pc.at("lambda").get<double>();
    cfg.alpha = pc.at("alpha").get<double>();
    cfg.max_iter = pc.at("max_iter").get<int>();
    cfg.tol = pc.at("tol").get<double>();
    cfg.variant = pc.at("variant").get<std::string>();
    cfg.levels = pc.at("levels").get<int>();
    PicsResult r = cfg.variant == "subgradient" ? pics_subgradient(s.data, s.model, cfg)
                                                : pics_ista(s.data, s.model, cfg);
    runs.push_back({"pics", std::move(r.image), true});
  }
  {
    const auto& lc = config.at("lowrank");
    HankelConfig cfg;
    cfg.radius = lc.at("radius").get<int>();
    cfg.rank_ell = lc.at("rank_ell").get<int>();
    cfg.tau = lc.at("tau").get<double>();
    cfg.max_iter = lc.at("max_iter").get<int>();
    cfg.tol = lc.at("tol").get<double>();
    runs.push_back({"lowrank", lowrank_recon(s.data, s.mask, cfg), true});
  }
  {
    const auto& pc = config.at("pnp");
    DenoiserSpec den;
    const std::string kind = pc.at("denoiser").get<std::string>();
    if (kind == "identity")
      den.kind = DenoiserKind::identity;
    else if (kind == "wavelet")
      den.kind = DenoiserKind::wavelet;
    else
      throw ParameterError("pnp.denoiser must be identity or wavelet, got '" + kind + "'");
    den.strength = pc.at("strength").get<double>();
    den.levels = pc.at("levels").get<int>();
    PnpConfig cfg;
    cfg.lambda = pc.at("lambda").get<double>();
    cfg.iterations = pc.at("iterations").get<int>();
    cfg.dc_inner_iter = pc.at("dc_inner_iter").get<int>();
    cfg.dc_tol = pc.at("dc_tol").get<double>();
    PnpResult r = pnp_recon(s.data, s.model, den, cfg);
    bool dc_ok = true;
    for (const auto& h : r.history) dc_ok = dc_ok && h.dc_converged;
    runs.push_back({"pnp", std::move(r.image), dc_ok});
  }
  {
    const auto& dc = config.at("dip");
    DipResult r = dip_recon(s.data, s.model, config.at("seeds").at("dip").get<std::uint64_t>(),
                            dc.at("max_steps").get<int>(),
                            dc.at("val_fraction").get<double>(), dc.at("patience").get<int>());
    runs.push_back({"dip", std::move(r.image), true});
  }

  nlohmann::json report;
  report["config"] = config;
  report["scene"] = {
      {"size", s.truth.ny()},
      {"coils", s.maps.nc()},
      {"noise_sigma", s.noise_sigma},
      {"sampled_fraction", s.mask.sampled_fraction()},
      {"acquired_samples", s.mask.sampled_count()},
  };

  nlohmann::json results;
  std::ostringstream table;
  table << "method    nrmse       psnr_db     ssim        converged\n";
  table << "--------  ----------  ----------  ----------  ---------\n";
  for (const auto& run : runs) {
    const double e = nrmse(run.image, s.truth);
    const double p = psnr(run.image, s.truth);
    const double ss = ssim(run.image, s.truth, win, k1, k2);
    results[run.name] = {{"nrmse", e},
                         {"psnr_db", json_db(p)},
                         {"ssim", ss},
                         {"converged", run.converged}};
    char line[128];
    if (std::isinf(p))
      std::snprintf(line, sizeof(line), "%-8s  %10.6f  %10s  %10.6f  %s\n",
                    run.name.c_str(), e, "inf", ss, run.converged ? "yes" : "no");
    else
      std::snprintf(line, sizeof(line), "%-8s  %10.6f  %10.6f  %10.6f  %s\n",
                    run.name.c_str(), e, p, ss, run.converged ? "yes" : "no");
    table << line;

    write_array(out_dir + "/recon_" + run.name, run.image, {"ky", "kx"});
  }
  report["results"] = results;

  write_array(out_dir + "/ground_truth", s.truth, {"ky", "kx"});
  write_array(out_dir + "/mask", s.mask.data, {"ky", "kx"},
              nlohmann::json{{"accel", s.mask.accel}, {"acs", s.mask.acs_lines}});
  write_json_atomic(out_dir + "/report.json", report);
  {
    const std::string path = out_dir + "/table.txt";
    const std::string tmp = path + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << table.str();
    }
    std::filesystem::rename(tmp, path);
  }
  return report;
}

}  // namespace mri
