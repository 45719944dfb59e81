#include "mri/config.hpp"

#include "mri/errors.hpp"
#include "mri/io.hpp"

namespace mri {

nlohmann::json default_config() {
  nlohmann::json c;
  c["simulation"] = {
      {"size", 32},          {"coils", 8},
      {"model", "t2w"},      {"coil_width", 0.8},
      {"tr", 3000.0},        {"te_first", 80.0},
      {"te_spacing", 20.0},  {"echoes", 1},
      {"b_value", 0.0},      {"noise_sigma_rel", 0.02},
  };
  c["mask"] = {
      {"type", "uniform"},
      {"accel", 4},
      {"acs", 4},
      {"density_exponent", 3.0},
  };
  c["calibration"] = {
      {"method", "espirit"}, {"kernel_ky", 6},  {"kernel_kx", 6},
      {"sigma_rel", 0.02},   {"eig_crop", 0.9}, {"grappa_nu", 2},
      {"grappa_nv", 3},      {"tikhonov", 1e-9},
  };
  c["sense"] = {
      {"lambda", 0.0}, {"alpha", 1.0},   {"max_iter", 30},
      {"tol", 1e-9},   {"solver", "cg"},
  };
  c["pics"] = {
      {"lambda", 0.002}, {"alpha", 1.0},       {"max_iter", 80},
      {"tol", 0.0},      {"variant", "fista"}, {"levels", 3},
  };
  c["lowrank"] = {
      {"radius", 2}, {"rank_ell", 12}, {"tau", 0.0}, {"max_iter", 60}, {"tol", 1e-7},
  };
  c["subspace"] = {
      {"k", 3},        {"lambda", 1e-6},  {"max_iter", 100},  {"tol", 1e-9},
      {"t2_min", 20.0}, {"t2_max", 300.0}, {"t2_step", 2.0},  {"t2_extra", 2000.0},
  };
  c["pnp"] = {
      {"lambda", 1.0},         {"iterations", 10}, {"dc_inner_iter", 20},
      {"dc_tol", 1e-9},        {"denoiser", "wavelet"},
      {"strength", 0.002},     {"levels", 3},
  };
  c["dip"] = {
      {"max_steps", 600},
      {"val_fraction", 0.1},
      {"patience", 8},
  };
  c["metrics"] = {
      {"ssim_window", 7},
      {"ssim_k1", 0.01},
      {"ssim_k2", 0.03},
  };
  c["seeds"] = {
      {"coils", 101},
      {"noise", 202},
      {"mask", 303},
      {"dip", 404},
  };
  return c;
}

nlohmann::json merge_config(const nlohmann::json& base, const nlohmann::json& user,
                            const std::string& path) {
  if (!user.is_object())
    throw ParameterError("config: expected an object at " +
                         (path.empty() ? std::string("the document root") : path));
  nlohmann::json out = base;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key_path = path + "/" + it.key();
    if (!base.contains(it.key()))
      throw ParameterError("config: unknown key " + key_path);
    const nlohmann::json& dv = base.at(it.key());
    const nlohmann::json& uv = it.value();
    if (dv.is_object()) {
      out[it.key()] = merge_config(dv, uv, key_path);
    } else {
      const bool both_numeric = dv.is_number() && uv.is_number();
      const bool same_kind = dv.type() == uv.type() ||
                             (dv.is_boolean() && uv.is_boolean()) ||
                             (dv.is_string() && uv.is_string());
      if (!both_numeric && !same_kind)
        throw ParameterError("config: wrong value kind at " + key_path + " (expected " +
                             std::string(dv.type_name()) + ", found " +
                             std::string(uv.type_name()) + ")");
      out[it.key()] = uv;
    }
  }
  return out;
}

nlohmann::json load_config(const std::string& path) {
  nlohmann::json cfg = default_config();
  if (path.empty()) return cfg;
  return merge_config(cfg, read_json(path));
}

}  // namespace mri
