#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mri/config.hpp"
#include "mri/io.hpp"

using namespace mri;
namespace fs = std::filesystem;

namespace {

#ifndef MRECON_BIN
#error "MRECON_BIN must point at the command-line binary"
#endif

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

std::string scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mri_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

CliResult run_cli(const std::string& args, const std::string& dir) {
  const std::string out_file = dir + "/cli_stdout.txt";
  const std::string err_file = dir + "/cli_stderr.txt";
  const std::string cmd = std::string("\"") + MRECON_BIN + "\" " + args + " > \"" +
                          out_file + "\" 2> \"" + err_file + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  REQUIRE(status != -1);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

int count_occurrences(const std::string& text, const std::string& token) {
  int n = 0;
  for (std::size_t p = text.find(token); p != std::string::npos;
       p = text.find(token, p + token.size()))
    ++n;
  return n;
}

nlohmann::json first_stderr_json(const CliResult& r) {
  return nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("selftest passes and reports every check") {
  const std::string dir = scratch_dir("selftest");
  CliResult r = run_cli("selftest", dir);
  CHECK(r.code == 0);
  CHECK(count_occurrences(r.out, "PASS") >= 4);
  CHECK(count_occurrences(r.out, "FAIL") == 0);
  CHECK(r.out.find("selftest: all checks passed") != std::string::npos);
}

TEST_CASE("fully sampled pipeline recovers the reference image") {
  const std::string dir = scratch_dir("full_pipeline");
  CHECK(run_cli("sim phantom --size 16 --coils 3 --seed 7 --out " + dir, dir).code == 0);
  CHECK(run_cli("mask --size 16 --type uniform --accel 1 --acs 4 --out " + dir + "/mask",
                dir)
            .code == 0);
  CHECK(run_cli("recon adjoint --kspace " + dir + "/kspace --mask " + dir +
                    "/mask --maps " + dir + "/maps --out " + dir + "/rec",
                dir)
            .code == 0);
  CliResult ev = run_cli("eval --recon " + dir + "/rec --ref " + dir +
                             "/truth --out " + dir + "/report.json",
                         dir);
  CHECK(ev.code == 0);

  nlohmann::json report = read_json(dir + "/report.json");
  // The 32-bit file format, not the algorithm, bounds the error here.
  CHECK(report.at("nrmse").get<double>() < 1e-6);
  CHECK(report.at("ssim").get<double>() > 0.999);
  CHECK(report.at("recon").get<std::string>() == dir + "/rec");
  // The printed report matches the file.
  CHECK(nlohmann::json::parse(ev.out) == report);
}

TEST_CASE("k-space interpolation beats zero filling on an undersampled scan") {
  const std::string dir = scratch_dir("grappa_pipeline");
  CHECK(run_cli("sim phantom --size 32 --coils 4 --seed 11 --out " + dir, dir).code == 0);
  CHECK(run_cli("mask --size 32 --type uniform --accel 2 --acs 12 --out " + dir + "/mask",
                dir)
            .code == 0);
  CHECK(run_cli("calib grappa --kspace " + dir + "/kspace --mask " + dir +
                    "/mask --out " + dir + "/kernel",
                dir)
            .code == 0);
  CHECK(run_cli("recon grappa --kspace " + dir + "/kspace --mask " + dir +
                    "/mask --kernel " + dir + "/kernel --out " + dir + "/g",
                dir)
            .code == 0);
  CHECK(run_cli("recon adjoint --kspace " + dir + "/kspace --mask " + dir +
                    "/mask --maps " + dir + "/maps --out " + dir + "/zf",
                dir)
            .code == 0);
  CHECK(run_cli("eval --recon " + dir + "/g --ref " + dir + "/truth --out " + dir +
                    "/rg.json",
                dir)
            .code == 0);
  CHECK(run_cli("eval --recon " + dir + "/zf --ref " + dir + "/truth --out " + dir +
                    "/rz.json",
                dir)
            .code == 0);
  const double eg = read_json(dir + "/rg.json").at("nrmse").get<double>();
  const double ez = read_json(dir + "/rz.json").at("nrmse").get<double>();
  CHECK(eg < ez);
  CHECK(eg < 0.2);
}

TEST_CASE("temporal dictionary, basis, and multi-echo reconstruction") {
  const std::string dir = scratch_dir("subspace_pipeline");
  write_json_atomic(dir + "/cfg.json",
                    nlohmann::json{{"simulation", {{"echoes", 8}}},
                                   {"subspace",
                                    {{"lambda", 1e-2}, {"max_iter", 500}, {"tol", 1e-7}}}});
  const std::string cfg = " --config " + dir + "/cfg.json";

  CHECK(run_cli("dict gen --out " + dir + "/dict" + cfg, dir).code == 0);
  ArrayHeader dh = read_array_header(dir + "/dict");
  CHECK(dh.dtype == "float32");
  CHECK(dh.shape.size() == 2);
  CHECK(dh.shape[1] == 8);
  CHECK(dh.meta.at("t2_grid").get<std::vector<double>>().size() ==
        static_cast<std::size_t>(dh.shape[0]));

  CHECK(run_cli("dict basis --dict " + dir + "/dict --k 3 --out " + dir + "/basis", dir)
            .code == 0);
  ArrayHeader bh;
  RealArray basis = read_real(dir + "/basis", &bh);
  CHECK(basis.shape(0) == 8);
  CHECK(basis.shape(1) == 3);
  const double energy = bh.meta.at("energy_captured").get<double>();
  CHECK(energy > 0.999);
  CHECK(energy <= 1.0 + 1e-12);

  CHECK(run_cli("sim phantom --model multiecho --size 16 --coils 3 --seed 5 --out " +
                    dir + cfg,
                dir)
            .code == 0);
  CHECK(run_cli("mask --size 16 --type uniform --accel 2 --acs 4 --out " + dir + "/mask",
                dir)
            .code == 0);
  CHECK(run_cli("recon subspace --kspace " + dir + "/kspace --mask " + dir +
                    "/mask --maps " + dir + "/maps --basis " + dir + "/basis --out " +
                    dir + "/rec" + cfg,
                dir)
            .code == 0);

  ArrayHeader rh = read_array_header(dir + "/rec");
  CHECK(rh.dims == std::vector<std::string>{"echo", "ky", "kx"});
  CHECK(rh.shape == std::vector<int>{8, 16, 16});

  CHECK(run_cli("eval --recon " + dir + "/rec --ref " + dir + "/truth --out " + dir +
                    "/report.json",
                dir)
            .code == 0);
  nlohmann::json report = read_json(dir + "/report.json");
  CHECK(report.at("nrmse").get<double>() < 0.3);
  CHECK(!report.contains("ssim"));  // defined for single images only
}

TEST_CASE("simulation output is deterministic for a fixed seed") {
  const std::string d1 = scratch_dir("sim_det_a");
  const std::string d2 = scratch_dir("sim_det_b");
  CHECK(run_cli("sim phantom --size 16 --coils 3 --seed 21 --out " + d1, d1).code == 0);
  CHECK(run_cli("sim phantom --size 16 --coils 3 --seed 21 --out " + d2, d2).code == 0);
  CHECK(slurp(d1 + "/kspace.bin") == slurp(d2 + "/kspace.bin"));
  CHECK(slurp(d1 + "/maps.bin") == slurp(d2 + "/maps.bin"));
  CHECK(run_cli("sim phantom --size 16 --coils 3 --seed 22 --out " + d2, d2).code == 0);
  CHECK(slurp(d1 + "/maps.bin") != slurp(d2 + "/maps.bin"));
}

TEST_CASE("mask files carry their sampling metadata") {
  const std::string dir = scratch_dir("mask_meta");
  CHECK(run_cli("mask --size 32 --type vdrandom --accel 4 --acs 6 --seed 9 --out " +
                    dir + "/mask",
                dir)
            .code == 0);
  ArrayHeader h;
  ByteArray m = read_bytes(dir + "/mask", &h);
  CHECK(h.dtype == "uint8");
  CHECK(h.dims == std::vector<std::string>{"ky", "kx"});
  CHECK(h.meta.at("accel").get<int>() == 4);
  CHECK(h.meta.at("acs").get<int>() == 6);
  CHECK(h.seed_provenance.at("seed").get<int>() == 9);
  // The fully sampled center block is present.
  for (int y = 13; y < 19; ++y)
    for (int x = 0; x < 32; ++x) CHECK(m.at(y, x) == 1);
  // Same seed reproduces the pattern bit for bit.
  CHECK(run_cli("mask --size 32 --type vdrandom --accel 4 --acs 6 --seed 9 --out " +
                    dir + "/mask2",
                dir)
            .code == 0);
  CHECK(slurp(dir + "/mask.bin") == slurp(dir + "/mask2.bin"));
}

TEST_CASE("a reconstruction that fails to converge exits with its own code") {
  const std::string dir = scratch_dir("nonconverged");
  write_json_atomic(dir + "/cfg.json",
                    nlohmann::json{{"sense", {{"max_iter", 2}, {"tol", 1e-30}}}});
  CHECK(run_cli("sim phantom --size 16 --coils 3 --seed 7 --out " + dir, dir).code == 0);
  CHECK(run_cli("mask --size 16 --type uniform --accel 2 --acs 4 --out " + dir + "/mask",
                dir)
            .code == 0);
  CliResult r = run_cli("recon sense --kspace " + dir + "/kspace --mask " + dir +
                            "/mask --maps " + dir + "/maps --out " + dir +
                            "/rec --config " + dir + "/cfg.json",
                        dir);
  CHECK(r.code == 4);
  // The partial result is still written for inspection.
  CHECK(fs::exists(dir + "/rec.json"));
  CHECK(fs::exists(dir + "/rec.bin"));
}

TEST_CASE("usage, parameter, and file errors map to distinct exit codes") {
  const std::string dir = scratch_dir("errors");

  // Unknown subcommand.
  CliResult bogus = run_cli("bogus", dir);
  CHECK(bogus.code == 2);
  CHECK(first_stderr_json(bogus).at("code").get<int>() == 2);

  // Missing required option.
  CHECK(run_cli("recon adjoint --kspace x --mask y", dir).code == 2);

  // Valid files, unknown method / missing companion input.
  CHECK(run_cli("sim phantom --size 16 --coils 2 --seed 3 --out " + dir, dir).code == 0);
  CHECK(run_cli("mask --size 16 --accel 2 --acs 4 --out " + dir + "/mask", dir).code == 0);
  const std::string inputs =
      " --kspace " + dir + "/kspace --mask " + dir + "/mask --out " + dir + "/rec";
  CliResult warp = run_cli("recon warp" + inputs + " --maps " + dir + "/maps", dir);
  CHECK(warp.code == 2);
  CHECK(first_stderr_json(warp).at("message").get<std::string>().find("warp") !=
        std::string::npos);
  CHECK(run_cli("recon sense" + inputs, dir).code == 2);      // needs --maps
  CHECK(run_cli("recon grappa" + inputs, dir).code == 2);     // needs --kernel
  CHECK(run_cli("recon subspace" + inputs + " --maps " + dir + "/maps", dir).code ==
        2);  // needs --basis

  // Missing data file.
  CliResult missing = run_cli(
      "eval --recon " + dir + "/absent --ref " + dir + "/truth --out " + dir + "/r.json",
      dir);
  CHECK(missing.code == 3);
  CHECK(first_stderr_json(missing).at("code").get<int>() == 3);

  // Option not accepted by this subcommand, missing config file, bad config key.
  CHECK(run_cli("selftest --config " + dir + "/absent_cfg.json", dir).code == 2);
  CHECK(run_cli("mask --out " + dir + "/m2 --config " + dir + "/nope.json", dir).code ==
        3);
  write_json_atomic(dir + "/bad.json", nlohmann::json{{"typo_section", 1}});
  CliResult badcfg =
      run_cli("mask --out " + dir + "/m3 --config " + dir + "/bad.json", dir);
  CHECK(badcfg.code == 2);
  CHECK(first_stderr_json(badcfg).at("message").get<std::string>().find(
            "typo_section") != std::string::npos);
}

}  // TEST_SUITE("cli")
