#pragma once

#include <string>

#include <json.hpp>

#include "mri/encoding.hpp"
#include "mri/phantom.hpp"

namespace mri {

/// One self-contained synthetic acquisition: ground truth, coil profiles,
/// sampling pattern, and the (optionally noisy) undersampled measurements.
struct BenchScene {
  ComplexImage truth;   // [ny, nx]
  CoilMaps maps;
  SamplingMask mask;
  KSpaceData full;      // noisy fully-sampled k-space [nc, ky, kx]
  KSpaceData data;      // masked measurements, zeros where unsampled
  ImagingModel model;   // maps + mask + unit-pitch grid
  double noise_sigma = 0.0;
};

/// Deterministically builds the scene described by the config's simulation,
/// mask, and seeds sections.
BenchScene build_scene(const nlohmann::json& config);

/// Runs the default comparison (zero-filled adjoint baseline plus sense,
/// pics, lowrank, pnp, dip) on the config's scene; writes report.json,
/// table.txt, the ground truth, the mask, and one image per method into
/// out_dir, and returns the report document. All outputs are deterministic
/// functions of the config.
nlohmann::json bench_run(const nlohmann::json& config, const std::string& out_dir);

}  // namespace mri
