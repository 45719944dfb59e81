#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"
#include "mri/signal_models.hpp"

namespace mri {

/// One additive ellipse of the test object, in [-1,1]^2 coordinates.
struct EllipseSpec {
  double cx = 0.0, cy = 0.0;      // center
  double a = 1.0, b = 1.0;        // semi-axes, > 0
  double phi = 0.0;               // rotation (rad)
  double intensity = 0.0;         // additive value
};

/// Sampling pattern recipe.
struct MaskSpec {
  enum class Kind { uniform, vdrandom };
  Kind kind = Kind::uniform;
  int accel = 1;                  // target acceleration R >= 1
  int acs_lines = 0;              // fully-sampled center lines
  std::uint64_t seed = 0;         // vdrandom line selection
  double density_exponent = 3.0;  // vdrandom weight falloff
};

/// The standard 10-ellipse head phantom table (additive intensities).
const std::vector<EllipseSpec>& head_ellipses();

/// Rasterizes the head phantom at n x n; intensities in [0,1], zero phase.
ComplexImage shepp_logan(int n);

/// Piecewise-constant tissue parameter maps over the same ellipse layout.
/// Region classes (rho, t1, t2, diff): background (0, 1000, 100, 0),
/// outer tissue (1.0, 1200, 110, 1.0e-3), inner tissue (0.8, 800, 80,
/// 0.8e-3), fluid (1.0, 4000, 2000, 3.0e-3).
TissueMaps quant_phantom(int n);

/// nc smooth complex coil profiles: Gaussian magnitude lobes centered on a
/// circle around the field of view plus low-order polynomial phase ramps,
/// pixelwise normalized so sum_c |c|^2 = 1 everywhere. Deterministic in seed.
CoilMaps simulate_coils(int n, int nc, std::uint64_t seed, double lobe_width = 0.8);

/// Line-based (fully-sampled readout) sampling patterns; see MaskSpec.
SamplingMask make_mask(int n, const MaskSpec& spec);

/// All-ones pattern.
SamplingMask full_mask(int ny, int nx);

/// Echo-stacked spin-echo image series, one image per te entry; zero phase.
ComplexImage synth_multiecho(const TissueMaps& maps, const std::vector<double>& te_list,
                             double tr, double k_const = 1.0);

/// Single-contrast image from the scalar signal models (uses params.b and
/// the diffusivity map when params.b > 0).
ComplexImage synth_image(const TissueMaps& maps, const SequenceParams& params);

/// data + sigma * (g1 + i g2)/sqrt(2) with g1, g2 standard normal, so sigma
/// is the standard deviation of each complex sample. Deterministic in seed.
CxArray add_noise(const CxArray& data, double sigma, std::uint64_t seed);

}  // namespace mri
