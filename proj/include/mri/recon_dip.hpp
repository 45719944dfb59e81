#pragma once

#include <utility>
#include <vector>

#include "mri/array.hpp"
#include "mri/encoding.hpp"
#include "mri/rng.hpp"

namespace mri {

/// Fixed tiny convolutional generator: noise [16,ny,nx] -> 3x3 conv (16->32)
/// -> max(.,0) -> 3x3 conv (32->32) -> max(.,0) -> 3x3 conv (32->2), reflect
/// padding everywhere; the two output channels are the real and imaginary
/// parts of the image. Parameters live in one flat vector (kernel weights
/// then bias, per layer, in order).
struct DipNetwork {
  static constexpr int kInCh = 16;
  static constexpr int kMidCh = 32;
  static constexpr int kOutCh = 2;
  static constexpr int kK = 3;  // kernel side

  static constexpr int kW1 = kMidCh * kInCh * kK * kK;   // 4608
  static constexpr int kB1 = kMidCh;                     // 32
  static constexpr int kW2 = kMidCh * kMidCh * kK * kK;  // 9216
  static constexpr int kB2 = kMidCh;                     // 32
  static constexpr int kW3 = kOutCh * kMidCh * kK * kK;  // 576
  static constexpr int kB3 = kOutCh;                     // 2
  static constexpr int kParams = kW1 + kB1 + kW2 + kB2 + kW3 + kB3;  // 14466

  // Flat offsets of each parameter block.
  static constexpr int oW1 = 0;
  static constexpr int oB1 = oW1 + kW1;
  static constexpr int oW2 = oB1 + kB1;
  static constexpr int oB2 = oW2 + kW2;
  static constexpr int oW3 = oB2 + kB2;
  static constexpr int oB3 = oW3 + kW3;

  int ny = 0;
  int nx = 0;
  std::vector<double> theta;  // size kParams

  DipNetwork() = default;
  DipNetwork(int ny_, int nx_) : ny(ny_), nx(nx_), theta(kParams, 0.0) {
    if (ny_ < 2 || nx_ < 2) throw DimensionError("DipNetwork: grid must be >= 2x2");
  }
};

/// The fixed noise input, kept constant throughout optimization.
struct NoiseSeed {
  RealArray z;  // [16, ny, nx], standard normal entries
  std::uint64_t seed = 0;
};

/// First/second-moment optimizer state over the flat parameter vector.
struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Deterministic initialization: kernel weights and biases uniform in
/// [-sqrt(1/fan_in), +sqrt(1/fan_in)] per layer, noise input standard
/// normal, all drawn from one counter-based stream keyed by seed.
void dip_init(std::uint64_t seed, int ny, int nx, DipNetwork& net, NoiseSeed& noise,
              AdamState& state);

/// Forward pass G_theta(z) -> complex image [ny, nx].
ComplexImage dip_forward(const DipNetwork& net, const NoiseSeed& noise);

struct DipGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d theta, flat layout
};

/// Loss ||A G_theta(z) - d||^2 and its exact reverse-mode gradient over all
/// parameters. The max(.,0) gate passes gradient only where the
/// pre-activation is strictly positive.
DipGrad dip_loss_grad(const DipNetwork& net, const NoiseSeed& noise, const KSpaceData& d,
                      const ImagingModel& model);

/// One bias-corrected adaptive-moment update of net.theta in place.
void adam_step(DipNetwork& net, const std::vector<double>& grad, AdamState& state);

/// Deterministic split of the acquired sample locations into train/val
/// masks: round(val_fraction * n_acquired) locations (at least 1, and
/// strictly fewer than all) are held out for validation.
std::pair<SamplingMask, SamplingMask> dip_split(const SamplingMask& mask,
                                                std::uint64_t seed, double val_fraction);

struct DipHistory {
  std::vector<double> train_loss;  // one entry per optimization step
  std::vector<int> val_steps;      // steps at which validation ran
  std::vector<double> val_loss;    // matching validation losses
  int best_step = 0;
  double best_val = 0.0;
  int steps_run = 0;
  bool stopped_early = false;
};

struct DipResult {
  ComplexImage image;  // forward pass at the best validation checkpoint
  DipHistory history;
};

/// Scan-specific optimization: fit the generator to the acquired k-space of
/// this one scan, holding out a random fraction of acquired samples purely
/// for early stopping. Validation loss is checked every 25 steps (and at the
/// last step); optimization stops once it fails to improve for `patience`
/// consecutive checks, and the image at the best checkpoint is returned.
DipResult dip_recon(const KSpaceData& d, const ImagingModel& model, std::uint64_t seed,
                    int max_steps = 5000, double val_fraction = 0.1, int patience = 10);

}  // namespace mri
