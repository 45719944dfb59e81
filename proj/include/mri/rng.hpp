#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace mri {

/// Deterministic counter-based random stream.
///
/// Draw i of stream `seed` is obtained by finalizing the 64-bit state
/// `seed + (i+1) * 0x9E3779B97F4A7C15` with the SplitMix64 mixer. Because
/// every draw is a pure function of (seed, i), results are identical across
/// platforms and independent of call interleaving, which keeps file payloads
/// and benchmark reports byte-for-byte reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

  /// Raw 64-bit draw.
  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1): top 53 bits scaled by 2^-53.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Draws two uniforms per call and uses the
  /// cosine branch only, so the draw count stays a simple linear function of
  /// the number of normals requested.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // Guard the log against u1 == 0.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Complex normal with independent N(0,1) real and imaginary parts.
  std::complex<double> cnormal() {
    double re = normal();
    double im = normal();
    return {re, im};
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace mri
