#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "gfdm/errors.hpp"

namespace gfdm {

// SplitMix64 finalizer. Bijective on 64-bit words, so distinct inputs give
// distinct outputs; used to spread structured seed material.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for realization r of an ensemble run under a given master seed.
//
// master ^ ((r+1) * c) with odd c is injective in r for fixed master, and
// mix64 is a bijection, so all realization seeds of one ensemble are
// pairwise distinct. The rule is part of the reproducibility contract:
// (master_seed, r) fully determines the noise path of realization r, no
// matter how realizations are scheduled across threads.
inline std::uint64_t realization_seed(std::uint64_t master_seed, int realization) {
  const std::uint64_t golden = 0x9E3779B97F4A7C15ull;
  return mix64(master_seed ^ (static_cast<std::uint64_t>(realization + 1) * golden));
}

// Deterministic stream of standard normal draws on top of mt19937_64.
//
// Box-Muller without caching: each draw consumes exactly two engine words,
// so the engine position after k draws is seed-determined and independent
// of call-site structure. That costs one discarded sine per draw and buys
// a simpler replay story.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in the open interval (0, 1); cannot return 0 or 1 exactly.
  double uniform01() {
    const std::uint64_t word = engine_();
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
  }

  double standard_normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// One Wiener increment over a step of length dt: normal(0, dt).
inline double sample_wiener_increment(NoiseStream& stream, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("Wiener increment needs dt > 0");
  return std::sqrt(dt) * stream.standard_normal();
}

}  // namespace gfdm
