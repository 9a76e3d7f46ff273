#pragma once

#include <cstdint>
#include <random>

#include "presep/types.hpp"

namespace presep {

// Generator identity recorded in instance metadata and reports. Uniform
// doubles are (x >> 11) * 2^-53 from the raw 64-bit stream so the same id
// reproduces the same values on any platform; Gaussians come from
// Box-Muller and Gamma variates from Marsaglia-Tsang, both built on that
// uniform stream rather than the (implementation-defined) std
// distributions.
inline constexpr const char *kGeneratorId =
    "mt19937_64+boxmuller+marsaglia-tsang";

// splitmix64-based mix of a base seed with cell coordinates; used to derive
// independent per-cell seeds in sweeps.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (pairs cached).
  double gaussian();
  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by the boost
  // Gamma(shape+1) * U^(1/shape).
  double gamma(double shape);
  // Normalized independent Gamma draws.
  Vector dirichlet(const Vector &alpha);

private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

} // namespace presep
