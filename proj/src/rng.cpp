#include "presep/rng.hpp"

#include <cmath>

namespace presep {

namespace {

std::uint64_t splitmix64(std::uint64_t &state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = base;
  std::uint64_t h = splitmix64(state);
  state ^= a * 0xff51afd7ed558ccdULL;
  h ^= splitmix64(state);
  state ^= b * 0xc4ceb9fe1a85ec53ULL;
  h ^= splitmix64(state);
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double two_pi = 2.0 * M_PI;
  cached_ = mag * std::sin(two_pi * u2);
  has_cached_ = true;
  return mag * std::cos(two_pi * u2);
}

double Rng::gamma(double shape) {
  require(shape > 0.0, "gamma shape must be positive");
  if (shape < 1.0) {
    const double boost = gamma(shape + 1.0);
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    return boost * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2)
      return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

Vector Rng::dirichlet(const Vector &alpha) {
  Vector g(alpha.size());
  for (Index i = 0; i < alpha.size(); ++i)
    g[i] = gamma(alpha[i]);
  const double sum = g.sum();
  require(sum > 0.0, "degenerate Dirichlet draw");
  return g / sum;
}

} // namespace presep
