#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fns/grid.hpp"

namespace fns {

// splitmix64, the canonical 64-bit mixer; used for all seeded data so runs
// are reproducible bit for bit.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // uniform in [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  // uniform in [-1, 1)
  double symmetric() { return 2.0 * uniform() - 1.0; }
};

namespace detail {

inline Field taylor_green_2d(const GridSpec& g, double amplitude) {
  if (g.dim != 2) throw std::invalid_argument("preset taylor_green_2d: needs a 2D grid");
  Field f(g, 2);
  const double w = 2.0 * std::numbers::pi / g.length;
  for (std::size_t i = 0; i < g.site_count(); ++i) {
    const auto x = g.position(i);
    f.at(0, i) = amplitude * std::sin(w * x[0]) * std::cos(w * x[1]);
    f.at(1, i) = -amplitude * std::cos(w * x[0]) * std::sin(w * x[1]);
  }
  return f;
}

inline Field abc_beltrami_3d(const GridSpec& g, double amplitude) {
  if (g.dim != 3) throw std::invalid_argument("preset abc_beltrami_3d: needs a 3D grid");
  Field f(g, 3);
  const double w = 2.0 * std::numbers::pi / g.length;
  for (std::size_t i = 0; i < g.site_count(); ++i) {
    const auto x = g.position(i);
    f.at(0, i) = amplitude * (std::sin(w * x[2]) + std::cos(w * x[1]));
    f.at(1, i) = amplitude * (std::sin(w * x[0]) + std::cos(w * x[2]));
    f.at(2, i) = amplitude * (std::sin(w * x[1]) + std::cos(w * x[0]));
  }
  return f;
}

// Divergence-free random field: seeded spectrum on |k_j| <= N/4 with a
// Gaussian roll-off, Hermitian by construction, Leray-projected, scaled to
// the requested max amplitude.
inline Field random_divfree(const GridSpec& g, double amplitude, std::uint64_t seed,
                            int band_limit = 0) {
  SpectralField F(g, g.dim);
  SplitMix64 rng(seed);
  int band = band_limit > 0 ? band_limit : g.points / 4;
  band = std::min(band, g.points / 3);  // keep clear of the Nyquist planes
  const double k0 = std::max(1.0, band / 2.0);
  const std::size_t n = g.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = g.unflatten(i);
    std::array<int, 3> k{0, 0, 0};
    bool in_band = true;
    for (int a = 0; a < g.dim; ++a) {
      k[a] = g.wave_index(idx[a]);
      if (std::abs(k[a]) > band) in_band = false;
    }
    // visit only the lexicographically positive half-lattice
    int lead = 0;
    for (int a = g.dim - 1; a >= 0 && lead == 0; --a) {
      if (k[a] > 0) lead = 1;
      if (k[a] < 0) lead = -1;
    }
    if (!in_band || lead <= 0) continue;
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) k2 += double(k[a]) * k[a];
    const double env = std::exp(-k2 / (2.0 * k0 * k0));
    const std::size_t j = F.conjugate_index(i);
    for (int c = 0; c < g.dim; ++c) {
      const cplx v(env * rng.symmetric(), env * rng.symmetric());
      F.at(c, i) = v;
      F.at(c, j) = std::conj(v);
    }
  }
  Field f = inverse_transform(leray_project(F));
  const double peak = f.max_abs();
  if (peak > 0.0) f *= amplitude / peak;
  return f;
}

inline Field gradient_field(const GridSpec& g, double amplitude) {
  Field f(g, g.dim);
  const double w = 2.0 * std::numbers::pi / g.length;
  for (std::size_t i = 0; i < g.site_count(); ++i) {
    const auto x = g.position(i);
    for (int a = 0; a < g.dim; ++a) {
      // phi = sum_a cos(w x_a) + sin(2 w x_a) / 2, so d_a phi below
      f.at(a, i) = amplitude * w * (-std::sin(w * x[a]) + std::cos(2.0 * w * x[a]));
    }
  }
  return f;
}

// Nonnegative C^inf bump supported in |x - center| < L/8, unit integral at
// amplitude 1 so it doubles as a mollifier for L^1 smoothing experiments.
inline Field bump(const GridSpec& g, double amplitude) {
  Field f(g, 1);
  const double radius = g.length / 8.0;
  const double c = g.length / 2.0;
  for (std::size_t i = 0; i < g.site_count(); ++i) {
    const auto x = g.position(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += (x[a] - c) * (x[a] - c);
    const double s2 = r2 / (radius * radius);
    f.at(0, i) = s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
  }
  double mass = 0.0;
  for (double v : f.samples) mass += v;
  mass *= g.cell_volume();
  if (mass > 0.0) f *= amplitude / mass;
  return f;
}

}  // namespace detail

// analytic and seeded initial-data presets used as test data everywhere
inline Field make_preset(const std::string& name, const GridSpec& g, double amplitude = 1.0,
                         std::uint64_t seed = 0) {
  if (name == "taylor_green_2d") return detail::taylor_green_2d(g, amplitude);
  if (name == "abc_beltrami_3d") return detail::abc_beltrami_3d(g, amplitude);
  if (name == "random_divfree") return detail::random_divfree(g, amplitude, seed);
  if (name == "gradient_field") return detail::gradient_field(g, amplitude);
  if (name == "bump") return detail::bump(g, amplitude);
  throw std::invalid_argument("make_preset: unknown preset id '" + name + "'");
}

// analytic bump profile matching the grid preset, for radial quadrature paths
struct BumpProfile {
  double radius = 1.0;   // support radius
  double scale = 1.0;    // multiplier in front of exp(1 - 1/(1 - s^2))

  double operator()(double r) const {
    const double s2 = (r / radius) * (r / radius);
    return s2 < 1.0 ? scale * std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
  }
};

}  // namespace fns
