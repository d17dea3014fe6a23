#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fns/grid.hpp"
#include "fns/parallel.hpp"
#include "fns/varlp.hpp"

namespace fns::ops {

// ---------------------------------------------------------------------------
// Hardy-Littlewood maximal function, uncentered, over a radius ladder.
// M f(x) = max over ladder radii r and ball centers c with |c - x| <= r of
// the average of |f| over the lattice ball B(c, r), periodic wrap.
// ---------------------------------------------------------------------------

struct RadiusLadder {
  std::vector<double> radii;  // sorted ascending

  static RadiusLadder geometric(const GridSpec& g, double ratio = 2.0) {
    RadiusLadder ladder;
    const double cap = g.length / 2.0;
    for (double r = g.spacing(); r <= cap * (1.0 + 1e-12); r *= ratio) ladder.radii.push_back(r);
    if (ladder.radii.empty()) ladder.radii.push_back(g.spacing());
    return ladder;
  }
};

namespace detail {

// lattice offsets with |delta| <= N/2 per axis, sorted by Euclidean length
struct OffsetTable {
  std::vector<std::size_t> flat;   // offset as a wrapped storage index
  std::vector<double> dist;       // physical length, ascending
  std::vector<std::array<int, 3>> delta;

  explicit OffsetTable(const GridSpec& g) {
    const std::size_t n = g.site_count();
    flat.resize(n);
    dist.resize(n);
    delta.resize(n);
    std::vector<std::size_t> order(n);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = g.unflatten(i);
      double s = 0.0;
      std::array<int, 3> del{0, 0, 0};
      for (int a = 0; a < g.dim; ++a) {
        del[a] = g.wave_index(idx[a]);  // same wrap as signed wavenumbers
        s += double(del[a]) * del[a];
      }
      order[i] = i;
      d2[i] = s;
      delta[i] = del;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
    const double h = g.spacing();
    const std::vector<std::array<int, 3>> unsorted = delta;
    for (std::size_t k = 0; k < n; ++k) {
      flat[k] = order[k];
      dist[k] = h * std::sqrt(d2[order[k]]);
      delta[k] = unsorted[order[k]];
    }
  }
};

inline std::size_t shift_index(const GridSpec& g, const std::array<int, 3>& idx,
                               const std::array<int, 3>& delta) {
  std::array<int, 3> out{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    int v = idx[a] + delta[a];
    if (v >= g.points) v -= g.points;
    if (v < 0) v += g.points;
    out[a] = v;
  }
  return g.flatten(out);
}

}  // namespace detail

// ball-average fields over the ladder radii, one vector per radius
inline std::vector<std::vector<double>> ball_averages(const Field& f,
                                                      const RadiusLadder& ladder) {
  const GridSpec& g = f.grid;
  const detail::OffsetTable offsets(g);
  const auto mag = f.magnitude();
  const std::size_t n = g.site_count();

  // prefix counts at each ladder radius
  std::vector<std::size_t> cut(ladder.radii.size());
  for (std::size_t k = 0; k < ladder.radii.size(); ++k) {
    const double r = ladder.radii[k] * (1.0 + 1e-12);
    cut[k] = std::size_t(std::upper_bound(offsets.dist.begin(), offsets.dist.end(), r) -
                         offsets.dist.begin());
  }

  std::vector<std::vector<double>> avg(ladder.radii.size(), std::vector<double>(n, 0.0));
  parallel_for(n, [&](std::size_t x) {
    const auto idx = g.unflatten(x);
    double acc = 0.0;
    std::size_t o = 0;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      for (; o < cut[k]; ++o) acc += mag[detail::shift_index(g, idx, offsets.delta[o])];
      avg[k][x] = acc / double(cut[k]);
    }
  });
  return avg;
}

inline Field maximal_function(const Field& f, const RadiusLadder& ladder) {
  const GridSpec& g = f.grid;
  const detail::OffsetTable offsets(g);
  const auto avg = ball_averages(f, ladder);
  const std::size_t n = g.site_count();

  std::vector<std::size_t> cut(ladder.radii.size());
  for (std::size_t k = 0; k < ladder.radii.size(); ++k) {
    const double r = ladder.radii[k] * (1.0 + 1e-12);
    cut[k] = std::size_t(std::upper_bound(offsets.dist.begin(), offsets.dist.end(), r) -
                         offsets.dist.begin());
  }

  Field out(g, 1);
  parallel_for(n, [&](std::size_t x) {
    const auto idx = g.unflatten(x);
    double best = 0.0;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      // any ball of radius r_k whose center lies within r_k of x contains x
      for (std::size_t o = 0; o < cut[k]; ++o)
        best = std::max(best, avg[k][detail::shift_index(g, idx, offsets.delta[o])]);
    }
    out.at(0, x) = best;
  });
  return out;
}

inline Field maximal_function(const Field& f) {
  return maximal_function(f, RadiusLadder::geometric(f.grid));
}

// ||M f||_{p(.)} / ||f||_{p(.)}
inline double maximal_bound_check(const Field& f, const varlp::VariableExponent& p) {
  if (!(p.p_minus > 1.0))
    throw std::invalid_argument("maximal_bound_check: need p- > 1 for boundedness");
  const double denom = varlp::luxemburg_norm(f, p);
  if (denom == 0.0) return 0.0;
  return varlp::luxemburg_norm(maximal_function(f), p) / denom;
}

// ---------------------------------------------------------------------------
// |(phi * f)(x)| <= ||phi||_1 M f(x) for radial nonincreasing phi.
// The check samples phi on the lattice, verifies the shape hypotheses, and
// compares the periodic convolution against the centered all-radii maximal
// field, for which the discrete layer-cake identity makes the bound exact.
// ---------------------------------------------------------------------------

struct ConvBoundReport {
  double phi_l1 = 0.0;
  double max_margin = 0.0;  // max over x of |phi*f| - ||phi||_1 M f, <= 0 up to roundoff
  double scale = 0.0;       // ||phi||_1 * max M f, for relative comparisons
};

inline ConvBoundReport conv_radial_bound_check(const std::function<double(double)>& phi,
                                               const Field& f) {
  const GridSpec& g = f.grid;
  const detail::OffsetTable offsets(g);
  const std::size_t n = g.site_count();

  // sampled kernel, radially nonincreasing and nonnegative on the lattice radii
  std::vector<double> phi_at(n);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < n; ++o) {
    const double v = phi(offsets.dist[o]);
    if (!(v >= 0.0))
      throw std::invalid_argument("conv_radial_bound_check: kernel must be nonnegative");
    if (o > 0 && offsets.dist[o] > offsets.dist[o - 1] + 1e-15 && v > prev * (1.0 + 1e-12))
      throw std::invalid_argument("conv_radial_bound_check: kernel must be radially nonincreasing");
    if (o == 0 || offsets.dist[o] > offsets.dist[o - 1] + 1e-15) prev = v;
    phi_at[o] = v;
  }

  ConvBoundReport rep;
  for (double v : phi_at) rep.phi_l1 += v;
  rep.phi_l1 *= g.cell_volume();

  const auto mag = f.magnitude();
  std::vector<double> conv(n, 0.0), maximal(n, 0.0);
  parallel_for(n, [&](std::size_t x) {
    const auto idx = g.unflatten(x);
    double acc_conv = 0.0, acc_sum = 0.0, best = 0.0;
    for (std::size_t o = 0; o < n; ++o) {
      const double v = mag[detail::shift_index(g, idx, offsets.delta[o])];
      acc_conv += phi_at[o] * v;
      acc_sum += v;
      // close a ball at every distinct radius
      if (o + 1 == n || offsets.dist[o + 1] > offsets.dist[o] + 1e-15)
        best = std::max(best, acc_sum / double(o + 1));
    }
    conv[x] = acc_conv * g.cell_volume();
    maximal[x] = best;
  });

  double max_m = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    rep.max_margin = std::max(rep.max_margin, conv[x] - rep.phi_l1 * maximal[x]);
    max_m = std::max(max_m, maximal[x]);
  }
  rep.scale = rep.phi_l1 * max_m;
  return rep;
}

// ---------------------------------------------------------------------------
// Riesz transforms and potentials
// ---------------------------------------------------------------------------

// R_j with multiplier -i xi_j / |xi|; the mean has no preferred direction and
// is annihilated
inline SpectralField riesz_transform(const SpectralField& F, int j) {
  if (j < 1 || j > F.grid.dim) throw std::invalid_argument("riesz_transform: bad direction");
  SpectralField out = F;
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = F.grid.derivative_wavevector(i);
    double norm2 = 0.0;
    for (int a = 0; a < F.grid.dim; ++a) norm2 += xi[a] * xi[a];
    const cplx m = norm2 == 0.0 ? cplx(0.0, 0.0) : cplx(0.0, -xi[j - 1] / std::sqrt(norm2));
    for (int c = 0; c < F.components; ++c) out.at(c, i) *= m;
  }
  return out;
}

namespace detail {

// integral of |y|^{beta - d} over the ball of volume equal to one grid cell
inline double singular_cell_integral(const GridSpec& g, double beta) {
  const double cv = g.cell_volume();
  switch (g.dim) {
    case 1: {
      const double rho = cv / 2.0;
      return 2.0 * std::pow(rho, beta) / beta;
    }
    case 2: {
      const double rho = std::sqrt(cv / std::numbers::pi);
      return 2.0 * std::numbers::pi * std::pow(rho, beta) / beta;
    }
    default: {
      const double rho = std::cbrt(3.0 * cv / (4.0 * std::numbers::pi));
      return 4.0 * std::numbers::pi * std::pow(rho, beta) / beta;
    }
  }
}

}  // namespace detail

// I_beta(f)(x) = int |f(y)| / |x-y|^{d-beta} dy as a direct lattice sum with
// minimum-image distances; the singular cell is replaced by the analytic
// integral of |y|^{beta-d} over the equal-volume ball. Reference path.
inline Field riesz_potential_direct(const Field& f, double beta) {
  const GridSpec& g = f.grid;
  if (!(beta > 0.0 && beta < g.dim))
    throw std::invalid_argument("riesz_potential_direct: need 0 < beta < d");
  const detail::OffsetTable offsets(g);
  const std::size_t n = g.site_count();

  std::vector<double> weight(n);
  weight[0] = detail::singular_cell_integral(g, beta);
  for (std::size_t o = 1; o < n; ++o)
    weight[o] = g.cell_volume() * std::pow(offsets.dist[o], beta - g.dim);

  const auto mag = f.magnitude();
  Field out(g, 1);
  parallel_for(n, [&](std::size_t x) {
    const auto idx = g.unflatten(x);
    double acc = 0.0;
    for (std::size_t o = 0; o < n; ++o)
      acc += weight[o] * mag[detail::shift_index(g, idx, offsets.delta[o])];
    out.at(0, x) = acc;
  });
  return out;
}

// fast path: the same lattice operator as riesz_potential_direct, evaluated
// as a cyclic convolution in Fourier space (two-implementation oracle)
inline Field riesz_potential_fft(const Field& f, double beta) {
  const GridSpec& g = f.grid;
  if (!(beta > 0.0 && beta < g.dim))
    throw std::invalid_argument("riesz_potential_fft: need 0 < beta < d");
  const detail::OffsetTable offsets(g);
  const std::size_t n = g.site_count();
  Field kernel(g, 1);
  kernel.at(0, offsets.flat[0]) = detail::singular_cell_integral(g, beta) / g.cell_volume();
  for (std::size_t o = 1; o < n; ++o)
    kernel.at(0, offsets.flat[o]) = std::pow(offsets.dist[o], beta - g.dim);
  Field mag(g, 1);
  {
    const auto m = f.magnitude();
    for (std::size_t i = 0; i < m.size(); ++i) mag.at(0, i) = m[i];
  }
  SpectralField K = forward_transform(kernel);
  SpectralField F = forward_transform(mag);
  for (std::size_t i = 0; i < n; ++i) F.at(0, i) *= g.volume() * K.at(0, i);
  return inverse_transform(F, 1e-9);
}

// A different regularization: the continuum symbol of |x|^{beta-d}, namely
// 2^beta pi^{d/2} Gamma(beta/2) / Gamma((d-beta)/2) |xi|^{-beta}, zero mode
// annihilated. Differs from the box-truncated kernel in its largest-scale
// content (percent level on centrally supported data), so it is reported
// next to the direct sum rather than asserted equal to it.
inline Field riesz_potential_symbol(const Field& f, double beta) {
  const GridSpec& g = f.grid;
  if (!(beta > 0.0 && beta < g.dim))
    throw std::invalid_argument("riesz_potential_symbol: need 0 < beta < d");
  Field mag(g, 1);
  {
    const auto m = f.magnitude();
    for (std::size_t i = 0; i < m.size(); ++i) mag.at(0, i) = m[i];
  }
  SpectralField F = forward_transform(mag);
  const double c = std::pow(2.0, beta) * std::pow(std::numbers::pi, g.dim / 2.0) *
                   std::tgamma(beta / 2.0) / std::tgamma((g.dim - beta) / 2.0);
  const std::size_t n = g.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = g.wavevector(i);
    double norm2 = 0.0;
    for (int a = 0; a < g.dim; ++a) norm2 += xi[a] * xi[a];
    F.at(0, i) *= norm2 == 0.0 ? 0.0 : c * std::pow(norm2, -beta / 2.0);
  }
  return inverse_transform(F);
}

// ||I_beta f||_{q(.)} / ||f||_{p(.)} with 1/q = 1/p - beta/d pointwise
inline double riesz_potential_bound_check(const Field& f, double beta,
                                          const varlp::VariableExponent& p) {
  const GridSpec& g = f.grid;
  varlp::require_grid_domain(f, p, "riesz_potential_bound_check");
  if (!(beta > 0.0 && beta < g.dim / p.p_plus))
    throw std::invalid_argument("riesz_potential_bound_check: need 0 < beta < d/p+");
  std::vector<double> qtab(p.domain.size());
  for (std::size_t i = 0; i < qtab.size(); ++i) {
    const double inv = 1.0 / p.sample(i) - beta / g.dim;
    if (!(inv > 0.0))
      throw std::invalid_argument("riesz_potential_bound_check: induced exponent not positive");
    qtab[i] = 1.0 / inv;
  }
  const auto q = varlp::VariableExponent::from_table(std::move(qtab), p.domain);
  const double denom = varlp::luxemburg_norm(f, p);
  if (denom == 0.0) return 0.0;
  return varlp::luxemburg_norm(riesz_potential_direct(f, beta), q) / denom;
}

// ||I_beta f||_{rho(.)} / ||f||_{L^{p(.)} cap L^frak_p}; the caller supplies
// rho explicitly
inline double mixed_riesz_check(const Field& f, double beta, const varlp::VariableExponent& p,
                                double frak_p, const varlp::VariableExponent& rho) {
  const GridSpec& g = f.grid;
  varlp::require_grid_domain(f, p, "mixed_riesz_check");
  if (!(frak_p > 1.0)) throw std::invalid_argument("mixed_riesz_check: need frak_p > 1");
  if (!(beta > 0.0 && beta < std::min(g.dim / p.p_plus, g.dim / frak_p)))
    throw std::invalid_argument("mixed_riesz_check: need 0 < beta < min(d/p+, d/frak_p)");
  const double denom = varlp::mixed_norm(f, p, frak_p);
  if (denom == 0.0) return 0.0;
  return varlp::luxemburg_norm(riesz_potential_direct(f, beta), rho) / denom;
}

// The instantiation used for the global-solution bilinear estimate:
// beta = 2 alpha - 1, tensor data measured in L^{p(.)/2} cap L^{3/(2(2a-1))},
// output back in L^{p(.)}.
struct MixedRieszInstance {
  double beta;
  double frak_p;
  varlp::VariableExponent p_half;
  varlp::VariableExponent rho;
};

inline MixedRieszInstance mixed_riesz_thm2_instance(double alpha,
                                                    const varlp::VariableExponent& p) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw std::invalid_argument("mixed_riesz_thm2_instance: need alpha in (1/2, 1]");
  std::vector<double> half(p.domain.size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = p.sample(i) / 2.0;
  return MixedRieszInstance{2.0 * alpha - 1.0, 3.0 / (2.0 * (2.0 * alpha - 1.0)),
                            varlp::VariableExponent::from_table(std::move(half), p.domain), p};
}

using fns::leray_project;  // divergence-free projection lives with the grid multipliers

}  // namespace fns::ops
