#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/grid.hpp"
#include "fns/quadrature.hpp"

namespace fns::kernels {

// ---------------------------------------------------------------------------
// spherical Bessel functions j0..j3, series near zero, closed forms otherwise
// ---------------------------------------------------------------------------
namespace detail {

inline double sph_j_series(int l, double z) {
  // j_l(z) = z^l / (2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
  double dfact = 1.0;
  for (int i = 2 * l + 1; i > 1; i -= 2) dfact *= i;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -0.5 * z * z / (double(k) * double(2 * l + 2 * k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(z, l) / dfact * sum;
}

inline double sph_j0(double z) {
  return std::abs(z) < 0.5 ? sph_j_series(0, z) : std::sin(z) / z;
}
inline double sph_j1(double z) {
  if (std::abs(z) < 0.5) return sph_j_series(1, z);
  return (std::sin(z) / z - std::cos(z)) / z;
}
inline double sph_j2(double z) {
  if (std::abs(z) < 1.0) return sph_j_series(2, z);
  return ((3.0 / (z * z) - 1.0) * std::sin(z) - 3.0 / z * std::cos(z)) / z;
}
inline double sph_j3(double z) {
  if (std::abs(z) < 2.0) return sph_j_series(3, z);
  const double z2 = z * z;
  return ((15.0 / (z2 * z) - 6.0 / z) * std::sin(z) - (15.0 / z2 - 1.0) * std::cos(z)) / z;
}
// j2(z)/z, stable at the origin
inline double sph_j2_over_z(double z) {
  if (std::abs(z) < 1.0) {
    // z/15 * sum_k (-z^2/2)^k / (k! * 7*9*...*(2k+5))
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
      term *= -0.5 * z * z / (double(k) * double(2 * k + 5));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return z / 15.0 * sum;
  }
  return sph_j2(z) / z;
}

// upper integration limit: symbol below ~1e-20 past this point
inline double rho_cut(double alpha, double t) { return std::pow(45.0 / t, 0.5 / alpha); }

// int_0^inf rho^m exp(-t rho^(2a)) drho = Gamma((m+1)/(2a)) / (2a) / t^((m+1)/(2a))
inline double moment_scale(double alpha, double t, int m) {
  const double e = (m + 1.0) / (2.0 * alpha);
  return std::tgamma(e) / (2.0 * alpha) * std::pow(t, -e);
}

// integral of rho^m exp(-t rho^{2 alpha}) osc(rho r) over [0, rho_cut]
template <class Osc>
double symbol_integral(double alpha, double t, double r, int m, const Osc& osc) {
  const double cut = rho_cut(alpha, t);
  const double tol = 1e-12 * moment_scale(alpha, t, m);
  auto f = [&](double rho) {
    return std::pow(rho, m) * std::exp(-t * std::pow(rho, 2.0 * alpha)) * osc(rho * r);
  };
  if (r <= 0.0) return integrate(f, 0.0, cut, tol);
  const double half_period = std::numbers::pi / r;
  return integrate_oscillatory(f, 0.0, cut, half_period, tol);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fractional heat kernel g_t^alpha, synthesized from the symbol exp(-t |xi|^{2 alpha})
// ---------------------------------------------------------------------------

// radial profile g_t^alpha(r); alpha in (0, 1] accepted so the classical
// Gaussian (alpha = 1) and Poisson (alpha = 1/2) closed forms serve as oracles
inline double heat_kernel_radial(double alpha, double t, double r, int dim = 3) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel_radial: need t > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("heat_kernel_radial: need r >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("heat_kernel_radial: need alpha in (0, 1]");
  using namespace detail;
  switch (dim) {
    case 1:
      return symbol_integral(alpha, t, r, 0, [](double z) { return std::cos(z); }) /
             std::numbers::pi;
    case 2:
      return symbol_integral(alpha, t, r, 1,
                             [](double z) { return std::cyl_bessel_j(0.0, z); }) /
             (2.0 * std::numbers::pi);
    case 3:
      return symbol_integral(alpha, t, r, 2, sph_j0) / (2.0 * std::numbers::pi * std::numbers::pi);
    default:
      throw std::invalid_argument("heat_kernel_radial: dim must be 1, 2 or 3");
  }
}

// radial derivative d/dr g_t^alpha(r); |grad g| = |d_r g|
inline double grad_heat_kernel(double alpha, double t, double r, int dim = 3) {
  if (!(t > 0.0)) throw std::invalid_argument("grad_heat_kernel: need t > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("grad_heat_kernel: need r >= 0");
  using namespace detail;
  switch (dim) {
    case 1:
      return -symbol_integral(alpha, t, r, 1, [](double z) { return std::sin(z); }) /
             std::numbers::pi;
    case 2:
      return -symbol_integral(alpha, t, r, 2,
                              [](double z) { return std::cyl_bessel_j(1.0, z); }) /
             (2.0 * std::numbers::pi);
    case 3:
      return -symbol_integral(alpha, t, r, 3, sph_j1) /
             (2.0 * std::numbers::pi * std::numbers::pi);
    default:
      throw std::invalid_argument("grad_heat_kernel: dim must be 1, 2 or 3");
  }
}

// immutable radial evaluator bundle
struct KernelProfile {
  double alpha = 1.0;
  double t = 1.0;
  int dim = 3;

  KernelProfile(double a, double time, int d = 3) : alpha(a), t(time), dim(d) {
    if (!(t > 0.0)) throw std::invalid_argument("KernelProfile: need t > 0");
  }
  double value(double r) const { return heat_kernel_radial(alpha, t, r, dim); }
  double deriv(double r) const { return grad_heat_kernel(alpha, t, r, dim); }
  // mass over a ball of radius R (radial shell quadrature)
  double mass(double R) const {
    const double tol = 1e-10;
    switch (dim) {
      case 1:
        return 2.0 * integrate([&](double r) { return value(r); }, 0.0, R, tol);
      case 2:
        return 2.0 * std::numbers::pi *
               integrate([&](double r) { return r * value(r); }, 0.0, R, tol);
      default:
        return 4.0 * std::numbers::pi *
               integrate([&](double r) { return r * r * value(r); }, 0.0, R, tol);
    }
  }
  // total mass: ball quadrature plus the analytic power tail. The far field
  // is g ~ C r^{-d-2a} (1 + b r^{-2a} + ...); C and the b-term are estimated
  // from two evaluations and integrated outward.
  double total_mass() const {
    const double R = 80.0 * std::pow(t, 0.5 / alpha);
    const double inner = mass(R);
    const double p = dim + 2.0 * alpha;
    const double c1 = value(R) * std::pow(R, p);
    const double c2 = value(2.0 * R) * std::pow(2.0 * R, p);
    const double w = std::pow(2.0, 2.0 * alpha);
    const double c = (w * c2 - c1) / (w - 1.0);
    const double surface = dim == 1 ? 2.0 : dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    const double tail =
        surface * std::pow(R, -2.0 * alpha) / (2.0 * alpha) * (c + 0.5 * (c1 - c));
    return inner + tail;
  }
};

// ---------------------------------------------------------------------------
// kernel of exp(-t (-Delta)^alpha) P div, 3D
//
// With G_t the radial function whose symbol is exp(-t|xi|^{2 alpha})/|xi|^2,
//   K_{j,hk} = delta_jk d_h g_t + d_h d_j d_k G_t,
// and the third derivative of a radial function needs only two radial
// weights, both plain symbol integrals against spherical Bessel kernels:
//   T1 = G''' - 3G''/r + 3G'/r^2 = -(1/2 pi^2) int rho^3 e j3(rho r) drho
//   T2 = (G'' - G'/r)/r          =  (1/2 pi^2) int rho^3 e j2(rho r)/(rho r) drho
// ---------------------------------------------------------------------------

struct OseenTensor {
  // component [j][h][k]: j-th output from tensor entry (h, k)
  std::array<std::array<std::array<double, 3>, 3>, 3> comp{};

  double frobenius() const {
    double s = 0.0;
    for (const auto& a : comp)
      for (const auto& b : a)
        for (double v : b) s += v * v;
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& a : comp)
      for (const auto& b : a)
        for (double v : b) m = std::max(m, std::abs(v));
    return m;
  }
};

inline OseenTensor oseen_kernel(double alpha, double t, const std::array<double, 3>& x) {
  if (!(t > 0.0)) throw std::invalid_argument("oseen_kernel: need t > 0");
  using namespace detail;
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  OseenTensor K;
  const double inv2pi2 = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
  if (r == 0.0) return K;  // odd kernel vanishes at the origin
  const double gp = -inv2pi2 * symbol_integral(alpha, t, r, 3, sph_j1);
  const double t1 = -inv2pi2 * symbol_integral(alpha, t, r, 3, sph_j3);
  const double t2 = inv2pi2 * symbol_integral(alpha, t, r, 3, sph_j2_over_z);
  std::array<double, 3> u{x[0] / r, x[1] / r, x[2] / r};
  for (int j = 0; j < 3; ++j)
    for (int h = 0; h < 3; ++h)
      for (int k = 0; k < 3; ++k) {
        double v = t1 * u[h] * u[j] * u[k];
        if (j == k) v += gp * u[h] + t2 * u[h];
        if (h == j) v += t2 * u[k];
        if (h == k) v += t2 * u[j];
        K.comp[j][h][k] = v;
      }
  return K;
}

// Spectral synthesis of the same kernel on an auxiliary periodic box: lattice
// sum of the multiplier i xi_h (delta_jk - xi_j xi_k/|xi|^2) exp(-t|xi|^{2a}).
// Independent of the radial-reduction route, used to cross-check it. Points
// outside |x| <= box/8 are rejected: beyond that the periodic images of the
// |x|^{-4} tail are no longer negligible.
struct OseenProfile {
  double alpha = 1.0;
  double t = 1.0;
  int n = 64;        // synthesis resolution per axis
  double box = 16.0; // synthesis box length

  std::vector<double> symbol;  // exp(-t |xi|^{2 alpha}) over the lattice

  OseenProfile(double a, double time, int resolution, double box_length)
      : alpha(a), t(time), n(resolution), box(box_length) {
    if (!(t > 0.0)) throw std::invalid_argument("OseenProfile: need t > 0");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("OseenProfile: resolution must be even");
    symbol.resize(std::size_t(n) * n * n);
    const double base = 2.0 * std::numbers::pi / box;
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const double kx = base * wave(ix), ky = base * wave(iy), kz = base * wave(iz);
          const double k2 = kx * kx + ky * ky + kz * kz;
          symbol[index(ix, iy, iz)] = std::exp(-t * std::pow(k2, alpha));
        }
  }

  int wave(int i) const { return i < n / 2 ? i : i - n; }
  std::size_t index(int ix, int iy, int iz) const {
    return std::size_t(ix) + std::size_t(n) * (std::size_t(iy) + std::size_t(n) * iz);
  }
  double core_radius() const { return box / 8.0; }

  OseenTensor value(const std::array<double, 3>& x) const {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r > core_radius())
      throw std::invalid_argument("OseenProfile: point outside the reliable synthesis core");
    const double base = 2.0 * std::numbers::pi / box;
    std::vector<std::complex<double>> px(n), py(n), pz(n);
    for (int i = 0; i < n; ++i) {
      px[i] = std::polar(1.0, base * wave(i) * x[0]);
      py[i] = std::polar(1.0, base * wave(i) * x[1]);
      pz[i] = std::polar(1.0, base * wave(i) * x[2]);
    }
    OseenTensor K;
    for (int iz = 0; iz < n; ++iz) {
      if (wave(iz) == -n / 2) continue;  // unpaired Nyquist modes break oddness
      for (int iy = 0; iy < n; ++iy) {
        if (wave(iy) == -n / 2) continue;
        const std::complex<double> pyz = py[iy] * pz[iz];
        for (int ix = 0; ix < n; ++ix) {
          if (wave(ix) == -n / 2) continue;
          const double kx = base * wave(ix), ky = base * wave(iy), kz = base * wave(iz);
          const double k2 = kx * kx + ky * ky + kz * kz;
          if (k2 == 0.0) continue;
          const double e = symbol[index(ix, iy, iz)];
          if (e < 1e-300) continue;
          const double s = (px[ix] * pyz).imag();  // sin(xi . x)
          const std::array<double, 3> xi{kx, ky, kz};
          for (int j = 0; j < 3; ++j)
            for (int h = 0; h < 3; ++h)
              for (int k = 0; k < 3; ++k) {
                const double proj = (j == k ? 1.0 : 0.0) - xi[j] * xi[k] / k2;
                K.comp[j][h][k] -= xi[h] * proj * e * s;
              }
        }
      }
    }
    const double scale = 1.0 / (box * box * box);
    for (auto& a : K.comp)
      for (auto& b : a)
        for (double& v : b) v *= scale;
    return K;
  }
};

// ---------------------------------------------------------------------------
// decay estimates: sup |k(t, x)| (t^{1/(2 alpha)} + |x|)^{d+1} over a (t, r)
// lattice; the exact scaling law makes the per-t slice sups coincide
// ---------------------------------------------------------------------------

enum class DecayKernel { GradHeat, Oseen };

struct DecayReport {
  std::string kernel;
  double alpha = 1.0;
  int dim = 3;
  std::vector<double> times;
  std::vector<double> radii;
  std::vector<double> slice_sup;  // one entry per time
  double global_sup = 0.0;
  double max_drift = 0.0;  // (max slice - min slice) / min slice
};

// geometric radius ladder aligned with the kernel scale t^{1/(2 alpha)}: the
// slice sample sets then coincide after rescaling whenever consecutive times
// are a fixed ratio apart, and the slice sups agree to quadrature accuracy
inline std::vector<double> decay_radii(double alpha, const std::vector<double>& times,
                                       double lo_scale = 0.25, double hi_scale = 12.0,
                                       int per_decade_of_time = 12) {
  double tmin = times.front(), tmax = times.front();
  for (double t : times) {
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  const double smin = lo_scale * std::pow(tmin, 0.5 / alpha);
  const double smax = hi_scale * std::pow(tmax, 0.5 / alpha);
  const double q = std::pow(10.0, 1.0 / (2.0 * alpha * per_decade_of_time));
  std::vector<double> radii;
  for (double r = smin; r <= smax * (1.0 + 1e-12); r *= q) radii.push_back(r);
  return radii;
}

inline DecayReport verify_decay(DecayKernel kernel, double alpha,
                                const std::vector<double>& times,
                                const std::vector<double>& radii, int dim = 3) {
  if (times.empty() || radii.empty())
    throw std::invalid_argument("verify_decay: need nonempty times and radii");
  DecayReport rep;
  rep.kernel = kernel == DecayKernel::GradHeat ? "grad_heat" : "oseen";
  rep.alpha = alpha;
  rep.dim = kernel == DecayKernel::Oseen ? 3 : dim;
  rep.times = times;
  rep.radii = radii;
  for (double t : times) {
    const double scale = std::pow(t, 0.5 / alpha);
    double sup = 0.0;
    for (double r : radii) {
      double mag = 0.0;
      if (kernel == DecayKernel::GradHeat) {
        mag = std::abs(grad_heat_kernel(alpha, t, r, rep.dim));
      } else {
        mag = oseen_kernel(alpha, t, {r, 0.0, 0.0}).frobenius();
      }
      sup = std::max(sup, mag * std::pow(scale + r, rep.dim + 1));
    }
    rep.slice_sup.push_back(sup);
    rep.global_sup = std::max(rep.global_sup, sup);
  }
  double lo = rep.slice_sup.front(), hi = lo;
  for (double s : rep.slice_sup) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  rep.max_drift = lo > 0.0 ? (hi - lo) / lo : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// smoothing rates of (-Delta)^{nu/2} exp(-t (-Delta)^alpha)
// ---------------------------------------------------------------------------

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching samples, at least two");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = double(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct SmoothingReport {
  std::string method;
  double alpha = 1.0, nu = 0.0;
  double r_exp = 1.0, p_exp = 2.0;
  std::vector<double> times;
  std::vector<double> ratios;  // ||(-Delta)^{nu/2} g_t * phi||_p / ||phi||_r per time
  double fitted_slope = 0.0;
  double predicted_slope = 0.0;
  bool aliasing_warning = false;
};

// L^1 -> L^infinity path for a radial nonnegative profile: the sup sits at
// the center, where the convolution is a plain radial symbol integral against
// the profile's radial Fourier transform. Valid on all of (0, infinity) in t,
// free of the box-size limits of the grid path.
template <class RadialFn>
SmoothingReport smoothing_bump_linf_l1(double alpha, double nu, const RadialFn& phi,
                                       double support_radius, const std::vector<double>& times) {
  SmoothingReport rep;
  rep.method = "bump_linf_l1";
  rep.alpha = alpha;
  rep.nu = nu;
  rep.r_exp = 1.0;
  rep.p_exp = std::numeric_limits<double>::infinity();
  rep.times = times;
  rep.predicted_slope = -nu / (2.0 * alpha) - 3.0 / (2.0 * alpha);

  const double tol = 1e-12;
  const double mass = 4.0 * std::numbers::pi *
                      integrate([&](double s) { return phi(s) * s * s; }, 0.0, support_radius, tol);
  auto phi_hat = [&](double rho) {
    return 4.0 * std::numbers::pi *
           integrate([&](double s) { return phi(s) * s * s * detail::sph_j0(rho * s); }, 0.0,
                     support_radius, tol * std::max(1.0, mass));
  };
  for (double t : times) {
    const double cut = detail::rho_cut(alpha, t);
    const double scale = detail::moment_scale(alpha, t, 2 + int(std::round(nu)));
    const double center_value =
        integrate(
            [&](double rho) {
              return std::pow(rho, 2.0 + nu) * std::exp(-t * std::pow(rho, 2.0 * alpha)) *
                     phi_hat(rho);
            },
            0.0, cut, 1e-11 * std::max(scale, 1e-300)) /
        (2.0 * std::numbers::pi * std::numbers::pi);
    rep.ratios.push_back(center_value / mass);
  }
  rep.fitted_slope = loglog_slope(rep.times, rep.ratios);
  return rep;
}

// L^2 -> L^2 path: the operator norm is the multiplier sup, available in
// closed form; sup_rho rho^nu exp(-t rho^{2 alpha})
inline SmoothingReport smoothing_l2_operator(double alpha, double nu,
                                             const std::vector<double>& times) {
  SmoothingReport rep;
  rep.method = "l2_operator";
  rep.alpha = alpha;
  rep.nu = nu;
  rep.r_exp = 2.0;
  rep.p_exp = 2.0;
  rep.times = times;
  rep.predicted_slope = -nu / (2.0 * alpha);
  for (double t : times) {
    if (nu == 0.0) {
      rep.ratios.push_back(1.0);
    } else {
      const double rho_star = std::pow(nu / (2.0 * alpha * t), 0.5 / alpha);
      rep.ratios.push_back(std::pow(rho_star, nu) * std::exp(-nu / (2.0 * alpha)));
    }
  }
  rep.fitted_slope = nu == 0.0 ? 0.0 : loglog_slope(rep.times, rep.ratios);
  return rep;
}

// grid path: multiplier |xi|^nu exp(-t |xi|^{2 alpha}) applied to a sampled
// profile, then the ratio of constant-exponent grid norms. Subject to the
// periodic box: usable while the kernel width stays well inside the box.
inline SmoothingReport smoothing_grid(double alpha, double nu, double r_exp, double p_exp,
                                      const Field& phi, const std::vector<double>& times) {
  if (phi.components != 1) throw std::invalid_argument("smoothing_grid: scalar profile expected");
  SmoothingReport rep;
  rep.method = "grid_multiplier";
  rep.alpha = alpha;
  rep.nu = nu;
  rep.r_exp = r_exp;
  rep.p_exp = p_exp;
  rep.times = times;
  const int d = phi.grid.dim;
  rep.predicted_slope =
      -nu / (2.0 * alpha) - d / (2.0 * alpha) * (1.0 / r_exp - (std::isinf(p_exp) ? 0.0 : 1.0 / p_exp));

  const SpectralField spec = forward_transform(phi);
  // band-limit check: spectral mass above the 2/3 cutoff
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < phi.grid.site_count(); ++i) {
    const double m = std::norm(spec.at(0, i));
    total += m;
    if (!dealias_keeps(phi.grid, i)) high += m;
  }
  rep.aliasing_warning = total > 0.0 && high > 1e-5 * total;

  // ||phi||_r with the plain grid measure
  auto grid_norm = [&](const Field& f, double p) {
    if (std::isinf(p)) return f.max_abs();
    double acc = 0.0;
    for (double v : f.samples) acc += std::pow(std::abs(v), p);
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
  };
  const double denom = grid_norm(phi, r_exp);

  for (double t : times) {
    SpectralField out = spec;
    for (std::size_t i = 0; i < phi.grid.site_count(); ++i) {
      const auto xi = phi.grid.wavevector(i);
      double k2 = 0.0;
      for (int a = 0; a < d; ++a) k2 += xi[a] * xi[a];
      const double mult =
          (k2 == 0.0 && nu > 0.0) ? 0.0 : std::pow(k2, 0.5 * nu) * std::exp(-t * std::pow(k2, alpha));
      out.at(0, i) *= mult;
    }
    rep.ratios.push_back(grid_norm(inverse_transform(out), p_exp) / denom);
  }
  rep.fitted_slope = loglog_slope(rep.times, rep.ratios);
  return rep;
}

// ---------------------------------------------------------------------------
// int_0^inf ds / (s^{1/(2 alpha)} + r)^4 = c_alpha r^{2 alpha - 4}, with
// c_alpha = int_0^inf dbeta / (1 + beta^{1/(2 alpha)})^4; c_1 = 1/3
// ---------------------------------------------------------------------------
inline double time_integral_constant(double alpha, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("time_integral_constant: need r > 0");
  // substitute u = s^{1/(2 alpha)}: integrand 2 alpha u^{2 alpha - 1} / (u + r)^4
  const double a2 = 2.0 * alpha;
  const double U = 100.0 * r;
  auto f = [&](double u) { return a2 * std::pow(u, a2 - 1.0) / std::pow(u + r, 4.0); };
  const double rough = std::pow(r, a2 - 4.0) / 3.0;
  double value = integrate(f, 0.0, U, 1e-12 * rough);
  // analytic tail from (1 + r/u)^{-4} = 1 - 4 r/u + 10 r^2/u^2 - ...
  value += a2 * (std::pow(U, a2 - 4.0) / (4.0 - a2) - 4.0 * r * std::pow(U, a2 - 5.0) / (5.0 - a2) +
                 10.0 * r * r * std::pow(U, a2 - 6.0) / (6.0 - a2));
  return value;
}

inline double time_integral_calpha(double alpha) { return time_integral_constant(alpha, 1.0); }

// ---------------------------------------------------------------------------
// exact Fourier action of the semigroup, and the semigroup property check
// ---------------------------------------------------------------------------
inline SpectralField semigroup_apply(double alpha, double t, const SpectralField& F,
                                     double viscosity = 1.0) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: need t >= 0");
  SpectralField out = F;
  if (t == 0.0) return out;
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = F.grid.wavevector(i);
    double k2 = 0.0;
    for (int a = 0; a < F.grid.dim; ++a) k2 += xi[a] * xi[a];
    const double factor = std::exp(-viscosity * t * std::pow(k2, alpha));
    for (int c = 0; c < F.components; ++c) out.at(c, i) *= factor;
  }
  return out;
}

// || S_t S_s F - S_{t+s} F ||_inf relative to ||F||_inf
inline double semigroup_check(double alpha, double t, double s, const SpectralField& F) {
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("semigroup_check: need t, s >= 0");
  SpectralField two = semigroup_apply(alpha, t, semigroup_apply(alpha, s, F));
  const SpectralField one = semigroup_apply(alpha, t + s, F);
  two -= one;
  const double scale = F.max_abs();
  return scale > 0.0 ? two.max_abs() / scale : 0.0;
}

}  // namespace fns::kernels
