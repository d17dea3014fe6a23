#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/fft.hpp"
#include "fns/parallel.hpp"

namespace fns {

using cplx = std::complex<double>;

// Uniform periodic grid on [0, L)^d, N points per axis, x1 varying fastest.
//
// Spectral convention: coefficients are Fourier-series coefficients,
//   f(x) = sum_k c(k) exp(i xi_k . x),  xi_k = 2 pi k / L,  -N/2 <= k_j < N/2,
// i.e. the forward transform carries the 1/N^d factor and the inverse is a
// plain synthesis sum. A constant field f = c has c(0) = c; a unit sine has
// two conjugate coefficients of modulus 1/2.
struct GridSpec {
  int dim = 1;
  int points = 4;
  double length = 1.0;

  GridSpec() = default;
  GridSpec(int d, int n, double box_length) : dim(d), points(n), length(box_length) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridSpec: dimension must be 1, 2 or 3");
    if (points < 4 || points % 2 != 0)
      throw std::invalid_argument("GridSpec: points per axis must be even and >= 4");
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("GridSpec: box length must be positive");
  }

  std::size_t site_count() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= std::size_t(points);
    return s;
  }
  double spacing() const { return length / points; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  double volume() const { return std::pow(length, dim); }

  // integer lattice coordinate -> storage index and back
  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      idx[a] = int(flat % std::size_t(points));
      flat /= std::size_t(points);
    }
    return idx;
  }
  std::size_t flatten(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int a = dim - 1; a >= 0; --a) f = f * std::size_t(points) + std::size_t(idx[a]);
    return f;
  }

  // signed wavenumber k in [-N/2, N/2) from a storage index in [0, N)
  int wave_index(int storage) const { return storage < points / 2 ? storage : storage - points; }
  int storage_index(int k) const { return k >= 0 ? k : k + points; }

  std::array<double, 3> position(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = idx[a] * spacing();
    return x;
  }
  std::array<double, 3> wavevector(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    const double base = 2.0 * std::numbers::pi / length;
    for (int a = 0; a < dim; ++a) xi[a] = base * wave_index(idx[a]);
    return xi;
  }
  // wavevector for odd (derivative-type) multipliers: the Nyquist frequency
  // k = -N/2 has no partner +N/2 on the lattice, so i xi at that index would
  // break Hermitian symmetry; it is treated as zero, the usual pseudo-spectral
  // convention
  std::array<double, 3> derivative_wavevector(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    const double base = 2.0 * std::numbers::pi / length;
    for (int a = 0; a < dim; ++a) {
      const int k = wave_index(idx[a]);
      xi[a] = k == -points / 2 ? 0.0 : base * k;
    }
    return xi;
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && points == o.points && length == o.length;
  }
};

// Real vector field sampled on a grid, component-major, x-fastest.
struct Field {
  GridSpec grid;
  int components = 1;
  std::vector<double> samples;

  Field() = default;
  Field(const GridSpec& g, int m) : grid(g), components(m), samples(m * g.site_count(), 0.0) {
    if (m < 1) throw std::invalid_argument("Field: components must be >= 1");
  }

  double& at(int c, std::size_t flat) { return samples[std::size_t(c) * grid.site_count() + flat]; }
  double at(int c, std::size_t flat) const {
    return samples[std::size_t(c) * grid.site_count() + flat];
  }

  bool finite() const {
    for (double v : samples)
      if (!std::isfinite(v)) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  // pointwise Euclidean magnitude across components
  std::vector<double> magnitude() const {
    const std::size_t n = grid.site_count();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < components; ++c) {
        const double v = at(c, i);
        s += v * v;
      }
      out[i] = std::sqrt(s);
    }
    return out;
  }

  Field& operator*=(double a) {
    for (double& v : samples) v *= a;
    return *this;
  }
  Field& operator+=(const Field& o) {
    if (!(grid == o.grid) || components != o.components)
      throw std::invalid_argument("Field: incompatible operands");
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += o.samples[i];
    return *this;
  }
};

// Complex Fourier coefficients of a real field; same storage layout with the
// wavenumber of storage index i being i for i < N/2 and i - N otherwise.
struct SpectralField {
  GridSpec grid;
  int components = 1;
  std::vector<cplx> coeff;

  SpectralField() = default;
  SpectralField(const GridSpec& g, int m)
      : grid(g), components(m), coeff(m * g.site_count(), cplx(0.0, 0.0)) {
    if (m < 1) throw std::invalid_argument("SpectralField: components must be >= 1");
  }

  cplx& at(int c, std::size_t flat) { return coeff[std::size_t(c) * grid.site_count() + flat]; }
  cplx at(int c, std::size_t flat) const {
    return coeff[std::size_t(c) * grid.site_count() + flat];
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : coeff) m = std::max(m, std::abs(v));
    return m;
  }

  // storage index of -k
  std::size_t conjugate_index(std::size_t flat) const {
    auto idx = grid.unflatten(flat);
    for (int a = 0; a < grid.dim; ++a) idx[a] = (grid.points - idx[a]) % grid.points;
    return grid.flatten(idx);
  }

  // max |c(-k) - conj(c(k))|, normalized by max |c|
  double hermitian_defect() const {
    const std::size_t n = grid.site_count();
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (int c = 0; c < components; ++c)
      for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(at(c, conjugate_index(i)) - std::conj(at(c, i))));
    return worst / scale;
  }

  SpectralField& operator*=(double a) {
    for (cplx& v : coeff) v *= a;
    return *this;
  }
  SpectralField& operator+=(const SpectralField& o) {
    if (!(grid == o.grid) || components != o.components)
      throw std::invalid_argument("SpectralField: incompatible operands");
    for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] += o.coeff[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    if (!(grid == o.grid) || components != o.components)
      throw std::invalid_argument("SpectralField: incompatible operands");
    for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] -= o.coeff[i];
    return *this;
  }
};

namespace detail {

// In-place multidimensional FFT of one component, sign -1 forward.
inline void fft_nd(cplx* data, const GridSpec& g, int sign) {
  const int n = g.points;
  const Fft plan{std::size_t(n)};
  std::size_t stride = 1;
  const std::size_t total = g.site_count();
  for (int axis = 0; axis < g.dim; ++axis) {
    const std::size_t lines = total / std::size_t(n);
    const std::size_t block = stride * std::size_t(n);
    parallel_for(lines, [&](std::size_t line) {
      std::vector<cplx> buf(static_cast<std::size_t>(n));
      const std::size_t base = (line / stride) * block + (line % stride);
      for (int j = 0; j < n; ++j) buf[std::size_t(j)] = data[base + std::size_t(j) * stride];
      plan.transform(buf.data(), sign);
      for (int j = 0; j < n; ++j) data[base + std::size_t(j) * stride] = buf[std::size_t(j)];
    });
    stride *= std::size_t(n);
  }
}

}  // namespace detail

inline SpectralField forward_transform(const Field& f) {
  if (!f.finite()) throw std::invalid_argument("forward_transform: non-finite sample in input");
  SpectralField out(f.grid, f.components);
  const std::size_t n = f.grid.site_count();
  const double scale = 1.0 / double(n);
  std::vector<cplx> buf(n);
  for (int c = 0; c < f.components; ++c) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(f.at(c, i), 0.0);
    detail::fft_nd(buf.data(), f.grid, -1);
    for (std::size_t i = 0; i < n; ++i) out.at(c, i) = buf[i] * scale;
  }
  return out;
}

inline Field inverse_transform(const SpectralField& F, double symmetry_tol = 1e-12) {
  if (F.hermitian_defect() > symmetry_tol)
    throw std::invalid_argument("inverse_transform: Hermitian symmetry violated beyond tolerance");
  Field out(F.grid, F.components);
  const std::size_t n = F.grid.site_count();
  std::vector<cplx> buf(n);
  for (int c = 0; c < F.components; ++c) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = F.at(c, i);
    detail::fft_nd(buf.data(), F.grid, +1);
    double maxmod = 0.0, maximag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      maxmod = std::max(maxmod, std::abs(buf[i]));
      maximag = std::max(maximag, std::abs(buf[i].imag()));
    }
    if (maximag > 1e-12 * std::max(maxmod, 1e-300) && maximag > 1e-300)
      throw std::runtime_error("inverse_transform: imaginary residue above tolerance");
    for (std::size_t i = 0; i < n; ++i) out.at(c, i) = buf[i].real();
  }
  return out;
}

// exact projection onto the Hermitian subspace, averaging c(k) with the
// conjugate of c(-k); removes roundoff asymmetry from internally built spectra
inline SpectralField hermitian_symmetrize(const SpectralField& F) {
  SpectralField out = F;
  const std::size_t n = F.grid.site_count();
  for (int c = 0; c < F.components; ++c)
    for (std::size_t i = 0; i < n; ++i)
      out.at(c, i) = 0.5 * (F.at(c, i) + std::conj(F.at(c, F.conjugate_index(i))));
  return out;
}

// inverse transform for spectra built by Hermitian-preserving algebra:
// symmetrizes instead of rejecting and discards the imaginary residue, so
// roundoff-scale fields do not trip the strict gate
inline Field inverse_transform_lenient(const SpectralField& F) {
  const SpectralField sym = hermitian_symmetrize(F);
  Field out(F.grid, F.components);
  const std::size_t n = F.grid.site_count();
  std::vector<cplx> buf(n);
  for (int c = 0; c < F.components; ++c) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = sym.at(c, i);
    detail::fft_nd(buf.data(), F.grid, +1);
    for (std::size_t i = 0; i < n; ++i) out.at(c, i) = buf[i].real();
  }
  return out;
}

// scalar field sum_j i xi_j F_j(xi)
inline SpectralField divergence_spectral(const SpectralField& F) {
  if (F.components != F.grid.dim)
    throw std::invalid_argument("divergence_spectral: need one component per dimension");
  SpectralField out(F.grid, 1);
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = F.grid.derivative_wavevector(i);
    cplx acc(0.0, 0.0);
    for (int c = 0; c < F.components; ++c) acc += cplx(0.0, xi[c]) * F.at(c, i);
    out.at(0, i) = acc;
  }
  return out;
}

// curl in 3D (vector) as a Fourier multiplier
inline SpectralField curl_spectral(const SpectralField& F) {
  if (F.grid.dim != 3 || F.components != 3)
    throw std::invalid_argument("curl_spectral: requires a 3D vector field");
  SpectralField out(F.grid, 3);
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = F.grid.derivative_wavevector(i);
    const cplx u = F.at(0, i), v = F.at(1, i), w = F.at(2, i);
    out.at(0, i) = cplx(0.0, 1.0) * (xi[1] * w - xi[2] * v);
    out.at(1, i) = cplx(0.0, 1.0) * (xi[2] * u - xi[0] * w);
    out.at(2, i) = cplx(0.0, 1.0) * (xi[0] * v - xi[1] * u);
  }
  return out;
}

// 2/3-rule truncation: zero every coefficient with some |k_j| > N/3.
inline bool dealias_keeps(const GridSpec& g, std::size_t flat) {
  const auto idx = g.unflatten(flat);
  const int cut = g.points / 3;
  for (int a = 0; a < g.dim; ++a)
    if (std::abs(g.wave_index(idx[a])) > cut) return false;
  return true;
}

inline void dealias_inplace(SpectralField& F) {
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (dealias_keeps(F.grid, i)) continue;
    for (int c = 0; c < F.components; ++c) F.at(c, i) = cplx(0.0, 0.0);
  }
}

inline SpectralField dealias(const SpectralField& F) {
  SpectralField out = F;
  dealias_inplace(out);
  return out;
}

// Divergence-free projection P = Id - xi xi^T / |xi|^2, the Leray projector.
// The zero mode carries no divergence and is passed through unchanged.
inline SpectralField leray_project(const SpectralField& F) {
  if (F.components != F.grid.dim)
    throw std::invalid_argument("leray_project: need one component per dimension");
  SpectralField out = F;
  const std::size_t n = F.grid.site_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = F.grid.derivative_wavevector(i);
    double xi2 = 0.0;
    for (int a = 0; a < F.grid.dim; ++a) xi2 += xi[a] * xi[a];
    if (xi2 == 0.0) continue;
    cplx dot(0.0, 0.0);
    for (int a = 0; a < F.grid.dim; ++a) dot += xi[a] * out.at(a, i);
    dot /= xi2;
    for (int a = 0; a < F.grid.dim; ++a) out.at(a, i) -= xi[a] * dot;
  }
  return out;
}

// Plancherel sums: sum |f|^2 dV over the grid equals L^d sum |c(k)|^2.
inline double parseval_physical(const Field& f) {
  double s = 0.0;
  for (double v : f.samples) s += v * v;
  return s * f.grid.cell_volume();
}
inline double parseval_spectral(const SpectralField& F) {
  double s = 0.0;
  for (const cplx& v : F.coeff) s += std::norm(v);
  return s * F.grid.volume();
}

// sqrt of the Plancherel sum, the discrete L^2 norm
inline double l2_norm(const SpectralField& F) { return std::sqrt(parseval_spectral(F)); }

}  // namespace fns
