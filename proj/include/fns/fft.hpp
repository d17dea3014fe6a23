#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace fns {

// Complex-to-complex FFT. Power-of-two sizes take an iterative radix-2 path
// with a precomputed twiddle table; other sizes fall back to a recursive
// mixed-radix Cooley-Tukey with a naive DFT for prime factors. Unscaled in
// both directions (callers apply their own normalization).
class Fft {
 public:
  using cplx = std::complex<double>;

  explicit Fft(std::size_t n) : n_(n) {
    if (n_ == 0) n_ = 1;
    pow2_ = (n_ & (n_ - 1)) == 0;
    if (pow2_ && n_ > 1) {
      twiddle_.resize(n_ / 2);
      for (std::size_t k = 0; k < n_ / 2; ++k) {
        const double a = -2.0 * std::numbers::pi * double(k) / double(n_);
        twiddle_[k] = cplx(std::cos(a), std::sin(a));
      }
      bitrev_.resize(n_);
      std::size_t log2n = 0;
      while ((std::size_t(1) << log2n) < n_) ++log2n;
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
          if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (log2n - 1 - b);
        bitrev_[i] = r;
      }
    }
  }

  std::size_t size() const { return n_; }

  void forward(cplx* data) const { transform(data, -1); }
  void inverse(cplx* data) const { transform(data, +1); }

  void transform(cplx* data, int sign) const {
    if (n_ <= 1) return;
    if (pow2_) {
      radix2(data, sign);
    } else {
      std::vector<cplx> buf(data, data + n_);
      recursive(buf, sign);
      for (std::size_t i = 0; i < n_; ++i) data[i] = buf[i];
    }
  }

 private:
  void radix2(cplx* a, int sign) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (bitrev_[i] > i) std::swap(a[i], a[bitrev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          cplx w = twiddle_[j * step];
          if (sign > 0) w = std::conj(w);
          const cplx u = a[i + j];
          const cplx v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
  }

  static std::size_t smallest_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t f = 3; f * f <= n; f += 2)
      if (n % f == 0) return f;
    return n;
  }

  static cplx unit_root(std::size_t n, long long k, int sign) {
    const double a = sign * 2.0 * std::numbers::pi * double(k % (long long)n) / double(n);
    return cplx(std::cos(a), std::sin(a));
  }

  static void recursive(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 1) return;
    const std::size_t p = smallest_factor(n);
    if (p == n) {
      // prime size, naive DFT
      std::vector<cplx> out(n);
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) acc += a[j] * unit_root(n, (long long)(j * k), sign);
        out[k] = acc;
      }
      a.swap(out);
      return;
    }
    const std::size_t m = n / p;
    std::vector<std::vector<cplx>> sub(p, std::vector<cplx>(m));
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t k = 0; k < m; ++k) sub[r][k] = a[k * p + r];
    for (auto& s : sub) recursive(s, sign);
    for (std::size_t q = 0; q < m; ++q) {
      for (std::size_t s = 0; s < p; ++s) {
        cplx acc(0.0, 0.0);
        for (std::size_t r = 0; r < p; ++r)
          acc += unit_root(n, (long long)(r * (q + s * m)), sign) * sub[r][q];
        a[q + s * m] = acc;
      }
    }
  }

  std::size_t n_;
  bool pow2_ = false;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> bitrev_;
};

}  // namespace fns
