#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/grid.hpp"
#include "fns/presets.hpp"

namespace fns::varlp {

// Where an exponent (and the functions measured against it) is sampled.
// Integrals are cell sums: every sample point carries a quadrature weight,
// and all norm statements are about this discrete measure space.
struct SampleDomain {
  enum class Kind {
    Grid,              // lattice points of a periodic box, weight = cell volume
    IntervalMidpoint,  // t_i = (i + 1/2) T / n, weight T / n
    IntervalNodes,     // t_i = i T / (n - 1) including both ends, trapezoid weights
  };

  Kind kind = Kind::IntervalMidpoint;
  GridSpec grid;       // Kind::Grid only
  double horizon = 1.0;
  std::size_t count = 1;

  static SampleDomain on_grid(const GridSpec& g) {
    SampleDomain d;
    d.kind = Kind::Grid;
    d.grid = g;
    d.count = g.site_count();
    return d;
  }
  static SampleDomain interval_midpoint(double T, std::size_t n) {
    if (!(T > 0.0) || n < 1) throw std::invalid_argument("SampleDomain: bad interval");
    SampleDomain d;
    d.kind = Kind::IntervalMidpoint;
    d.horizon = T;
    d.count = n;
    return d;
  }
  static SampleDomain interval_nodes(double T, std::size_t n) {
    if (!(T > 0.0) || n < 2) throw std::invalid_argument("SampleDomain: bad interval");
    SampleDomain d;
    d.kind = Kind::IntervalNodes;
    d.horizon = T;
    d.count = n;
    return d;
  }

  std::size_t size() const { return count; }

  double weight(std::size_t i) const {
    switch (kind) {
      case Kind::Grid:
        return grid.cell_volume();
      case Kind::IntervalMidpoint:
        return horizon / double(count);
      case Kind::IntervalNodes: {
        const double dt = horizon / double(count - 1);
        return (i == 0 || i + 1 == count) ? 0.5 * dt : dt;
      }
    }
    return 0.0;
  }

  std::array<double, 3> point(std::size_t i) const {
    switch (kind) {
      case Kind::Grid:
        return grid.position(i);
      case Kind::IntervalMidpoint:
        return {(double(i) + 0.5) * horizon / double(count), 0.0, 0.0};
      case Kind::IntervalNodes:
        return {double(i) * horizon / double(count - 1), 0.0, 0.0};
    }
    return {0.0, 0.0, 0.0};
  }

  double measure() const {
    return kind == Kind::Grid ? grid.volume() : horizon;
  }

  bool compatible(const SampleDomain& o) const {
    if (kind != o.kind || count != o.count) return false;
    if (kind == Kind::Grid) return grid == o.grid;
    return horizon == o.horizon;
  }
};

// A variable exponent p(.) with 1 < p- <= p(x) <= p+ < infinity, either an
// analytic preset or a sampled table over its domain.
struct VariableExponent {
  enum class Kind { Constant, Sinusoidal, LogTail, Table };

  Kind kind = Kind::Constant;
  SampleDomain domain;
  double base = 2.0;        // Constant / Sinusoidal
  double amplitude = 0.0;   // Sinusoidal, |amplitude| < base - 1
  double wavelength = 1.0;  // Sinusoidal period in x1
  double p_infinity = 2.0;  // LogTail limit exponent
  double tail = 0.0;        // LogTail: 1/p(x) = 1/p_inf + tail/log(e + |x|)
  std::vector<double> table;

  double p_minus = 2.0;
  double p_plus = 2.0;

  static VariableExponent constant(double p0, const SampleDomain& dom) {
    VariableExponent p;
    p.kind = Kind::Constant;
    p.base = p0;
    p.domain = dom;
    p.finish();
    return p;
  }
  static VariableExponent sinusoidal(double p0, double amp, const SampleDomain& dom,
                                     double period = 0.0) {
    VariableExponent p;
    p.kind = Kind::Sinusoidal;
    p.base = p0;
    p.amplitude = amp;
    p.domain = dom;
    p.wavelength = period > 0.0 ? period
                   : dom.kind == SampleDomain::Kind::Grid ? dom.grid.length
                                                          : dom.horizon;
    if (!(std::abs(amp) < p0 - 1.0))
      throw std::invalid_argument("VariableExponent: need |amplitude| < p0 - 1");
    p.finish();
    return p;
  }
  static VariableExponent log_tail(double p_inf, double b, const SampleDomain& dom) {
    VariableExponent p;
    p.kind = Kind::LogTail;
    p.p_infinity = p_inf;
    p.tail = b;
    p.domain = dom;
    p.finish();
    return p;
  }
  static VariableExponent from_table(std::vector<double> values, const SampleDomain& dom) {
    if (values.size() != dom.size())
      throw std::invalid_argument("VariableExponent: table size does not match domain");
    VariableExponent p;
    p.kind = Kind::Table;
    p.table = std::move(values);
    p.domain = dom;
    p.finish();
    return p;
  }

  bool analytic() const { return kind != Kind::Table; }

  // evaluate at an arbitrary point (analytic kinds only)
  double eval(const std::array<double, 3>& x) const {
    switch (kind) {
      case Kind::Constant:
        return base;
      case Kind::Sinusoidal:
        return base + amplitude * std::sin(2.0 * std::numbers::pi * x[0] / wavelength);
      case Kind::LogTail: {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double inv = 1.0 / p_infinity + tail / std::log(std::numbers::e + r);
        return 1.0 / inv;
      }
      case Kind::Table:
        throw std::logic_error("VariableExponent: table kind has no off-sample evaluation");
    }
    return base;
  }

  double sample(std::size_t i) const {
    return kind == Kind::Table ? table[i] : eval(domain.point(i));
  }
  std::vector<double> samples() const {
    std::vector<double> v(domain.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = sample(i);
    return v;
  }

  std::optional<double> limit_at_infinity() const {
    if (kind == Kind::Constant) return base;
    if (kind == Kind::LogTail) return p_infinity;
    return std::nullopt;  // sinusoidal oscillates, tables end with their domain
  }

  void finish() {
    p_minus = std::numeric_limits<double>::infinity();
    p_plus = 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
      const double v = sample(i);
      if (!std::isfinite(v)) throw std::invalid_argument("VariableExponent: non-finite value");
      p_minus = std::min(p_minus, v);
      p_plus = std::max(p_plus, v);
    }
    if (!(p_minus > 1.0))
      throw std::invalid_argument("VariableExponent: need p(x) > 1 everywhere");
    if (!(p_plus < std::numeric_limits<double>::infinity()))
      throw std::invalid_argument("VariableExponent: need p bounded");
  }
};

// modular rho_p(f) = sum_i w_i |f_i|^{p_i}
inline double modular(std::span<const double> magnitudes, const VariableExponent& p) {
  if (magnitudes.size() != p.domain.size())
    throw std::invalid_argument("modular: sample count does not match exponent domain");
  double acc = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i)
    acc += p.domain.weight(i) * std::pow(std::abs(magnitudes[i]), p.sample(i));
  return acc;
}

namespace detail {

// modular of f / lambda using precomputed logs: exp(p_i log|f_i| - p_i log lambda);
// zero samples contribute nothing and are dropped up front
struct ModularEvaluator {
  std::vector<double> plogmag;  // p_i * log|f_i|
  std::vector<double> pvals;
  std::vector<double> weights;

  ModularEvaluator(std::span<const double> magnitudes, const VariableExponent& p) {
    const std::size_t n = magnitudes.size();
    plogmag.reserve(n);
    pvals.reserve(n);
    weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(magnitudes[i]);
      if (m == 0.0) continue;
      const double pi = p.sample(i);
      plogmag.push_back(pi * std::log(m));
      pvals.push_back(pi);
      weights.push_back(p.domain.weight(i));
    }
  }

  double operator()(double lambda) const {
    const double ll = std::log(lambda);
    double acc = 0.0;
    for (std::size_t i = 0; i < plogmag.size(); ++i) {
      acc += weights[i] * std::exp(plogmag[i] - pvals[i] * ll);
      if (acc == std::numeric_limits<double>::infinity()) return acc;
    }
    return acc;
  }
};

}  // namespace detail

// Luxemburg norm inf{lambda > 0 : rho(f/lambda) <= 1}. The map lambda ->
// rho(f/lambda) is continuous and strictly decreasing on a finite sample set
// for f != 0, so a geometric bracket plus bisection always converges. The
// returned lambda satisfies rho(f/lambda) in [1 - tol, 1].
inline double luxemburg_norm(std::span<const double> magnitudes, const VariableExponent& p,
                             double tol = 1e-12) {
  if (magnitudes.size() != p.domain.size())
    throw std::invalid_argument("luxemburg_norm: sample count does not match exponent domain");
  double maxmag = 0.0;
  for (double m : magnitudes) maxmag = std::max(maxmag, std::abs(m));
  if (maxmag == 0.0) return 0.0;

  const detail::ModularEvaluator rho(magnitudes, p);
  const double rho1 = rho(1.0);
  // rho^{1/p+} and rho^{1/p-} always bracket the norm; the expansion loops
  // below only fire as a safety net
  double lo = std::min(std::pow(rho1, 1.0 / p.p_plus), std::pow(rho1, 1.0 / p.p_minus));
  double hi = std::max(std::pow(rho1, 1.0 / p.p_plus), std::pow(rho1, 1.0 / p.p_minus));
  if (!(lo > 0.0) || !std::isfinite(hi)) lo = hi = maxmag;

  for (int i = 0; i < 2048 && rho(hi) > 1.0; ++i) hi *= 2.0;
  for (int i = 0; i < 2048 && rho(lo) <= 1.0; ++i) lo *= 0.5;
  // invariant: rho(lo) > 1 >= rho(hi)
  for (int i = 0; i < 200; ++i) {
    if (rho(hi) >= 1.0 - tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (rho(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// max of the variable-exponent and constant-exponent Luxemburg norms
inline double lp_norm(std::span<const double> magnitudes, double p, const SampleDomain& dom) {
  if (magnitudes.size() != dom.size())
    throw std::invalid_argument("lp_norm: sample count does not match domain");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : magnitudes) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i)
    acc += dom.weight(i) * std::pow(std::abs(magnitudes[i]), p);
  return std::pow(acc, 1.0 / p);
}

inline double mixed_norm(std::span<const double> magnitudes, const VariableExponent& p,
                         double frak_p) {
  if (!(frak_p > 1.0)) throw std::invalid_argument("mixed_norm: need constant exponent > 1");
  return std::max(luxemburg_norm(magnitudes, p), lp_norm(magnitudes, frak_p, p.domain));
}

// pointwise conjugate p'(x) = p(x) / (p(x) - 1), materialized as a table
inline VariableExponent conjugate_exponent(const VariableExponent& p) {
  if (!(p.p_minus > 1.0)) throw std::invalid_argument("conjugate_exponent: need p- > 1");
  std::vector<double> values(p.domain.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = p.sample(i);
    values[i] = v / (v - 1.0);
  }
  return VariableExponent::from_table(std::move(values), p.domain);
}

// Field / time-series conveniences ------------------------------------------

inline void require_grid_domain(const Field& f, const VariableExponent& p, const char* who) {
  if (p.domain.kind != SampleDomain::Kind::Grid || !(p.domain.grid == f.grid))
    throw std::invalid_argument(std::string(who) + ": exponent domain does not match field grid");
}

inline double modular(const Field& f, const VariableExponent& p) {
  require_grid_domain(f, p, "modular");
  const auto mag = f.magnitude();
  return modular(std::span<const double>(mag), p);
}
inline double luxemburg_norm(const Field& f, const VariableExponent& p, double tol = 1e-12) {
  require_grid_domain(f, p, "luxemburg_norm");
  const auto mag = f.magnitude();
  return luxemburg_norm(std::span<const double>(mag), p, tol);
}
inline double mixed_norm(const Field& f, const VariableExponent& p, double frak_p) {
  require_grid_domain(f, p, "mixed_norm");
  const auto mag = f.magnitude();
  return mixed_norm(std::span<const double>(mag), p, frak_p);
}
inline double lp_norm(const Field& f, double p) {
  const auto mag = f.magnitude();
  return lp_norm(std::span<const double>(mag), p, SampleDomain::on_grid(f.grid));
}

// Empirical checks -----------------------------------------------------------

struct LogHolderReport {
  double c_local = 0.0;                 // sup |1/p(x)-1/p(y)| log(e + 1/|x-y|)
  std::optional<double> c_decay;        // sup |1/p(x)-1/p_inf| log(e + |x|)
  std::size_t pair_samples = 0;
  std::array<double, 3> worst_x{0, 0, 0}, worst_y{0, 0, 0};
};

// Monte-Carlo estimate of the two log-Hoelder constants. Pairs are drawn in
// the exponent's own domain; the decay constant probes radii far beyond it,
// which only analytic presets support.
inline LogHolderReport check_log_holder(const VariableExponent& p, std::size_t pair_samples,
                                        std::uint64_t seed) {
  if (pair_samples < 1) throw std::invalid_argument("check_log_holder: need pair_samples >= 1");
  LogHolderReport rep;
  rep.pair_samples = pair_samples;
  SplitMix64 rng(seed);

  const bool on_grid = p.domain.kind == SampleDomain::Kind::Grid;
  const double extent = on_grid ? p.domain.grid.length : p.domain.horizon;
  const int dim = on_grid ? p.domain.grid.dim : 1;

  auto draw_point = [&](double scale) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = rng.uniform() * scale;
    return x;
  };
  auto value_at = [&](const std::array<double, 3>& x) {
    if (p.analytic()) return p.eval(x);
    // table: snap to the nearest sample point
    if (on_grid) {
      std::array<int, 3> idx{0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        const int n = p.domain.grid.points;
        idx[a] = int(std::llround(x[a] / p.domain.grid.spacing())) % n;
        if (idx[a] < 0) idx[a] += n;
      }
      return p.table[p.domain.grid.flatten(idx)];
    }
    const double step = p.domain.horizon / double(p.domain.count);
    std::size_t i = std::min(p.domain.count - 1, std::size_t(std::max(0.0, x[0] / step)));
    return p.table[i];
  };

  for (std::size_t s = 0; s < pair_samples; ++s) {
    // mix box-scale pairs with short-range pairs
    const auto x = draw_point(extent);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    const double sep = extent * std::pow(10.0, -3.0 * rng.uniform());
    for (int a = 0; a < dim; ++a) y[a] = x[a] + sep * rng.symmetric();
    double dist2 = 0.0;
    for (int a = 0; a < dim; ++a) dist2 += (x[a] - y[a]) * (x[a] - y[a]);
    const double dist = std::sqrt(dist2);
    if (dist <= 0.0) continue;
    const double gap = std::abs(1.0 / value_at(x) - 1.0 / value_at(y));
    const double c = gap * std::log(std::numbers::e + 1.0 / dist);
    if (c > rep.c_local) {
      rep.c_local = c;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }

  if (const auto pinf = p.limit_at_infinity(); pinf && p.analytic()) {
    double worst = 0.0;
    for (std::size_t s = 0; s < pair_samples; ++s) {
      const double radius = std::pow(10.0, 6.0 * rng.uniform());  // up to 1e6
      std::array<double, 3> x{0.0, 0.0, 0.0};
      double n2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        x[a] = rng.symmetric();
        n2 += x[a] * x[a];
      }
      const double n = std::sqrt(n2);
      if (n == 0.0) continue;
      for (int a = 0; a < dim; ++a) x[a] *= radius / n;
      const double gap = std::abs(1.0 / p.eval(x) - 1.0 / *pinf);
      worst = std::max(worst, gap * std::log(std::numbers::e + radius));
    }
    rep.c_decay = worst;
  }
  return rep;
}

struct RatioReport {
  double ratio = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Hoelder: ||fg||_p vs ||f||_q ||g||_r under 1/p = 1/q + 1/r pointwise.
inline RatioReport holder_product_check(std::span<const double> f, std::span<const double> g,
                                        const VariableExponent& p, const VariableExponent& q,
                                        const VariableExponent& r) {
  if (f.size() != g.size() || f.size() != p.domain.size())
    throw std::invalid_argument("holder_product_check: size mismatch");
  for (std::size_t i = 0; i < p.domain.size(); ++i) {
    const double lhs = 1.0 / p.sample(i);
    const double rhs = 1.0 / q.sample(i) + 1.0 / r.sample(i);
    if (std::abs(lhs - rhs) > 1e-12)
      throw std::invalid_argument("holder_product_check: exponent relation 1/p = 1/q + 1/r fails");
  }
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
  RatioReport rep;
  rep.lhs = luxemburg_norm(std::span<const double>(prod), p);
  rep.rhs = luxemburg_norm(f, q) * luxemburg_norm(g, r);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

// Lower bound for the norm-conjugate formula:
//   ||f||_p <= sup_{||g||_{p'} <= 1} int |f||g|.
// Trials are random unit-ball elements plus the Hoelder near-optimizer
// g ~ |f|^{p-1} rescaled to unit conjugate norm.
inline double duality_lower_bound(std::span<const double> f, const VariableExponent& p,
                                  std::size_t trials, std::uint64_t seed) {
  if (f.size() != p.domain.size())
    throw std::invalid_argument("duality_lower_bound: size mismatch");
  const VariableExponent pc = conjugate_exponent(p);
  double maxmag = 0.0;
  for (double v : f) maxmag = std::max(maxmag, std::abs(v));
  if (maxmag == 0.0) return 0.0;

  auto pairing = [&](std::span<const double> g) {
    const double norm = luxemburg_norm(g, pc);
    if (norm == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      acc += p.domain.weight(i) * std::abs(f[i]) * std::abs(g[i]) / norm;
    return acc;
  };

  // near-optimizer |f / ||f||_p|^{p(x)-1}: its conjugate modular equals the
  // modular of f / ||f||_p, which the norm pins at 1
  const double fnorm = luxemburg_norm(f, p);
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    g[i] = std::pow(std::abs(f[i]) / fnorm, p.sample(i) - 1.0);
  double best = pairing(g);

  SplitMix64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    for (double& v : g) v = rng.symmetric();
    best = std::max(best, pairing(g));
  }
  return best;
}

struct EmbeddingReport {
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // 1 + |domain|
};

// On a bounded domain, q1 <= q2 a.e. gives ||f||_{q1} <= (1+|X|) ||f||_{q2}.
inline EmbeddingReport embedding_check(std::span<const double> f, const VariableExponent& q1,
                                       const VariableExponent& q2) {
  if (f.size() != q1.domain.size() || !q1.domain.compatible(q2.domain))
    throw std::invalid_argument("embedding_check: domain mismatch");
  EmbeddingReport rep;
  rep.bound = 1.0 + q1.domain.measure();
  for (std::size_t i = 0; i < q1.domain.size(); ++i)
    if (q1.sample(i) > q2.sample(i) + 1e-14) return rep;  // inclusion not claimed
  rep.applicable = true;
  rep.lhs = luxemburg_norm(f, q1);
  rep.rhs = luxemburg_norm(f, q2);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

struct UnitNormReport {
  double norm = 0.0;     // ||1||_{L^{p(.)}([0,T])}
  double t_factor = 0.0; // max{T^{1/p-}, T^{1/p+}}
  double ratio = 0.0;
};

inline UnitNormReport unit_norm_time(const VariableExponent& p) {
  if (p.domain.kind == SampleDomain::Kind::Grid)
    throw std::invalid_argument("unit_norm_time: exponent must live on a time interval");
  const double T = p.domain.horizon;
  std::vector<double> ones(p.domain.size(), 1.0);
  UnitNormReport rep;
  rep.norm = luxemburg_norm(std::span<const double>(ones), p);
  rep.t_factor = std::max(std::pow(T, 1.0 / p.p_minus), std::pow(T, 1.0 / p.p_plus));
  rep.ratio = rep.norm / rep.t_factor;
  return rep;
}

}  // namespace fns::varlp
