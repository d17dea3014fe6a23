#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/grid.hpp"
#include "fns/kernels.hpp"
#include "fns/parallel.hpp"
#include "fns/presets.hpp"

namespace fns::mild {

using kernels::semigroup_apply;

// ---------------------------------------------------------------------------
// configuration and trajectory containers
// ---------------------------------------------------------------------------

struct SolverConfig {
  double alpha = 1.0;      // diffusion exponent, (1/2, 1]
  double horizon = 1.0;    // T
  int time_points = 17;    // uniform nodes including 0 and T
  GridSpec grid{3, 16, 2.0 * std::numbers::pi};
  bool dealias = true;
  double viscosity = 1.0;
  double tolerance = 1e-10;  // fixed-point increment tolerance (working norm)
  int max_iterations = 50;
  std::size_t memory_budget_bytes = std::size_t(8) << 30;

  void validate() const {
    if (!(alpha > 0.5 && alpha <= 1.0))
      throw std::invalid_argument("SolverConfig: need alpha in (1/2, 1]");
    if (!(horizon > 0.0)) throw std::invalid_argument("SolverConfig: need horizon > 0");
    if (time_points < 2) throw std::invalid_argument("SolverConfig: need at least two time nodes");
    if (!(viscosity > 0.0)) throw std::invalid_argument("SolverConfig: need viscosity > 0");
    // one trajectory = N_t snapshots of d complex fields
    const std::size_t per_snapshot = grid.site_count() * std::size_t(grid.dim) * sizeof(cplx);
    if (per_snapshot * std::size_t(time_points) > memory_budget_bytes)
      throw std::invalid_argument("SolverConfig: trajectory exceeds the memory budget");
  }
  double dt() const { return horizon / double(time_points - 1); }
  std::vector<double> times() const {
    std::vector<double> t(static_cast<std::size_t>(time_points));
    for (int i = 0; i < time_points; ++i) t[std::size_t(i)] = double(i) * dt();
    t.back() = horizon;
    return t;
  }
};

// time-indexed family of spectral velocity fields on the solver grid
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> snaps;

  std::size_t size() const { return times.size(); }
  const SpectralField& at(std::size_t i) const { return snaps[i]; }

  static Trajectory zero(const SolverConfig& cfg) {
    Trajectory tr;
    tr.times = cfg.times();
    tr.snaps.assign(tr.times.size(), SpectralField(cfg.grid, cfg.grid.dim));
    return tr;
  }
  static Trajectory constant(const SolverConfig& cfg, const SpectralField& value) {
    Trajectory tr;
    tr.times = cfg.times();
    tr.snaps.assign(tr.times.size(), value);
    return tr;
  }
  // restriction to the first n nodes (valid because every construction below
  // at node i uses data at nodes j <= i only)
  Trajectory prefix(std::size_t n) const {
    Trajectory tr;
    tr.times.assign(times.begin(), times.begin() + std::ptrdiff_t(n));
    tr.snaps.assign(snaps.begin(), snaps.begin() + std::ptrdiff_t(n));
    return tr;
  }

  // sup over nodes of the max coefficient modulus; the cheap working norm
  double sup_spectral_max() const {
    double m = 0.0;
    for (const auto& s : snaps) m = std::max(m, s.max_abs());
    return m;
  }
  double max_divergence_defect() const {
    double worst = 0.0;
    for (const auto& s : snaps) {
      const double scale = s.max_abs();
      if (scale == 0.0) continue;
      worst = std::max(worst, divergence_spectral(s).max_abs() / scale);
    }
    return worst;
  }

  Trajectory& operator-=(const Trajectory& o) {
    for (std::size_t i = 0; i < snaps.size(); ++i) snaps[i] -= o.snaps[i];
    return *this;
  }
  Trajectory& operator+=(const Trajectory& o) {
    for (std::size_t i = 0; i < snaps.size(); ++i) snaps[i] += o.snaps[i];
    return *this;
  }
  Trajectory& operator*=(double a) {
    for (auto& s : snaps) s *= a;
    return *this;
  }
};

using TrajectoryNorm = std::function<double(const Trajectory&)>;

inline TrajectoryNorm working_norm() {
  return [](const Trajectory& tr) { return tr.sup_spectral_max(); };
}

// ---------------------------------------------------------------------------
// forcing
// ---------------------------------------------------------------------------

// Either no force, a fixed divergence-free field with a time envelope, or a
// d x d tensor F with f = div(F). Tensors may be static or given per node.
struct Forcing {
  enum class Kind { Zero, Velocity, Tensor };

  Kind kind = Kind::Zero;
  std::vector<SpectralField> data;        // 1 entry (static) or one per node
  std::function<double(double)> envelope;  // Velocity kind; default 1

  static Forcing zero() { return Forcing{}; }
  static Forcing velocity(const Field& f, std::function<double(double)> env = {}) {
    Forcing out;
    out.kind = Kind::Velocity;
    out.data.push_back(forward_transform(f));
    out.envelope = env ? std::move(env) : [](double) { return 1.0; };
    return out;
  }
  // tensor as a d*d-component field, row-major components (h, l) -> h*d + l
  static Forcing tensor(const Field& F) {
    Forcing out;
    out.kind = Kind::Tensor;
    out.data.push_back(forward_transform(F));
    return out;
  }
  static Forcing tensor_series(std::vector<SpectralField> nodes) {
    Forcing out;
    out.kind = Kind::Tensor;
    out.data = std::move(nodes);
    return out;
  }

  bool is_zero() const { return kind == Kind::Zero; }

  // divergence-free spectral force at node i of the solver grid
  SpectralField at_node(const SolverConfig& cfg, std::size_t i, double t) const {
    const int d = cfg.grid.dim;
    switch (kind) {
      case Kind::Zero:
        return SpectralField(cfg.grid, d);
      case Kind::Velocity: {
        SpectralField f = data.front();
        f *= envelope(t);
        return leray_project(f);
      }
      case Kind::Tensor: {
        const SpectralField& F = data.size() == 1 ? data.front() : data.at(i);
        if (F.components != d * d)
          throw std::invalid_argument("Forcing: tensor needs d*d components");
        SpectralField f(cfg.grid, d);
        const std::size_t n = cfg.grid.site_count();
        for (std::size_t m = 0; m < n; ++m) {
          const auto xi = cfg.grid.derivative_wavevector(m);
          for (int l = 0; l < d; ++l) {
            cplx acc(0.0, 0.0);
            for (int h = 0; h < d; ++h) acc += cplx(0.0, xi[h]) * F.at(h * d + l, m);
            f.at(l, m) = acc;
          }
        }
        // the mild formulation assumes a divergence-free force
        return leray_project(f);
      }
    }
    return SpectralField(cfg.grid, d);
  }
};

// ---------------------------------------------------------------------------
// Duhamel pieces. All time integrals are the composite trapezoid rule with
// exact semigroup weights; S_dt (I_i + dt/2 N_i) + dt/2 N_{i+1} reproduces the
// global trapezoid sum node by node, so the sweep is O(N_t).
// ---------------------------------------------------------------------------

inline Trajectory semigroup_trajectory(const SolverConfig& cfg, const SpectralField& u0_hat) {
  cfg.validate();
  Trajectory tr = Trajectory::zero(cfg);
  parallel_for(tr.size(), [&](std::size_t i) {
    tr.snaps[i] = semigroup_apply(cfg.alpha, tr.times[i], u0_hat, cfg.viscosity);
  });
  return tr;
}

namespace detail {

// one sweep of I_{i+1} = S_dt (I_i + dt/2 N_i) + dt/2 N_{i+1}, which equals
// the closed composite trapezoid sum with exact semigroup weights at every
// node (the half-weight closing N_{i+1} is promoted to a full weight by the
// next step's carry term)
inline Trajectory duhamel_sweep(const SolverConfig& cfg,
                                const std::vector<SpectralField>& nodes) {
  Trajectory out = Trajectory::zero(cfg);
  const double dt = cfg.dt();
  SpectralField integral(cfg.grid, nodes.front().components);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    SpectralField carry = nodes[i];
    carry *= dt / 2.0;
    carry += integral;
    integral = semigroup_apply(cfg.alpha, dt, carry, cfg.viscosity);
    SpectralField close = nodes[i + 1];
    close *= dt / 2.0;
    integral += close;
    out.snaps[i + 1] = integral;
  }
  return out;
}

}  // namespace detail

inline Trajectory duhamel_force(const SolverConfig& cfg, const Forcing& forcing) {
  cfg.validate();
  if (forcing.is_zero()) return Trajectory::zero(cfg);
  const auto times = cfg.times();
  std::vector<SpectralField> f_nodes(times.size());
  parallel_for(times.size(), [&](std::size_t i) {
    f_nodes[i] = forcing.at_node(cfg, i, times[i]);
  });
  return detail::duhamel_sweep(cfg, f_nodes);
}

namespace detail {

// P div(u tensor v) at one node: physical products, forward transform,
// 2/3-rule truncation, spectral divergence, projection
inline SpectralField projected_advection(const SolverConfig& cfg, const SpectralField& u_hat,
                                         const SpectralField& v_hat) {
  const GridSpec& g = cfg.grid;
  const int d = g.dim;
  const Field u = inverse_transform_lenient(u_hat);
  const bool same = &u_hat == &v_hat;
  const Field v = same ? u : inverse_transform_lenient(v_hat);
  Field tensor(g, d * d);
  const std::size_t n = g.site_count();
  for (int h = 0; h < d; ++h)
    for (int l = 0; l < d; ++l)
      for (std::size_t m = 0; m < n; ++m)
        tensor.at(h * d + l, m) = u.at(h, m) * v.at(l, m);
  SpectralField T = forward_transform(tensor);
  if (cfg.dealias) dealias_inplace(T);
  SpectralField div(g, d);
  for (std::size_t m = 0; m < n; ++m) {
    const auto xi = g.derivative_wavevector(m);
    for (int l = 0; l < d; ++l) {
      cplx acc(0.0, 0.0);
      for (int h = 0; h < d; ++h) acc += cplx(0.0, xi[h]) * T.at(h * d + l, m);
      div.at(l, m) = acc;
    }
  }
  return leray_project(div);
}

}  // namespace detail

// B(u, v)(t) = int_0^t S_{t-s} P div(u tensor v)(s) ds on the solver nodes
inline Trajectory bilinear_term(const SolverConfig& cfg, const Trajectory& u,
                                const Trajectory& v) {
  cfg.validate();
  if (u.size() != v.size() || u.size() != std::size_t(cfg.time_points))
    throw std::invalid_argument("bilinear_term: node count mismatch");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u.snaps[i].grid == cfg.grid) || !(v.snaps[i].grid == cfg.grid))
      throw std::invalid_argument("bilinear_term: grid mismatch");

  std::vector<SpectralField> nonlin(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    nonlin[i] = detail::projected_advection(cfg, u.snaps[i], v.snaps[i]);
  });
  return detail::duhamel_sweep(cfg, nonlin);
}

struct PicardReport {
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  bool preprojected = false;        // initial data was not divergence free
  double delta = 0.0;               // ||e0|| in the report norm
  double final_norm = 0.0;          // ||e|| in the report norm
  bool two_delta_ok = false;        // final_norm <= 2 delta (1 + 1e-9)
  double c_bilinear = 0.0;          // max over iterates of ||B(e,e)|| / ||e||^2
  double max_divergence_defect = 0.0;
  std::vector<double> increments;   // working-norm increments per iterate
  std::vector<double> ratios;       // successive increment ratios
};

struct PicardResult {
  std::optional<Trajectory> trajectory;
  PicardReport report;
};

// Fixed-point iteration e_{k+1} = e0 - B(e_k, e_k) on whole trajectories,
// with e0 the semigroup evolution of the data plus the force integral.
// The stopping rule uses the sup-over-nodes spectral max norm; report norms
// default to the same and may be any trajectory norm.
inline PicardResult picard_iterate(const SolverConfig& cfg, const Field& u0,
                                   const Forcing& forcing = Forcing::zero(),
                                   const TrajectoryNorm& report_norm = {}) {
  cfg.validate();
  const TrajectoryNorm norm = report_norm ? report_norm : working_norm();
  PicardResult res;
  PicardReport& rep = res.report;

  SpectralField u0_hat = forward_transform(u0);
  if (cfg.dealias) dealias_inplace(u0_hat);
  const double scale = u0_hat.max_abs();
  if (scale > 0.0 && divergence_spectral(u0_hat).max_abs() > 1e-10 * scale) {
    u0_hat = leray_project(u0_hat);
    rep.preprojected = true;
  }

  Trajectory e0 = semigroup_trajectory(cfg, u0_hat);
  if (!forcing.is_zero()) e0 += duhamel_force(cfg, forcing);
  rep.delta = norm(e0);

  Trajectory current = e0;
  double prev_increment = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    const Trajectory b = bilinear_term(cfg, current, current);
    Trajectory next = e0;
    next -= b;

    const double cur2 = norm(current) * norm(current);
    if (cur2 > 0.0) rep.c_bilinear = std::max(rep.c_bilinear, norm(b) / cur2);

    Trajectory diff = next;
    diff -= current;
    const double inc = diff.sup_spectral_max();
    rep.iterations = k + 1;
    if (!rep.increments.empty() && rep.increments.back() > 0.0)
      rep.ratios.push_back(inc / rep.increments.back());
    rep.increments.push_back(inc);

    current = std::move(next);
    if (inc <= cfg.tolerance) {
      rep.converged = true;
      break;
    }
    growth_streak = inc > prev_increment ? growth_streak + 1 : 0;
    prev_increment = inc;
    if (growth_streak >= 3 || !std::isfinite(inc)) {
      rep.diverged = true;
      break;
    }
  }

  rep.final_norm = norm(current);
  rep.two_delta_ok = rep.final_norm <= 2.0 * rep.delta * (1.0 + 1e-9);
  rep.max_divergence_defect = current.max_divergence_defect();
  if (!rep.diverged) res.trajectory = std::move(current);
  return res;
}

// Independent exponential-Euler marcher for the same integral equation:
//   u_{n+1} = S_dt [ u_n + dt (P f - P div(u tensor u))(t_n) ].
// First-order consistent; used only as a cross-check of the Picard route.
inline Trajectory time_march(const SolverConfig& cfg, const Field& u0,
                             const Forcing& forcing = Forcing::zero(),
                             bool include_bilinear = true) {
  cfg.validate();
  SpectralField u_hat = forward_transform(u0);
  if (cfg.dealias) dealias_inplace(u_hat);
  const double scale0 = u_hat.max_abs();
  if (scale0 > 0.0 && divergence_spectral(u_hat).max_abs() > 1e-10 * scale0)
    u_hat = leray_project(u_hat);

  Trajectory tr = Trajectory::zero(cfg);
  tr.snaps[0] = u_hat;
  const double dt = cfg.dt();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    SpectralField rhs(cfg.grid, cfg.grid.dim);
    if (!forcing.is_zero()) rhs += forcing.at_node(cfg, i - 1, tr.times[i - 1]);
    if (include_bilinear) rhs -= detail::projected_advection(cfg, u_hat, u_hat);
    rhs *= dt;
    u_hat += rhs;
    u_hat = semigroup_apply(cfg.alpha, dt, u_hat, cfg.viscosity);
    if (cfg.dealias) dealias_inplace(u_hat);
    tr.snaps[i] = u_hat;
    if (scale0 > 0.0 && u_hat.max_abs() > 1e6 * scale0)
      throw std::runtime_error("time_march: blow-up detected (max norm grew by 1e6)");
  }
  return tr;
}

// Pressure from the velocity: with the momentum balance written as
// du/dt = -(-Delta)^a u - (u . grad) u + grad P + f, applying the divergence
// gives Delta P = div div (u tensor u), i.e. P_hat = (xi xi^T : T_hat)/|xi|^2.
inline SpectralField recover_pressure(const SolverConfig& cfg, const SpectralField& u_hat) {
  const GridSpec& g = cfg.grid;
  const int d = g.dim;
  if (u_hat.components != d)
    throw std::invalid_argument("recover_pressure: need one component per dimension");
  const Field u = inverse_transform_lenient(u_hat);
  Field tensor(g, d * d);
  const std::size_t n = g.site_count();
  for (int h = 0; h < d; ++h)
    for (int l = 0; l < d; ++l)
      for (std::size_t m = 0; m < n; ++m)
        tensor.at(h * d + l, m) = u.at(h, m) * u.at(l, m);
  SpectralField T = forward_transform(tensor);
  if (cfg.dealias) dealias_inplace(T);
  SpectralField P(g, 1);
  for (std::size_t m = 0; m < n; ++m) {
    const auto xi = g.derivative_wavevector(m);
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) k2 += xi[a] * xi[a];
    if (k2 == 0.0) continue;
    cplx acc(0.0, 0.0);
    for (int h = 0; h < d; ++h)
      for (int l = 0; l < d; ++l) acc += xi[h] * xi[l] * T.at(h * d + l, m);
    P.at(0, m) = acc / k2;
  }
  return P;
}

// sup over seeded unit-norm semigroup trajectories of ||B(e, e)||; the
// measured bilinear constant in the given norm, with the smallness threshold
// 1 / (4 C_B) it induces
struct BilinearEstimate {
  double c_bilinear = 0.0;
  double threshold = 0.0;
  std::vector<double> per_trial;
};

inline BilinearEstimate estimate_cb(const SolverConfig& cfg, int trials, std::uint64_t seed,
                                    const TrajectoryNorm& report_norm = {}) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("estimate_cb: need at least one trial");
  const TrajectoryNorm norm = report_norm ? report_norm : working_norm();
  BilinearEstimate est;
  for (int t = 0; t < trials; ++t) {
    const Field u0 = make_preset("random_divfree", cfg.grid, 1.0, seed + std::uint64_t(t));
    SpectralField u0_hat = forward_transform(u0);
    if (cfg.dealias) dealias_inplace(u0_hat);
    Trajectory e = semigroup_trajectory(cfg, u0_hat);
    const double n0 = norm(e);
    if (n0 == 0.0) continue;
    e *= 1.0 / n0;
    const double value = norm(bilinear_term(cfg, e, e));
    est.per_trial.push_back(value);
    est.c_bilinear = std::max(est.c_bilinear, value);
  }
  est.threshold = est.c_bilinear > 0.0 ? 1.0 / (4.0 * est.c_bilinear) : 0.0;
  return est;
}

}  // namespace fns::mild
