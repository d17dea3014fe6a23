#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/mild.hpp"
#include "fns/operators.hpp"
#include "fns/varlp.hpp"

namespace fns::theorems {

// ---------------------------------------------------------------------------
// admissibility arithmetic for the local-in-time statement: time exponent
// p(.) with p- > 2, spatial Lebesgue exponent q > 3/(2 alpha - 1), and
// alpha/p(t) + 3/(2q) < alpha - 1/2 at every sample
// ---------------------------------------------------------------------------

struct Thm1Exponents {
  double alpha = 1.0;
  double q = 6.0;
  varlp::VariableExponent p_time;
  varlp::VariableExponent p_conjugate;
  std::vector<double> p_tilde;  // 1/p~ = 1 - 2/p(.)
  std::vector<double> r;        // 1/r = 1/p~ + beta
  double beta = 0.0;            // 1 - 1/(2 alpha) - 3/(2 alpha q)
  bool admissible = false;
  double margin = 0.0;  // min over samples of (alpha - 1/2) - (alpha/p + 3/(2q))

  Thm1Exponents(const varlp::VariableExponent& p) : p_time(p), p_conjugate(p) {}
};

inline Thm1Exponents check_thm1_exponents(double alpha, double q,
                                          const varlp::VariableExponent& p) {
  Thm1Exponents out(p);
  out.alpha = alpha;
  out.q = q;
  out.beta = 1.0 - 1.0 / (2.0 * alpha) - 3.0 / (2.0 * alpha * q);

  bool ok = alpha > 0.5 && alpha <= 1.0;
  ok = ok && p.p_minus > 2.0;
  ok = ok && q > 3.0 / (2.0 * alpha - 1.0);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.domain.size(); ++i)
    margin = std::min(margin, (alpha - 0.5) - (alpha / p.sample(i) + 3.0 / (2.0 * q)));
  out.margin = margin;
  ok = ok && margin > 0.0;
  out.admissible = ok;

  if (p.p_minus > 1.0) out.p_conjugate = varlp::conjugate_exponent(p);
  out.p_tilde.resize(p.domain.size());
  out.r.resize(p.domain.size());
  for (std::size_t i = 0; i < p.domain.size(); ++i) {
    const double inv_tilde = 1.0 - 2.0 / p.sample(i);
    out.p_tilde[i] = inv_tilde > 0.0 ? 1.0 / inv_tilde : std::numeric_limits<double>::infinity();
    const double inv_r = inv_tilde + out.beta;
    out.r[i] = inv_r > 0.0 ? 1.0 / inv_r : std::numeric_limits<double>::infinity();
  }
  if (out.admissible) {
    // consequence of the arithmetic: 0 < beta < 1 and r < p' pointwise
    if (!(out.beta > 0.0 && out.beta < 1.0))
      throw std::logic_error("check_thm1_exponents: beta out of (0,1) despite admissibility");
    for (std::size_t i = 0; i < p.domain.size(); ++i)
      if (!(out.r[i] < out.p_conjugate.sample(i)))
        throw std::logic_error("check_thm1_exponents: r >= p' despite admissibility");
  }
  return out;
}

// constant-exponent record for the global statement: spatial p(.) with
// p- > 1 plus the companion constant exponent 3/(2 alpha - 1)
struct Thm2Exponents {
  double alpha = 0.8;
  varlp::VariableExponent p_space;
  double companion = 0.0;         // 3/(2 alpha - 1)
  double tensor_companion = 0.0;  // 3/(2 (2 alpha - 1))
  bool valid = false;

  Thm2Exponents(const varlp::VariableExponent& p) : p_space(p) {}
};

inline Thm2Exponents check_thm2_exponents(double alpha, const varlp::VariableExponent& p) {
  Thm2Exponents out(p);
  out.alpha = alpha;
  out.companion = 3.0 / (2.0 * alpha - 1.0);
  out.tensor_companion = 3.0 / (2.0 * (2.0 * alpha - 1.0));
  out.valid = alpha > 0.5 && alpha <= 1.0 && p.p_minus > 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// trajectory norms
// ---------------------------------------------------------------------------

// Luxemburg norm in time of t -> ||u(t, .)||_{L^q_x} on the trajectory nodes
// (trapezoid weights; the time exponent is sampled at the node times)
inline double ET_norm(const mild::Trajectory& traj, const varlp::VariableExponent& p_time,
                      double q) {
  if (!(q > 1.0)) throw std::invalid_argument("ET_norm: need q in (1, inf)");
  if (traj.size() < 2) throw std::invalid_argument("ET_norm: need at least two nodes");
  const auto dom = varlp::SampleDomain::interval_nodes(traj.times.back(), traj.size());
  varlp::VariableExponent p = p_time;
  if (p_time.analytic()) {
    std::vector<double> tab(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) tab[i] = p_time.eval({traj.times[i], 0.0, 0.0});
    p = varlp::VariableExponent::from_table(std::move(tab), dom);
  } else if (!p_time.domain.compatible(dom)) {
    throw std::invalid_argument("ET_norm: tabulated exponent does not match the time grid");
  }
  std::vector<double> spatial(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Field u = inverse_transform_lenient(traj.snaps[i]);
    spatial[i] = varlp::lp_norm(u, q);
  }
  return varlp::luxemburg_norm(std::span<const double>(spatial), p);
}

// max of || . ||_{L^{p(.)}_x(Linf_t)} and || . ||_{L^{3/(2a-1)}_x(Linf_t)}:
// pointwise-in-x sup of |u| over the time nodes, then the two spatial norms
inline double E_script_norm(const mild::Trajectory& traj, const varlp::VariableExponent& p_space,
                            double alpha) {
  if (traj.size() < 1) throw std::invalid_argument("E_script_norm: empty trajectory");
  const GridSpec g = traj.snaps.front().grid;
  varlp::VariableExponent p = p_space;
  if (p_space.domain.kind != varlp::SampleDomain::Kind::Grid || !(p_space.domain.grid == g)) {
    if (!p_space.analytic())
      throw std::invalid_argument("E_script_norm: exponent domain does not match the grid");
    const auto dom = varlp::SampleDomain::on_grid(g);
    std::vector<double> tab(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) tab[i] = p_space.eval(g.position(i));
    p = varlp::VariableExponent::from_table(std::move(tab), dom);
  }
  std::vector<double> sup(g.site_count(), 0.0);
  for (const auto& snap : traj.snaps) {
    const Field u = inverse_transform_lenient(snap);
    const auto mag = u.magnitude();
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = std::max(sup[i], mag[i]);
  }
  const double companion = 3.0 / (2.0 * alpha - 1.0);
  return std::max(varlp::luxemburg_norm(std::span<const double>(sup), p),
                  varlp::lp_norm(std::span<const double>(sup), companion, p.domain));
}

// ---------------------------------------------------------------------------
// proposition monitors. Fixed data, geometric horizon sweep; trajectories are
// computed once on the longest horizon and restricted to prefixes, which is
// exact because every node depends on earlier nodes only.
// ---------------------------------------------------------------------------

inline double t_factor(double T, const varlp::VariableExponent& p) {
  return std::max(std::pow(T, 1.0 / p.p_minus), std::pow(T, 1.0 / p.p_plus));
}

struct SweepRow {
  double horizon = 0.0;
  double initial_ratio = 0.0;    // ||S_t u0||_X / ||u0||_data
  double force_ratio = 0.0;      // ||duhamel f||_X / ||f||_data
  double bilinear_ratio = 0.0;   // ||B(u,u)||_X / ||u||_X^2
  double bilinear_growth = 0.0;  // ||B(u,u)||_X / (fixed reference norm)^2
  double initial_constant = 0.0;     // initial_ratio / t-factor
  double force_constant = 0.0;       // force_ratio / t-factor
  double bilinear_constant = 0.0;    // bilinear_ratio / ((1+T) t-factor)
};

struct PropReport {
  std::string theorem;
  std::vector<SweepRow> rows;
  double slope_initial = 0.0;   // d log(initial_ratio) / d log T
  double slope_force = 0.0;
  double slope_bilinear = 0.0;  // of bilinear_growth (fixed denominator)
  double data_norm_initial = 0.0;
  double data_norm_force = 0.0;     // L1 in time of the spatial norms (the verdict uses this)
  double data_norm_force_lp = 0.0;  // Luxemburg-in-time alternative, reported alongside
};

namespace detail {

inline double slope_of(const std::vector<double>& T, const std::vector<double>& v) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < T.size(); ++i)
    if (v[i] > 0.0) {
      x.push_back(T[i]);
      y.push_back(v[i]);
    }
  return x.size() >= 2 ? kernels::loglog_slope(x, y) : 0.0;
}

}  // namespace detail

// local-in-time statement: E_T ratios of the three fixed-point ingredients
// over a horizon sweep. `horizons` must be increasing with the solver node
// spacing chosen so every horizon lands on a node of the longest run.
inline PropReport verify_prop_thm1(mild::SolverConfig cfg, const Field& u0,
                                   const mild::Forcing& forcing,
                                   const varlp::VariableExponent& p_time, double q,
                                   const std::vector<double>& horizons) {
  const Thm1Exponents exps = check_thm1_exponents(cfg.alpha, q, p_time);
  if (!exps.admissible)
    throw std::invalid_argument("verify_prop_thm1: inadmissible exponent combination");
  if (horizons.empty()) throw std::invalid_argument("verify_prop_thm1: empty sweep");

  cfg.horizon = horizons.back();
  cfg.validate();
  SpectralField u0_hat = forward_transform(u0);
  if (cfg.dealias) dealias_inplace(u0_hat);

  const mild::Trajectory initial = mild::semigroup_trajectory(cfg, u0_hat);
  const mild::Trajectory force = mild::duhamel_force(cfg, forcing);
  mild::Trajectory u = initial;
  u += force;
  const mild::Trajectory bil = mild::bilinear_term(cfg, u, u);

  PropReport rep;
  rep.theorem = "local";
  rep.data_norm_initial = varlp::lp_norm(u0, q);

  // ||f||_{L1_t(Lq_x)} over the longest horizon (trapezoid in time); the
  // Luxemburg-in-time alternative is reported next to it since the two
  // force hypotheses differ and the verdict follows the L1 form
  std::vector<double> fnorm_nodes(initial.size(), 0.0);
  if (!forcing.is_zero()) {
    const auto times = cfg.times();
    for (std::size_t i = 0; i < times.size(); ++i) {
      const SpectralField f_hat = forcing.at_node(cfg, i, times[i]);
      fnorm_nodes[i] = varlp::lp_norm(inverse_transform_lenient(f_hat), q);
    }
    const auto dom = varlp::SampleDomain::interval_nodes(cfg.horizon, fnorm_nodes.size());
    std::vector<double> tab(fnorm_nodes.size());
    for (std::size_t i = 0; i < tab.size(); ++i)
      tab[i] = p_time.analytic() ? p_time.eval({times[i], 0.0, 0.0}) : p_time.sample(i);
    const auto p_nodes = varlp::VariableExponent::from_table(std::move(tab), dom);
    rep.data_norm_force_lp =
        varlp::luxemburg_norm(std::span<const double>(fnorm_nodes), p_nodes);
  }

  const double ref2 = [&] {
    const double n = ET_norm(u, p_time, q);
    return n * n;
  }();

  std::vector<double> Ts, r1, r2, growth;
  for (double T : horizons) {
    const double pos = T / cfg.dt();
    const std::size_t node = std::size_t(std::llround(pos));
    if (std::abs(pos - double(node)) > 1e-9 || node + 1 > initial.size())
      throw std::invalid_argument("verify_prop_thm1: horizon does not land on a node");
    const std::size_t count = node + 1;

    SweepRow row;
    row.horizon = T;
    const auto p_T = p_time;  // analytic kinds re-sample inside ET_norm
    row.initial_ratio = rep.data_norm_initial > 0.0
                            ? ET_norm(initial.prefix(count), p_T, q) / rep.data_norm_initial
                            : 0.0;
    double f_l1 = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i)
      f_l1 += 0.5 * (fnorm_nodes[i] + fnorm_nodes[i + 1]) * cfg.dt();
    row.force_ratio = f_l1 > 0.0 ? ET_norm(force.prefix(count), p_T, q) / f_l1 : 0.0;
    const double un = ET_norm(u.prefix(count), p_T, q);
    const double bn = ET_norm(bil.prefix(count), p_T, q);
    row.bilinear_ratio = un > 0.0 ? bn / (un * un) : 0.0;
    row.bilinear_growth = ref2 > 0.0 ? bn / ref2 : 0.0;

    const auto p_on_T =
        varlp::VariableExponent::from_table([&] {
          const auto dom = varlp::SampleDomain::interval_nodes(T, count);
          std::vector<double> tab(count);
          for (std::size_t i = 0; i < count; ++i)
            tab[i] = p_time.analytic() ? p_time.eval({u.times[i], 0.0, 0.0}) : p_time.sample(i);
          return tab;
        }(), varlp::SampleDomain::interval_nodes(T, count));
    const double mfac = t_factor(T, p_on_T);
    row.initial_constant = row.initial_ratio / mfac;
    row.force_constant = row.force_ratio / mfac;
    row.bilinear_constant = row.bilinear_ratio / ((1.0 + T) * mfac);

    rep.rows.push_back(row);
    Ts.push_back(T);
    r1.push_back(row.initial_ratio);
    r2.push_back(row.force_ratio);
    growth.push_back(row.bilinear_growth);
    if (f_l1 > rep.data_norm_force) rep.data_norm_force = f_l1;
  }
  rep.slope_initial = detail::slope_of(Ts, r1);
  rep.slope_force = detail::slope_of(Ts, r2);
  rep.slope_bilinear = detail::slope_of(Ts, growth);
  return rep;
}

// global statement: script-E ratios over the horizon sweep; the constants
// must stay horizon-uniform
inline PropReport verify_prop_thm2(mild::SolverConfig cfg, const Field& u0, const Field& tensor,
                                   const varlp::VariableExponent& p_space,
                                   const std::vector<double>& horizons) {
  const Thm2Exponents exps = check_thm2_exponents(cfg.alpha, p_space);
  if (!exps.valid) throw std::invalid_argument("verify_prop_thm2: invalid exponents");
  if (horizons.empty()) throw std::invalid_argument("verify_prop_thm2: empty sweep");

  cfg.horizon = horizons.back();
  cfg.validate();
  SpectralField u0_hat = forward_transform(u0);
  if (cfg.dealias) dealias_inplace(u0_hat);

  const mild::Forcing forcing =
      tensor.components == cfg.grid.dim * cfg.grid.dim ? mild::Forcing::tensor(tensor)
                                                       : mild::Forcing::zero();
  const mild::Trajectory initial = mild::semigroup_trajectory(cfg, u0_hat);
  const mild::Trajectory force = mild::duhamel_force(cfg, forcing);
  mild::Trajectory u = initial;
  u += force;
  const mild::Trajectory bil = mild::bilinear_term(cfg, u, u);

  PropReport rep;
  rep.theorem = "global";
  rep.data_norm_initial = varlp::mixed_norm(u0, p_space, exps.companion);

  if (!forcing.is_zero()) {
    // tensor data norm: pointwise Frobenius magnitude in the half-exponent
    // mixed space (static tensor: the time sup is the tensor itself)
    if (!(p_space.p_minus > 2.0))
      throw std::invalid_argument("verify_prop_thm2: tensor norm needs p- > 2");
    std::vector<double> half(p_space.domain.size());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = p_space.sample(i) / 2.0;
    const auto p_half = varlp::VariableExponent::from_table(std::move(half), p_space.domain);
    rep.data_norm_force = varlp::mixed_norm(tensor, p_half, exps.tensor_companion);
  }

  const double ref2 = [&] {
    const double n = E_script_norm(u, p_space, cfg.alpha);
    return n * n;
  }();

  std::vector<double> Ts, r1, r2, r3;
  for (double T : horizons) {
    const double pos = T / cfg.dt();
    const std::size_t node = std::size_t(std::llround(pos));
    if (std::abs(pos - double(node)) > 1e-9 || node + 1 > initial.size())
      throw std::invalid_argument("verify_prop_thm2: horizon does not land on a node");
    const std::size_t count = node + 1;

    SweepRow row;
    row.horizon = T;
    row.initial_ratio =
        rep.data_norm_initial > 0.0
            ? E_script_norm(initial.prefix(count), p_space, cfg.alpha) / rep.data_norm_initial
            : 0.0;
    row.force_ratio = rep.data_norm_force > 0.0
                          ? E_script_norm(force.prefix(count), p_space, cfg.alpha) /
                                rep.data_norm_force
                          : 0.0;
    const double un = E_script_norm(u.prefix(count), p_space, cfg.alpha);
    const double bn = E_script_norm(bil.prefix(count), p_space, cfg.alpha);
    row.bilinear_ratio = un > 0.0 ? bn / (un * un) : 0.0;
    row.bilinear_growth = ref2 > 0.0 ? bn / ref2 : 0.0;
    row.initial_constant = row.initial_ratio;  // horizon-uniform statement
    row.force_constant = row.force_ratio;
    row.bilinear_constant = row.bilinear_ratio;
    rep.rows.push_back(row);
    Ts.push_back(T);
    r1.push_back(row.initial_ratio);
    r2.push_back(row.force_ratio);
    r3.push_back(row.bilinear_ratio);
  }
  rep.slope_initial = detail::slope_of(Ts, r1);
  rep.slope_force = detail::slope_of(Ts, r2);
  rep.slope_bilinear = detail::slope_of(Ts, r3);
  return rep;
}

// ---------------------------------------------------------------------------
// smallness verdicts
// ---------------------------------------------------------------------------

struct SmallnessVerdict {
  bool small_enough = false;
  double lhs = 0.0;        // measured-constant-weighted data size
  double threshold = 0.0;  // 1 / (4 C_B)
  double largest_horizon = 0.0;  // local statement: largest admissible T
};

// global form: C (||u0|| + ||F||) < 1/(4 C_B), strict
inline SmallnessVerdict smallness_verdict_global(double data_norm, double measured_constant,
                                                 double c_bilinear) {
  SmallnessVerdict v;
  v.lhs = measured_constant * data_norm;
  v.threshold = c_bilinear > 0.0 ? 1.0 / (4.0 * c_bilinear) : 0.0;
  v.small_enough = v.lhs < v.threshold;
  v.largest_horizon = v.small_enough ? std::numeric_limits<double>::infinity() : 0.0;
  return v;
}

// local form: the contraction condition holds while
//   C * data <= threshold / ((1 + T) max{T^{1/p-}, T^{1/p+}});
// the right side decreases to zero, so a largest horizon always exists for
// nonzero data and is found by bisection
inline SmallnessVerdict smallness_verdict_local(double data_norm, double measured_constant,
                                                double c_bilinear,
                                                const varlp::VariableExponent& p_time,
                                                double wanted_horizon = 0.0) {
  SmallnessVerdict v;
  v.threshold = c_bilinear > 0.0 ? 1.0 / (4.0 * c_bilinear) : 0.0;
  v.lhs = measured_constant * data_norm;
  if (v.lhs <= 0.0) {
    v.largest_horizon = std::numeric_limits<double>::infinity();
    v.small_enough = true;
    return v;
  }
  auto rhs = [&](double T) { return v.threshold / ((1.0 + T) * t_factor(T, p_time)); };
  double lo = 1e-12, hi = 1e-12;
  if (v.lhs >= rhs(lo)) {
    v.largest_horizon = 0.0;
    v.small_enough = false;
    return v;
  }
  while (v.lhs < rhs(hi) && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (v.lhs < rhs(mid))
      lo = mid;
    else
      hi = mid;
  }
  v.largest_horizon = lo;
  v.small_enough = wanted_horizon > 0.0 ? v.largest_horizon >= wanted_horizon
                                        : v.largest_horizon > 0.0;
  return v;
}

}  // namespace fns::theorems
