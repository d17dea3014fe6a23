#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fns/mild.hpp"
#include "fns/presets.hpp"
#include "testutil.hpp"

using namespace fns;
using namespace fns::mild;

namespace {
constexpr double pi = std::numbers::pi;

SolverConfig config_2d(int n, double T, int nodes, double alpha = 1.0) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.horizon = T;
  cfg.time_points = nodes;
  cfg.grid = GridSpec(2, n, 2.0 * pi);
  return cfg;
}

SolverConfig config_3d(int n, double T, int nodes, double alpha = 0.8) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.horizon = T;
  cfg.time_points = nodes;
  cfg.grid = GridSpec(3, n, 2.0 * pi);
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig cfg = config_2d(16, 1.0, 9);
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0.5;
  CHECK_THROWS(cfg.validate());
  cfg.alpha = 1.2;
  CHECK_THROWS(cfg.validate());
  cfg = config_2d(16, 1.0, 9);
  cfg.time_points = 1;
  CHECK_THROWS(cfg.validate());

  cfg = config_3d(32, 1.0, 1025);
  cfg.memory_budget_bytes = std::size_t(64) << 20;  // a 3 * 32^3 x 1025 trajectory won't fit
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("duhamel force integral") {
  SUBCASE("zero forcing gives the zero trajectory") {
    const SolverConfig cfg = config_2d(16, 1.0, 17);
    CHECK(duhamel_force(cfg, Forcing::zero()).sup_spectral_max() == 0.0);
  }

  SUBCASE("time-constant single-mode force matches the closed-form integral") {
    // f = (0, sin(x1)): divergence free, |xi| = 1, so the node value is
    // (1 - exp(-t)) f_hat; trapezoid error is O(dt^2) and quarters when dt
    // halves
    double errs[2];
    int k = 0;
    for (int nodes : {65, 129}) {
      const SolverConfig cfg = config_2d(32, 1.0, nodes, 0.75);
      Field f(cfg.grid, 2);
      for (std::size_t i = 0; i < cfg.grid.site_count(); ++i)
        f.at(1, i) = std::sin(cfg.grid.position(i)[0]);
      const Trajectory tr = duhamel_force(cfg, Forcing::velocity(f));
      const std::size_t plus = std::size_t(cfg.grid.storage_index(1));
      double worst = 0.0;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        const double want = 1.0 - std::exp(-tr.times[i]);
        const cplx got = tr.snaps[i].at(1, plus);
        worst = std::max(worst, std::abs(got - cplx(0.0, -0.5) * want));
      }
      errs[k++] = worst;
    }
    CHECK(errs[0] < 5e-5);
    CHECK(errs[1] / errs[0] == doctest::Approx(0.25).epsilon(0.15));
  }

  SUBCASE("constant tensor has zero divergence, hence zero response") {
    const SolverConfig cfg = config_2d(16, 1.0, 9);
    Field F(cfg.grid, 4);
    for (std::size_t i = 0; i < cfg.grid.site_count(); ++i) {
      F.at(0, i) = 1.0;
      F.at(1, i) = -2.0;
      F.at(2, i) = 0.5;
      F.at(3, i) = 3.0;
    }
    CHECK(duhamel_force(cfg, Forcing::tensor(F)).sup_spectral_max() < 1e-15);
  }
}

TEST_CASE("bilinear term") {
  SUBCASE("B(0, 0) = 0") {
    const SolverConfig cfg = config_2d(16, 1.0, 9);
    const Trajectory z = Trajectory::zero(cfg);
    CHECK(bilinear_term(cfg, z, z).sup_spectral_max() == 0.0);
  }

  SUBCASE("gradient-structure nonlinearity: B vanishes on the static vortex") {
    const SolverConfig cfg = config_2d(64, 1.0, 9);
    const Field u = make_preset("taylor_green_2d", cfg.grid, 1.0);
    const Trajectory tr = Trajectory::constant(cfg, forward_transform(u));
    CHECK(bilinear_term(cfg, tr, tr).sup_spectral_max() < 1e-12);
  }

  SUBCASE("bilinearity in each argument") {
    const SolverConfig cfg = config_3d(16, 0.5, 9);
    const Field a = make_preset("random_divfree", cfg.grid, 1.0, 11u);
    const Field b = make_preset("random_divfree", cfg.grid, 1.0, 12u);
    const Trajectory u = Trajectory::constant(cfg, forward_transform(a));
    const Trajectory v = Trajectory::constant(cfg, forward_transform(b));
    Trajectory u2 = u;
    u2 *= 2.0;
    Trajectory lhs = bilinear_term(cfg, u2, v);
    Trajectory rhs = bilinear_term(cfg, u, v);
    rhs *= 2.0;
    const double scale = rhs.sup_spectral_max();
    lhs -= rhs;
    CHECK(lhs.sup_spectral_max() < 1e-12 * scale + 1e-15);
  }

  SUBCASE("grid mismatch is rejected") {
    const SolverConfig cfg = config_2d(16, 1.0, 9);
    const SolverConfig other = config_2d(32, 1.0, 9);
    CHECK_THROWS(bilinear_term(cfg, Trajectory::zero(other), Trajectory::zero(other)));
  }
}

TEST_CASE("fixed-point iteration") {
  SUBCASE("zero data converges immediately to the zero trajectory") {
    const SolverConfig cfg = config_2d(16, 1.0, 9);
    const auto res = picard_iterate(cfg, Field(cfg.grid, 2));
    REQUIRE(res.trajectory.has_value());
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 1);
    CHECK(res.trajectory->sup_spectral_max() == 0.0);
  }

  SUBCASE("Beltrami data: the solution is pure semigroup decay") {
    const SolverConfig cfg = config_3d(16, 1.0, 9, 0.7);
    const Field u0 = make_preset("abc_beltrami_3d", cfg.grid, 0.1);
    const auto res = picard_iterate(cfg, u0);
    REQUIRE(res.trajectory.has_value());
    CHECK(res.report.converged);
    const SpectralField u0_hat = forward_transform(u0);
    for (std::size_t i = 0; i < res.trajectory->size(); ++i) {
      SpectralField want = u0_hat;
      want *= std::exp(-res.trajectory->times[i]);  // |xi| = 1 modes
      SpectralField diff = res.trajectory->snaps[i];
      diff -= want;
      CHECK(diff.max_abs() < 1e-5 * u0_hat.max_abs());
    }
    CHECK(res.report.max_divergence_defect < 1e-12);
  }

  SUBCASE("small random data: converged, contracting, within the 2 delta ball") {
    const SolverConfig cfg = config_3d(16, 0.5, 9);
    const Field u0 = make_preset("random_divfree", cfg.grid, 0.05, 21u);
    const auto res = picard_iterate(cfg, u0);
    REQUIRE(res.trajectory.has_value());
    CHECK(res.report.converged);
    CHECK(res.report.two_delta_ok);
    for (double r : res.report.ratios) CHECK(r < 1.0);
    CHECK(res.report.max_divergence_defect < 1e-12);
  }

  SUBCASE("initial data that is not divergence free is projected and recorded") {
    const SolverConfig cfg = config_2d(16, 0.5, 9);
    Field u0 = make_preset("gradient_field", cfg.grid, 0.05);
    u0 += make_preset("random_divfree", cfg.grid, 0.05, 3u);
    const auto res = picard_iterate(cfg, u0);
    CHECK(res.report.preprojected);
    REQUIRE(res.trajectory.has_value());
    CHECK(res.report.max_divergence_defect < 1e-12);
  }

  SUBCASE("oversized data trips the divergence detector") {
    const SolverConfig cfg = config_3d(16, 2.0, 17, 0.8);
    const Field u0 = make_preset("random_divfree", cfg.grid, 50.0, 5u);
    const auto res = picard_iterate(cfg, u0);
    CHECK(res.report.diverged);
    CHECK_FALSE(res.trajectory.has_value());
  }
}

TEST_CASE("exponential-Euler cross-check integrator") {
  SUBCASE("linear problem: exact semigroup decay") {
    const SolverConfig cfg = config_3d(16, 1.0, 33, 0.8);
    const Field u0 = make_preset("random_divfree", cfg.grid, 1.0, 7u);
    const Trajectory tr = time_march(cfg, u0, Forcing::zero(), /*include_bilinear=*/false);
    SpectralField u0_hat = forward_transform(u0);
    dealias_inplace(u0_hat);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      SpectralField want = kernels::semigroup_apply(cfg.alpha, tr.times[i], u0_hat);
      want -= tr.snaps[i];
      CHECK(want.max_abs() < 1e-12 * u0_hat.max_abs());
    }
  }

  SUBCASE("gradient nonlinearity keeps the vortex on the semigroup orbit") {
    const SolverConfig cfg = config_2d(32, 1.0, 65, 0.75);
    const Field u0 = make_preset("taylor_green_2d", cfg.grid, 0.8);
    const Trajectory tr = time_march(cfg, u0);
    const SpectralField u0_hat = forward_transform(u0);
    const double rate = std::pow(2.0, cfg.alpha);  // |xi|^2 = 2 modes
    for (std::size_t i = 0; i < tr.size(); ++i) {
      SpectralField want = u0_hat;
      want *= std::exp(-rate * tr.times[i]);
      want -= tr.snaps[i];
      CHECK(want.max_abs() < 1e-10 * u0_hat.max_abs());
    }
  }

  SUBCASE("first order against the trapezoid fixed point: error halves with dt") {
    SolverConfig ref_cfg = config_3d(16, 0.5, 129, 0.8);
    const Field u0 = make_preset("random_divfree", ref_cfg.grid, 0.02, 31u);
    const auto picard = picard_iterate(ref_cfg, u0);
    REQUIRE(picard.trajectory.has_value());

    double errs[2];
    int k = 0;
    for (int nodes : {33, 65}) {
      SolverConfig cfg = ref_cfg;
      cfg.time_points = nodes;
      const Trajectory march = time_march(cfg, u0);
      const std::size_t stride = std::size_t((ref_cfg.time_points - 1) / (nodes - 1));
      double worst = 0.0;
      for (std::size_t i = 0; i < march.size(); ++i) {
        SpectralField diff = march.snaps[i];
        diff -= picard.trajectory->snaps[i * stride];
        worst = std::max(worst, diff.max_abs());
      }
      errs[k++] = worst;
    }
    CHECK(errs[1] / errs[0] == doctest::Approx(0.5).epsilon(0.3));
  }

  SUBCASE("blow-up detection aborts with a diagnostic") {
    const SolverConfig cfg = config_3d(12, 10.0, 17, 0.8);
    const Field u0 = make_preset("random_divfree", cfg.grid, 1e4, 2u);
    CHECK_THROWS(time_march(cfg, u0));
  }
}

TEST_CASE("pressure recovery") {
  SUBCASE("Taylor-Green vortex pressure") {
    const SolverConfig cfg = config_2d(64, 1.0, 9);
    const double a = 1.3;
    const Field u = make_preset("taylor_green_2d", cfg.grid, a);
    const SpectralField P = recover_pressure(cfg, forward_transform(u));
    const Field p = inverse_transform(P);
    for (std::size_t i = 0; i < cfg.grid.site_count(); ++i) {
      const auto x = cfg.grid.position(i);
      const double want = -a * a * (std::cos(2.0 * x[0]) + std::cos(2.0 * x[1])) / 4.0;
      CHECK(std::abs(p.at(0, i) - want) < 1e-12 * a * a);
    }
  }

  SUBCASE("constant velocity has zero pressure") {
    const SolverConfig cfg = config_2d(16, 1.0, 9);
    Field u(cfg.grid, 2);
    for (double& v : u.samples) v = 2.0;
    CHECK(recover_pressure(cfg, forward_transform(u)).max_abs() < 1e-14);
  }

  SUBCASE("Beltrami flow: the advection term is the gradient of |u|^2 / 2") {
    SolverConfig cfg = config_3d(16, 1.0, 9, 0.8);
    cfg.dealias = false;  // |xi| <= 2 product modes fit without truncation
    const Field u = make_preset("abc_beltrami_3d", cfg.grid, 0.9);
    const SpectralField P = recover_pressure(cfg, forward_transform(u));
    Field half_speed(cfg.grid, 1);
    for (std::size_t i = 0; i < cfg.grid.site_count(); ++i) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += u.at(c, i) * u.at(c, i);
      half_speed.at(0, i) = s / 2.0;
    }
    SpectralField want = forward_transform(half_speed);
    want.at(0, 0) = cplx(0.0, 0.0);  // pressure is mean free
    SpectralField diff = P;
    diff -= want;
    CHECK(diff.max_abs() < 1e-10 * want.max_abs());
  }

  SUBCASE("div(u tensor u) - grad P is exactly divergence free") {
    const SolverConfig cfg = config_3d(16, 1.0, 9, 0.8);
    const Field u = make_preset("random_divfree", cfg.grid, 1.0, 40u);
    SpectralField u_hat = forward_transform(u);
    dealias_inplace(u_hat);
    const SpectralField P = recover_pressure(cfg, u_hat);
    const SpectralField adv_projected = mild::detail::projected_advection(cfg, u_hat, u_hat);
    SpectralField grad_p(cfg.grid, 3);
    for (std::size_t m = 0; m < cfg.grid.site_count(); ++m) {
      const auto xi = cfg.grid.derivative_wavevector(m);
      for (int a = 0; a < 3; ++a) grad_p.at(a, m) = cplx(0.0, xi[a]) * P.at(0, m);
    }
    SpectralField total = adv_projected;
    total += grad_p;  // reconstructs div(u tensor u)
    SpectralField reprojected = leray_project(total);
    reprojected -= adv_projected;
    CHECK(reprojected.max_abs() < 1e-12 * std::max(1e-300, total.max_abs()));
  }
}

TEST_CASE("alpha = 1 reduces to the classical heat multiplier") {
  const GridSpec g(3, 16, 2.0 * pi);
  const Field f = make_preset("random_divfree", g, 1.0, 9u);
  const SpectralField F = forward_transform(f);
  for (double t : {0.1, 1.0, 5.0}) {
    const SpectralField got = kernels::semigroup_apply(1.0, t, F);
    SpectralField want = F;
    for (std::size_t i = 0; i < g.site_count(); ++i) {
      const auto xi = g.wavevector(i);
      const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
      for (int c = 0; c < 3; ++c) want.at(c, i) *= std::exp(-t * k2);
    }
    want -= got;
    CHECK(want.max_abs() <= 1e-12 * F.max_abs());
  }
}

TEST_CASE("bilinear constant estimate") {
  const SolverConfig cfg = config_3d(16, 0.5, 9);

  SUBCASE("positive, finite, and monotone under more trials") {
    const auto few = estimate_cb(cfg, 3, 7u);
    const auto more = estimate_cb(cfg, 6, 7u);
    CHECK(few.c_bilinear > 0.0);
    CHECK(std::isfinite(few.c_bilinear));
    CHECK(more.c_bilinear >= few.c_bilinear);        // sup over a superset
    CHECK(more.c_bilinear <= 2.0 * few.c_bilinear);  // stability
    CHECK(few.threshold == doctest::Approx(1.0 / (4.0 * few.c_bilinear)));
  }

  SUBCASE("exact scaling law: L -> 2L with T -> 2^(2a) T gives C_B * 2^(2a-1)") {
    // under that joint rescaling the trapezoid sweep maps node to node with
    // identical semigroup factors, so the law holds to roundoff
    SolverConfig big = cfg;
    big.grid = GridSpec(3, 16, 4.0 * pi);
    big.horizon = cfg.horizon * std::pow(2.0, 2.0 * cfg.alpha);
    const auto small_box = estimate_cb(cfg, 4, 11u);
    const auto big_box = estimate_cb(big, 4, 11u);
    const double want = std::pow(2.0, 2.0 * cfg.alpha - 1.0);
    CHECK(big_box.c_bilinear ==
          doctest::Approx(want * small_box.c_bilinear).epsilon(1e-10));
  }
}
