#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fns/kernels.hpp"
#include "fns/presets.hpp"
#include "testutil.hpp"

using namespace fns;
using namespace fns::kernels;

namespace {
constexpr double pi = std::numbers::pi;

double gauss3(double t, double r) {
  return std::pow(4.0 * pi * t, -1.5) * std::exp(-r * r / (4.0 * t));
}
double poisson3(double t, double r) { return (1.0 / (pi * pi)) * t / std::pow(t * t + r * r, 2.0); }
}  // namespace

TEST_CASE("heat kernel: classical closed forms") {
  SUBCASE("alpha = 1 is the Gaussian") {
    for (double t : {0.25, 1.0, 4.0}) {
      for (double r : {0.0, 0.5, 1.0, 2.0, 3.0 * std::sqrt(t)}) {
        const double got = heat_kernel_radial(1.0, t, r);
        CHECK(std::abs(got - gauss3(t, r)) < 1e-9 * gauss3(t, r));
      }
    }
  }

  SUBCASE("alpha = 1/2 is the Poisson kernel") {
    for (double t : {0.5, 1.0, 2.0}) {
      for (double r : {0.0, 0.5, 1.0, 4.0}) {
        const double got = heat_kernel_radial(0.5, t, r);
        CHECK(std::abs(got - poisson3(t, r)) < 1e-8 * poisson3(t, r));
      }
    }
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS(heat_kernel_radial(1.0, 0.0, 1.0));
    CHECK_THROWS(heat_kernel_radial(1.0, -1.0, 1.0));
    CHECK_THROWS(heat_kernel_radial(1.0, 1.0, -1.0));
    CHECK_THROWS(heat_kernel_radial(1.4, 1.0, 1.0));
  }
}

TEST_CASE("heat kernel: unit mass and monotone radial profile") {
  for (double alpha : {0.6, 0.8, 1.0}) {
    const KernelProfile prof(alpha, 1.0);
    CHECK(prof.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    double prev = prof.value(0.0);
    CHECK(prev > 0.0);
    for (double r = 0.25; r <= 6.0; r += 0.25) {
      const double v = prof.value(r);
      CHECK(v >= 0.0);
      CHECK(v <= prev * (1.0 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("heat kernel: exact scaling self-similarity") {
  for (double alpha : {0.6, 0.75, 1.0}) {
    for (double t : {0.01, 0.1, 10.0}) {
      for (double r : {0.2, 1.0, 3.0}) {
        const double lhs = heat_kernel_radial(alpha, t, r);
        const double scale = std::pow(t, -0.5 / alpha);
        const double rhs = std::pow(t, -1.5 / alpha) * heat_kernel_radial(alpha, 1.0, scale * r);
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::pow(t, -1.5 / alpha) *
                                         heat_kernel_radial(alpha, 1.0, 0.0));
      }
    }
  }
}

TEST_CASE("gradient of the heat kernel") {
  SUBCASE("alpha = 1 matches the Gaussian derivative") {
    for (double t : {0.5, 1.0, 2.0}) {
      for (double r : {0.3, 1.0, 2.5}) {
        const double want = -r / (2.0 * t) * gauss3(t, r);
        CHECK(std::abs(grad_heat_kernel(1.0, t, r) - want) < 1e-8 * std::abs(want));
      }
    }
  }

  SUBCASE("vanishes at the origin by radial symmetry") {
    for (double alpha : {0.6, 0.8, 1.0}) CHECK(grad_heat_kernel(alpha, 1.0, 0.0) == 0.0);
  }

  SUBCASE("matches central differences away from the origin") {
    const double alpha = 0.75, t = 1.0, r = 2.0, h = 1e-4;
    const double fd =
        (heat_kernel_radial(alpha, t, r + h) - heat_kernel_radial(alpha, t, r - h)) / (2.0 * h);
    const double got = grad_heat_kernel(alpha, t, r);
    CHECK(std::abs(got - fd) < 1e-6 * std::abs(fd));
  }
}

TEST_CASE("lower-dimensional kernels against closed forms") {
  // d = 1 Gaussian and Poisson
  CHECK(heat_kernel_radial(1.0, 0.7, 0.9, 1) ==
        doctest::Approx(std::pow(4.0 * pi * 0.7, -0.5) * std::exp(-0.81 / 2.8)).epsilon(1e-9));
  CHECK(heat_kernel_radial(0.5, 0.7, 0.9, 1) ==
        doctest::Approx((0.7 / pi) / (0.49 + 0.81)).epsilon(1e-8));
  // d = 2 Gaussian
  CHECK(heat_kernel_radial(1.0, 0.7, 0.9, 2) ==
        doctest::Approx(std::pow(4.0 * pi * 0.7, -1.0) * std::exp(-0.81 / 2.8)).epsilon(1e-9));
}

TEST_CASE("oseen kernel: odd symmetry, scaling, and two independent routes") {
  const double alpha = 1.0, t = 1.0;

  SUBCASE("odd symmetry") {
    const std::array<double, 3> x{0.8, -0.4, 1.1};
    const std::array<double, 3> mx{-0.8, 0.4, -1.1};
    const OseenTensor a = oseen_kernel(alpha, t, x);
    const OseenTensor b = oseen_kernel(alpha, t, mx);
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k)
          CHECK(a.comp[j][h][k] == doctest::Approx(-b.comp[j][h][k]).epsilon(1e-10));
  }

  SUBCASE("scaling identity between t = 1 and t = 16") {
    const double a2 = 0.8;
    const std::array<double, 3> x{1.0, 0.5, 0.0};
    const double lam = std::pow(16.0, 0.5 / a2);
    const std::array<double, 3> xs{lam * x[0], lam * x[1], lam * x[2]};
    const OseenTensor k1 = oseen_kernel(a2, 1.0, x);
    const OseenTensor k16 = oseen_kernel(a2, 16.0, xs);
    const double pref = std::pow(16.0, -4.0 * 0.5 / a2);
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k)
          CHECK(k16.comp[j][h][k] ==
                doctest::Approx(pref * k1.comp[j][h][k]).epsilon(1e-6).scale(k1.max_abs()));
  }

  SUBCASE("radial reduction agrees with lattice synthesis; synthesis self-converges") {
    const std::array<double, 3> x{1.0, 0.0, 0.0};
    const OseenTensor radial = oseen_kernel(alpha, t, x);
    const OseenProfile coarse(alpha, t, 64, 32.0);
    const OseenProfile fine(alpha, t, 128, 32.0);
    const OseenTensor a = coarse.value(x);
    const OseenTensor b = fine.value(x);
    const double scale = radial.max_abs();
    REQUIRE(scale > 0.0);
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k) {
          CHECK(std::abs(a.comp[j][h][k] - b.comp[j][h][k]) < 1e-4 * scale);
          CHECK(std::abs(b.comp[j][h][k] - radial.comp[j][h][k]) < 1e-4 * scale);
        }
  }

  SUBCASE("synthesis rejects points outside the reliable core") {
    const OseenProfile prof(alpha, t, 16, 16.0);
    CHECK_THROWS(prof.value({3.0, 0.0, 0.0}));
  }

  SUBCASE("off-diagonal structure: K at x = r e1 vanishes for fully mixed indices") {
    // at x on the 1-axis, components with {j,h,k} = {1,2,3} all distinct have
    // no invariant tensor to sit in
    const OseenTensor k1 = oseen_kernel(0.8, 0.5, {1.3, 0.0, 0.0});
    CHECK(std::abs(k1.comp[1][2][0]) < 1e-12 * k1.max_abs());
    CHECK(std::abs(k1.comp[2][0][1]) < 1e-12 * k1.max_abs());
  }
}

TEST_CASE("decay estimates collapse under the scaling weight") {
  const std::vector<double> times{0.01, 0.1, 1.0, 10.0};

  SUBCASE("gradient kernel, Gaussian case") {
    const auto radii = decay_radii(1.0, times);
    const auto rep = verify_decay(DecayKernel::GradHeat, 1.0, times, radii);
    CHECK(rep.max_drift <= 0.01);
    CHECK(rep.global_sup > 0.0);
  }

  SUBCASE("gradient kernel, fractional exponents") {
    for (double alpha : {0.6, 0.8}) {
      const auto radii = decay_radii(alpha, times);
      const auto rep = verify_decay(DecayKernel::GradHeat, alpha, times, radii);
      CHECK(rep.max_drift <= 0.01);
    }
  }

  SUBCASE("oseen kernel") {
    const auto radii = decay_radii(1.0, times);
    const auto rep = verify_decay(DecayKernel::Oseen, 1.0, times, radii);
    CHECK(rep.max_drift <= 0.02);
  }

  SUBCASE("empty inputs rejected") {
    CHECK_THROWS(verify_decay(DecayKernel::GradHeat, 1.0, {}, {1.0}));
  }
}

TEST_CASE("smoothing rates") {
  const BumpProfile phi{1.0, 1.0};
  std::vector<double> times;
  for (double t = 1.0; t <= 100.0 * 1.0001; t *= std::sqrt(10.0)) times.push_back(t);

  SUBCASE("L1 -> Linf rate is -3/(2 alpha)") {
    for (double alpha : {0.6, 0.8, 1.0}) {
      const auto rep = smoothing_bump_linf_l1(alpha, 0.0, phi, 1.0, times);
      const double predicted = -1.5 / alpha;
      CHECK(std::abs(rep.fitted_slope - predicted) < 0.05 * std::abs(predicted));
    }
  }

  SUBCASE("Young case: r = p gives slope 0 and ratio <= 1") {
    const auto rep = smoothing_l2_operator(0.8, 0.0, times);
    CHECK(rep.fitted_slope == 0.0);
    for (double v : rep.ratios) CHECK(v <= 1.0);
  }

  SUBCASE("nu = 1, r = p = 2: slope -1/(2 alpha)") {
    const auto rep = smoothing_l2_operator(0.75, 1.0, times);
    CHECK(std::abs(rep.fitted_slope - (-1.0 / 1.5)) < 0.05 / 1.5);
  }

  SUBCASE("grid path agrees with the radial route on the same profile") {
    const GridSpec g(3, 64, 40.0);
    const Field f = make_preset("bump", g, 1.0);
    std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
    const auto grid_rep =
        smoothing_grid(1.0, 0.0, 1.0, std::numeric_limits<double>::infinity(), f, ts);
    // continuum profile matching the preset: radius L/8, rescaled to unit mass
    const double R = g.length / 8.0;
    const double raw_mass =
        4.0 * pi * integrate([&](double s) { return BumpProfile{R, 1.0}(s) * s * s; }, 0.0, R,
                             1e-12);
    const BumpProfile phi_cont{R, 1.0 / raw_mass};
    const auto radial_rep = smoothing_bump_linf_l1(1.0, 0.0, phi_cont, R, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(grid_rep.ratios[i] ==
            doctest::Approx(radial_rep.ratios[i]).epsilon(0.02));
    // decaying, though still pre-asymptotic at these times on this box
    CHECK(grid_rep.fitted_slope < -0.8);
  }

  SUBCASE("non-band-limited input raises the aliasing flag") {
    const GridSpec g(1, 16, 8.0);
    Field f(g, 1);
    for (std::size_t i = 0; i < g.site_count(); ++i) f.at(0, i) = (i % 2 == 0) ? 1.0 : -0.5;
    const auto rep = smoothing_grid(1.0, 0.0, 2.0, 2.0, f, {1.0, 2.0});
    CHECK(rep.aliasing_warning);
  }
}

TEST_CASE("time integral of the kernel decay bound") {
  SUBCASE("alpha = 1: c = 1/3 via the elementary antiderivative") {
    CHECK(time_integral_calpha(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  }

  SUBCASE("alpha = 1/2 boundary: c = int (1+b)^-4 db = 1/3") {
    CHECK(time_integral_calpha(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  }

  SUBCASE("value * r^{4 - 2 alpha} is r-independent") {
    for (double alpha : {0.6, 0.75, 1.0}) {
      const double ref = time_integral_constant(alpha, 1.0);
      for (double r : {0.1, 0.5, 2.0, 10.0}) {
        const double v = time_integral_constant(alpha, r) * std::pow(r, 4.0 - 2.0 * alpha);
        CHECK(std::abs(v - ref) < 1e-8 * ref);
      }
    }
  }

  SUBCASE("r must be positive") { CHECK_THROWS(time_integral_constant(0.8, 0.0)); }
}

TEST_CASE("semigroup property at the multiplier level") {
  const GridSpec g(2, 16, 2.0 * pi);
  Field f = testutil::random_scalar_field(g, 8u);
  const SpectralField F = forward_transform(f);

  CHECK(semigroup_check(0.8, 1.0, 0.0, F) == 0.0);          // s = 0 is the identity
  CHECK(semigroup_check(1.0, 0.5, 0.5, F) <= 1e-12);        // exact multiplier algebra
  CHECK(semigroup_check(0.6, 50.0, 50.0, F) <= 1e-12);

  // strong decay: at t = 100 only the zero mode survives
  const SpectralField G = kernels::semigroup_apply(0.6, 100.0, F);
  for (std::size_t i = 1; i < g.site_count(); ++i) CHECK(std::abs(G.at(0, i)) <= 1e-12);

  CHECK_THROWS(kernels::semigroup_apply(0.8, -1.0, F));
}
