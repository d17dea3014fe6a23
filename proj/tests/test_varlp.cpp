#include <doctest.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "fns/varlp.hpp"
#include "testutil.hpp"

using namespace fns;
using namespace fns::varlp;

namespace {

SampleDomain unit_interval(std::size_t n = 4096) { return SampleDomain::interval_midpoint(1.0, n); }

// p = 2 on [0, 1/2), 3 on [1/2, 1]
VariableExponent piecewise_23(std::size_t n = 4096) {
  const SampleDomain dom = unit_interval(n);
  std::vector<double> tab(n);
  for (std::size_t i = 0; i < n; ++i) tab[i] = dom.point(i)[0] < 0.5 ? 2.0 : 3.0;
  return VariableExponent::from_table(std::move(tab), dom);
}

}  // namespace

TEST_CASE("exponent validation") {
  CHECK_THROWS(VariableExponent::constant(1.0, unit_interval()));   // p- must exceed 1
  CHECK_THROWS(VariableExponent::constant(0.5, unit_interval()));
  CHECK_THROWS(VariableExponent::sinusoidal(2.0, 1.5, unit_interval()));  // |a| < p0 - 1
  const auto p = VariableExponent::sinusoidal(3.0, 0.5, unit_interval());
  CHECK(p.p_minus == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(p.p_plus == doctest::Approx(3.5).epsilon(1e-6));
}

TEST_CASE("modular: direct evaluations") {
  const auto dom = unit_interval();
  const auto p2 = VariableExponent::constant(2.0, dom);

  std::vector<double> ones(dom.size(), 1.0);
  CHECK(modular(std::span<const double>(ones), p2) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> zeros(dom.size(), 0.0);
  CHECK(modular(std::span<const double>(zeros), p2) == 0.0);

  // f = 2 with p in {2,3} on halves: 0.5 * 4 + 0.5 * 8 = 6
  const auto pw = piecewise_23();
  std::vector<double> twos(pw.domain.size(), 2.0);
  CHECK(modular(std::span<const double>(twos), pw) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("luxemburg norm: exact cases") {
  const auto dom = unit_interval();

  SUBCASE("zero input gives zero without bisection") {
    std::vector<double> zeros(dom.size(), 0.0);
    CHECK(luxemburg_norm(std::span<const double>(zeros),
                         VariableExponent::constant(2.0, dom)) == 0.0);
  }

  SUBCASE("constant exponent reduces to the classical L^p norm") {
    const auto p2 = VariableExponent::constant(2.0, dom);
    std::vector<double> ones(dom.size(), 1.0);
    CHECK(luxemburg_norm(std::span<const double>(ones), p2) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("piecewise oracle: rho(2/lambda) = 1 has the analytic root lambda = 2") {
    // 0.5 a^2 + 0.5 a^3 = 1 with a = 2 / lambda factors as (a - 1)(a^2 + 2a + 2)
    const auto pw = piecewise_23();
    std::vector<double> twos(pw.domain.size(), 2.0);
    CHECK(std::abs(luxemburg_norm(std::span<const double>(twos), pw) - 2.0) < 1e-10 * 2.0);
  }
}

TEST_CASE("luxemburg norm: structural properties on seeded data") {
  const auto dom = unit_interval(1024);
  const auto p = VariableExponent::sinusoidal(2.5, 0.8, dom);

  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto f = testutil::random_samples(dom.size(), seed);
    const double norm = luxemburg_norm(std::span<const double>(f), p);
    REQUIRE(norm > 0.0);

    // unit ball property
    std::vector<double> scaled(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) scaled[i] = f[i] / norm;
    CHECK(modular(std::span<const double>(scaled), p) <= 1.0 + 1e-12);
    for (std::size_t i = 0; i < f.size(); ++i) scaled[i] = f[i] / (0.999 * norm);
    CHECK(modular(std::span<const double>(scaled), p) > 1.0);

    // homogeneity
    const double c = 0.3 + 2.0 * double(seed);
    std::vector<double> cf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) cf[i] = c * f[i];
    CHECK(luxemburg_norm(std::span<const double>(cf), p) ==
          doctest::Approx(c * norm).epsilon(1e-10));

    // triangle inequality and monotonicity against a second sample
    auto g = testutil::random_samples(dom.size(), seed + 100);
    std::vector<double> sum(f.size()), absf(f.size()), big(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      sum[i] = f[i] + g[i];
      absf[i] = std::abs(f[i]);
      big[i] = std::abs(f[i]) + std::abs(g[i]);
    }
    const double ng = luxemburg_norm(std::span<const double>(g), p);
    CHECK(luxemburg_norm(std::span<const double>(sum), p) <= norm + ng + 1e-10);
    CHECK(luxemburg_norm(std::span<const double>(absf), p) <=
          luxemburg_norm(std::span<const double>(big), p) + 1e-12);

    // constant-exponent consistency
    const auto p3 = VariableExponent::constant(3.0, dom);
    const double lux = luxemburg_norm(std::span<const double>(f), p3);
    const double mod = std::pow(modular(std::span<const double>(f), p3), 1.0 / 3.0);
    CHECK(lux == doctest::Approx(mod).epsilon(1e-10));
  }
}

TEST_CASE("mixed norm is the max of its two constituents") {
  const auto dom = unit_interval(512);
  const auto p = VariableExponent::sinusoidal(2.0, 0.5, dom);
  auto f = testutil::random_samples(dom.size(), 7u);
  const double lux = luxemburg_norm(std::span<const double>(f), p);
  const double l4 = lp_norm(std::span<const double>(f), 4.0, dom);
  const double mixed = mixed_norm(std::span<const double>(f), p, 4.0);
  CHECK(mixed == doctest::Approx(std::max(lux, l4)).epsilon(1e-14));
  CHECK(mixed >= lux);
  CHECK(mixed >= l4);

  std::vector<double> ones(dom.size(), 1.0);
  CHECK(mixed_norm(std::span<const double>(ones), p, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> zeros(dom.size(), 0.0);
  CHECK(mixed_norm(std::span<const double>(zeros), p, 4.0) == 0.0);
}

TEST_CASE("conjugate exponent") {
  const auto dom = unit_interval(256);
  const auto p2 = VariableExponent::constant(2.0, dom);
  const auto p2c = conjugate_exponent(p2);
  CHECK(p2c.p_minus == doctest::Approx(2.0).epsilon(1e-14));

  const auto p4 = VariableExponent::constant(4.0, dom);
  CHECK(conjugate_exponent(p4).p_plus == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  const auto ps = VariableExponent::sinusoidal(3.0, 0.7, dom);
  const auto psc = conjugate_exponent(ps);
  const auto back = conjugate_exponent(psc);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    CHECK(std::abs(1.0 / ps.sample(i) + 1.0 / psc.sample(i) - 1.0) < 1e-14);
    CHECK(std::abs(back.sample(i) - ps.sample(i)) < 1e-13);
  }
}

TEST_CASE("log-Hoelder constants") {
  const auto dom = unit_interval(64);

  SUBCASE("constant exponents have vanishing constants") {
    const auto rep = check_log_holder(VariableExponent::constant(2.0, dom), 2000, 5u);
    CHECK(rep.c_local == 0.0);
    REQUIRE(rep.c_decay.has_value());
    CHECK(*rep.c_decay == 0.0);
  }

  SUBCASE("log tail with b = 0 has no decay defect") {
    const auto rep = check_log_holder(VariableExponent::log_tail(2.5, 0.0, dom), 2000, 5u);
    REQUIRE(rep.c_decay.has_value());
    CHECK(*rep.c_decay == 0.0);
  }

  SUBCASE("log tail with b = 0.1: decay constant equals b and is sample-stable") {
    const auto p = VariableExponent::log_tail(2.5, 0.1, dom);
    const auto rep1 = check_log_holder(p, 4000, 5u);
    const auto rep2 = check_log_holder(p, 8000, 5u);
    REQUIRE(rep1.c_decay.has_value());
    CHECK(*rep1.c_decay > 0.0);
    CHECK(*rep1.c_decay == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(std::abs(*rep2.c_decay - *rep1.c_decay) < 0.05 * *rep1.c_decay);
  }

  SUBCASE("sinusoidal exponent has no limit at infinity") {
    const auto rep = check_log_holder(VariableExponent::sinusoidal(2.5, 0.5, dom), 500, 5u);
    CHECK_FALSE(rep.c_decay.has_value());
  }
}

TEST_CASE("Hoelder product check") {
  const auto dom = unit_interval(512);

  SUBCASE("classical constant-exponent case stays below 1") {
    const auto p = VariableExponent::constant(2.0, dom);
    const auto q = VariableExponent::constant(4.0, dom);
    const auto r = VariableExponent::constant(4.0, dom);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto f = testutil::random_samples(dom.size(), seed);
      auto g = testutil::random_samples(dom.size(), seed + 50);
      const auto rep = holder_product_check(std::span<const double>(f),
                                            std::span<const double>(g), p, q, r);
      CHECK(rep.ratio <= 1.0 + 1e-12);
    }
  }

  SUBCASE("f = g with q = r = 2p: ratio bounded by 2 (equals 1 exactly)") {
    const auto p = VariableExponent::sinusoidal(2.0, 0.6, dom);
    std::vector<double> twop(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) twop[i] = 2.0 * p.sample(i);
    const auto q = VariableExponent::from_table(std::move(twop), dom);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      auto f = testutil::random_samples(dom.size(), seed);
      const auto rep = holder_product_check(std::span<const double>(f),
                                            std::span<const double>(f), p, q, q);
      CHECK(rep.ratio <= 2.0);
      CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("degenerate zero input reports 0") {
    const auto p = VariableExponent::constant(2.0, dom);
    const auto q = VariableExponent::constant(4.0, dom);
    std::vector<double> zeros(dom.size(), 0.0);
    auto g = testutil::random_samples(dom.size(), 3u);
    const auto rep = holder_product_check(std::span<const double>(zeros),
                                          std::span<const double>(g), p, q, q);
    CHECK(rep.ratio == 0.0);
  }

  SUBCASE("violated exponent relation is rejected") {
    const auto p = VariableExponent::constant(2.0, dom);
    const auto q = VariableExponent::constant(4.0, dom);
    const auto r = VariableExponent::constant(3.0, dom);
    std::vector<double> f(dom.size(), 1.0);
    CHECK_THROWS(holder_product_check(std::span<const double>(f), std::span<const double>(f),
                                      p, q, r));
  }
}

TEST_CASE("duality lower bound") {
  const auto dom = unit_interval(512);

  SUBCASE("zero input") {
    std::vector<double> zeros(dom.size(), 0.0);
    CHECK(duality_lower_bound(std::span<const double>(zeros),
                              VariableExponent::constant(2.0, dom), 4, 1u) == 0.0);
  }

  SUBCASE("constant exponent: the near-optimizer attains the norm") {
    const auto p = VariableExponent::constant(3.0, dom);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto f = testutil::random_samples(dom.size(), seed);
      const double norm = luxemburg_norm(std::span<const double>(f), p);
      const double sup = duality_lower_bound(std::span<const double>(f), p, 8, seed);
      CHECK(sup >= (1.0 - 1e-6) * norm);
      CHECK(sup >= norm - 1e-8 * norm);
    }
  }

  SUBCASE("variable exponent: pairing reaches at least the norm minus tolerance") {
    const auto p = VariableExponent::sinusoidal(2.5, 0.9, dom);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto f = testutil::random_samples(dom.size(), seed);
      const double norm = luxemburg_norm(std::span<const double>(f), p);
      const double sup = duality_lower_bound(std::span<const double>(f), p, 16, seed);
      CHECK(sup >= norm * (1.0 - 1e-6) - 1e-12);
    }
  }
}

TEST_CASE("embedding on a bounded domain") {
  const auto dom = unit_interval(512);

  SUBCASE("equal exponents: ratio is 1, bound is 1 + |X| = 2") {
    const auto q = VariableExponent::constant(2.0, dom);
    auto f = testutil::random_samples(dom.size(), 2u);
    const auto rep = embedding_check(std::span<const double>(f), q, q);
    REQUIRE(rep.applicable);
    CHECK(rep.bound == doctest::Approx(2.0));
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("f = 1, q1 = 2, q2 = 4 on [0,1]: both norms are 1") {
    std::vector<double> ones(dom.size(), 1.0);
    const auto rep = embedding_check(std::span<const double>(ones),
                                     VariableExponent::constant(2.0, dom),
                                     VariableExponent::constant(4.0, dom));
    REQUIRE(rep.applicable);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ratio <= rep.bound);
  }

  SUBCASE("random data under q2 = q1 + 1/2") {
    const auto q1 = VariableExponent::sinusoidal(2.2, 0.4, dom);
    std::vector<double> shifted(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) shifted[i] = q1.sample(i) + 0.5;
    const auto q2 = VariableExponent::from_table(std::move(shifted), dom);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      auto f = testutil::random_samples(dom.size(), seed);
      const auto rep = embedding_check(std::span<const double>(f), q1, q2);
      REQUIRE(rep.applicable);
      CHECK(rep.ratio <= rep.bound + 1e-12);
    }
  }

  SUBCASE("q1 > q2 somewhere: not claimed") {
    const auto q1 = VariableExponent::constant(4.0, dom);
    const auto q2 = VariableExponent::constant(2.0, dom);
    std::vector<double> ones(dom.size(), 1.0);
    CHECK_FALSE(embedding_check(std::span<const double>(ones), q1, q2).applicable);
  }
}

TEST_CASE("norm of the constant 1 on [0, T]") {
  SUBCASE("constant exponent: exactly T^{1/p}") {
    for (double T : {0.25, 1.0, 4.0}) {
      const auto p = VariableExponent::constant(3.0, SampleDomain::interval_midpoint(T, 512));
      const auto rep = unit_norm_time(p);
      CHECK(rep.norm == doctest::Approx(std::pow(T, 1.0 / 3.0)).epsilon(1e-10));
    }
  }

  SUBCASE("ratio to max{T^{1/p-}, T^{1/p+}} bounded over a T sweep") {
    for (double T : {0.125, 0.5, 1.0, 2.0, 8.0, 32.0}) {
      const auto p = VariableExponent::sinusoidal(3.0, 1.0, SampleDomain::interval_midpoint(T, 512));
      const auto rep = unit_norm_time(p);
      CHECK(rep.ratio <= 1.0 + 1e-10);  // the discrete measure makes C = 1 here
      CHECK(rep.ratio > 0.1);
    }
  }

  SUBCASE("piecewise {2,3}: at T = 1 the root is exactly 1") {
    const auto pw = piecewise_23(512);
    const auto rep = unit_norm_time(pw);
    CHECK(rep.norm == doctest::Approx(1.0).epsilon(1e-10));
    // between the two constant-exponent values at any T
    for (double T : {0.3, 2.5}) {
      const SampleDomain dom = SampleDomain::interval_midpoint(T, 512);
      std::vector<double> tab(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i) tab[i] = dom.point(i)[0] < T / 2 ? 2.0 : 3.0;
      const auto p = VariableExponent::from_table(std::move(tab), dom);
      const double norm = unit_norm_time(p).norm;
      const double lo = std::min(std::pow(T, 1.0 / 2.0), std::pow(T, 1.0 / 3.0));
      const double hi = std::max(std::pow(T, 1.0 / 2.0), std::pow(T, 1.0 / 3.0));
      CHECK(norm >= lo - 1e-12);
      CHECK(norm <= hi + 1e-12);
    }
  }
}

TEST_CASE("luxemburg norm runs fast on large constant-exponent data") {
  const std::size_t n = 1u << 20;
  const auto dom = SampleDomain::interval_midpoint(1.0, n);
  const auto p = VariableExponent::constant(2.0, dom);
  auto f = testutil::random_samples(n, 99u);
  const auto t0 = std::chrono::steady_clock::now();
  const double norm = luxemburg_norm(std::span<const double>(f), p);
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(norm > 0.0);
  CHECK(dt < 1.0);
}
