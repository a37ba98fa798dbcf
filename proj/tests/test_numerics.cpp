#include <cmath>
#include <random>

#include "ampkit/numerics.hpp"
#include "ampkit/quadrature.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ampkit;

TEST_CASE("erfc basics and reflection") {
  CHECK(std::erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::erfc(2.0) == doctest::Approx(2.0 - std::erfc(-2.0)).epsilon(1e-15));
  // defining integral at x = 1
  const double q = oracle::integrate(
      [](double t) { return 2.0 / std::sqrt(kPi) * std::exp(-t * t); }, 1.0, 30.0, 1e-15);
  CHECK(std::abs(std::erfc(1.0) - q) < 1e-12);
}

TEST_CASE("erfc symmetry property") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::abs(std::erfc(x) + std::erfc(-x) - 2.0) < 1e-12);
  }
}

TEST_CASE("erfcx large-argument path") {
  // continuity across the series/asymptotic switch and against exp(x^2) erfc
  for (double x : {0.5, 2.0, 7.9, 8.1, 15.0, 26.0, 40.0, 300.0}) {
    if (x < 26.0) {
      CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-12));
    }
    CHECK(log_erfc(x) == doctest::Approx(-x * x + std::log(erfcx(x))).epsilon(1e-12));
  }
  CHECK(log_erfc(-3.0) == doctest::Approx(std::log(std::erfc(-3.0))).epsilon(1e-14));
}

TEST_CASE("scaled bessel at zero and series oracle") {
  CHECK(scaled_bessel_i(0, 0.0) == doctest::Approx(1.0));
  CHECK(scaled_bessel_i(1, 0.0) == doctest::Approx(0.0));
  const double want =
      static_cast<double>(oracle::bessel_i_series(0, 3.0L) * std::exp(-3.0L));
  CHECK(std::abs(scaled_bessel_i(0, 3.0) - want) < 1e-12);
}

TEST_CASE("scaled bessel ratio is monotone with limit 1") {
  CHECK(scaled_bessel_i(1, 50.0) / scaled_bessel_i(0, 50.0) > 0.98);
  double prev = 0.0;
  for (double x : {0.5, 1.0, 5.0, 20.0, 29.0, 31.0, 100.0, 1000.0}) {
    const double r = scaled_bessel_i(1, x) / scaled_bessel_i(0, x);
    CHECK(r > prev);
    CHECK(r < 1.0);
    CHECK(r == doctest::Approx(oracle::bessel_ratio_cf(x)).epsilon(1e-11));
    prev = r;
  }
}

TEST_CASE("gaussian product closed cases") {
  {
    GaussParams f[] = {{0.0, 1.0}, {0.0, 1.0}};
    auto p = gaussian_product(f);
    CHECK(p.g.var == doctest::Approx(0.5));
    CHECK(p.g.mean == doctest::Approx(0.0));
  }
  {
    GaussParams f[] = {{1.0, 1.0}, {3.0, 1.0}};
    auto p = gaussian_product(f);
    CHECK(p.g.mean == doctest::Approx(2.0));
    CHECK(p.g.var == doctest::Approx(0.5));
    CHECK(p.log_scale == doctest::Approx(log_npdf(1.0, 3.0, 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("gaussian product vs pointwise grid") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> um(-2.0, 2.0), uv(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    GaussParams f[3];
    for (auto& g : f) g = {um(rng), uv(rng)};
    auto p = gaussian_product(f);
    for (double x = -3.0; x <= 3.0; x += 0.37) {
      double direct = 1.0;
      for (auto& g : f) direct *= oracle::gauss(x, g.mean, g.var);
      const double packed = std::exp(p.log_scale) * oracle::gauss(x, p.g.mean, p.g.var);
      CHECK(std::abs(direct - packed) < 1e-10);
    }
  }
}

TEST_CASE("gaussian product associativity") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> um(-2.0, 2.0), uv(0.2, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    GaussParams a{um(rng), uv(rng)}, b{um(rng), uv(rng)}, c{um(rng), uv(rng)};
    GaussParams abc[] = {a, b, c};
    auto whole = gaussian_product(abc);
    GaussParams ab[] = {a, b};
    auto pab = gaussian_product(ab);
    GaussParams ab_c[] = {pab.g, c};
    auto nested = gaussian_product(ab_c);
    CHECK(std::abs(whole.g.mean - nested.g.mean) < 1e-12);
    CHECK(std::abs(whole.g.var - nested.g.var) < 1e-12);
    CHECK(std::abs(whole.log_scale - (nested.log_scale + pab.log_scale)) < 1e-12);
  }
}

TEST_CASE("j_integral trivial and oracle values") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(j_integral(0, 0.0, 1.0, -inf, inf) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(j_integral(1, 0.0, 1.0, -inf, inf)) < 1e-13);
  const double want = oracle::integrate(
      [](double x) { return std::pow(x, 5) * oracle::gauss(x, 1.0, 0.5); }, 0.9, 1.1);
  CHECK(std::abs(j_integral(5, 1.0, 0.5, 0.9, 1.1) - want) < 1e-10);
  CHECK_THROWS(j_integral(13, 0.0, 1.0, 0.0, 1.0));
}

TEST_CASE("j_integral interval additivity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> um(-1.5, 1.5), uv(0.3, 2.0), ua(-4.0, 4.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = trial % 7;
    const double xh = um(rng), xb = uv(rng);
    double p[3] = {ua(rng), ua(rng), ua(rng)};
    std::sort(p, p + 3);
    if (p[1] - p[0] < 1e-3 || p[2] - p[1] < 1e-3) continue;
    const double lhs =
        j_integral(n, xh, xb, p[0], p[1]) + j_integral(n, xh, xb, p[1], p[2]);
    CHECK(std::abs(lhs - j_integral(n, xh, xb, p[0], p[2])) < 1e-10);
  }
}

TEST_CASE("gauss-hermite normalization and moments") {
  for (int n : {5, 40, 64, 201}) {
    auto rule = gauss_hermite(n);
    double w = 0.0, m2 = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      w += rule.weights[i];
      m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    CHECK(std::abs(w - 1.0) < 1e-12);
    CHECK(std::abs(m2 - 1.0) < 1e-12);
  }
}

TEST_CASE("gauss-hermite integrates polynomials up to degree 20") {
  auto rule = gauss_hermite(40);
  // E[t^{2k}] = (2k-1)!!
  double want = 1.0;
  for (int k = 1; 2 * k <= 20; ++k) {
    want *= (2 * k - 1);
    const double got = quad_expect(rule, [&](double t) { return std::pow(t, 2 * k); });
    CHECK(std::abs(got - want) < 1e-10 * want);
    const double odd = quad_expect(rule, [&](double t) { return std::pow(t, 2 * k - 1); });
    CHECK(std::abs(odd) < 1e-10 * want);
  }
}

TEST_CASE("quad_expect basics and error naming") {
  auto rule = gauss_hermite(64);
  CHECK(quad_expect(rule, [](double) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(quad_expect(rule, [](double t) { return t * t; }) ==
        doctest::Approx(1.0).epsilon(1e-10));
  const double got = quad_expect(rule, [](double t) { return std::erfc(t); });
  const double want = oracle::integrate(
      [](double t) { return std::erfc(t) * oracle::gauss(t, 0.0, 1.0); }, -14.0, 14.0);
  CHECK(std::abs(got - want) < 1e-8);
  bool threw = false;
  try {
    quad_expect(rule, [](double t) {
      return t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    });
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("adaptive quadrature against known values") {
  CHECK(adaptive_quad([](double x) { return std::sin(x); }, 0.0, kPi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  const double g = adaptive_quad([](double x) { return oracle::gauss(x, 0.3, 0.7); },
                                 -12.0, 12.0);
  CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated normal against quadrature") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 0.05) continue;
    const auto t = truncated_std_normal(lo, hi);
    const double z = oracle::integrate(
        [](double x) { return oracle::gauss(x, 0.0, 1.0); }, lo, hi);
    const double m1 = oracle::integrate(
        [](double x) { return x * oracle::gauss(x, 0.0, 1.0); }, lo, hi);
    const double m2 = oracle::integrate(
        [](double x) { return x * x * oracle::gauss(x, 0.0, 1.0); }, lo, hi);
    CHECK(std::exp(t.log_mass) == doctest::Approx(z).epsilon(1e-10));
    CHECK(t.mean == doctest::Approx(m1 / z).epsilon(1e-9));
    CHECK(t.var == doctest::Approx(m2 / z - (m1 / z) * (m1 / z)).epsilon(1e-8));
  }
  // deep right tail stays finite and sensible
  const auto deep = truncated_std_normal(30.0, std::numeric_limits<double>::infinity());
  CHECK(deep.mean == doctest::Approx(30.0 + 1.0 / 30.0).epsilon(1e-3));
  CHECK(deep.var > 0.0);
  CHECK(deep.log_mass < -400.0);
}
