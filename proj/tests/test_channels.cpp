#include <cmath>
#include <random>

#include "ampkit/channel.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ampkit;

TEST_CASE("awgn updates") {
  AwgnChannel noiseless(0.0);
  auto zp = noiseless.z_posterior(0.7, -0.1, 0.9);
  CHECK(zp.mean == doctest::Approx(0.7));
  CHECK(zp.var == doctest::Approx(0.0));

  AwgnChannel ch(1.0);
  CHECK(ch.g(0.4, 0.4, 0.7).ghat == doctest::Approx(0.0));
  auto g = ch.g(1.0, 0.0, 1.0);
  CHECK(g.ghat == doctest::Approx(0.5));
  CHECK(g.gbar == doctest::Approx(-0.5));
  CHECK(ch.z_posterior(1.0, 0.0, 1.0).mean == doctest::Approx(0.5));

  AwgnChannel degen(0.0);
  CHECK_THROWS(degen.g(1.0, 0.0, 0.0));
}

TEST_CASE("awgn posterior variance below window variance") {
  AwgnChannel ch(0.3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0), uv(1e-3, 4.0);
  for (int t = 0; t < 300; ++t) {
    const double Zb = uv(rng);
    auto zp = ch.z_posterior(u(rng), u(rng), Zb);
    CHECK(zp.var < Zb);
  }
}

TEST_CASE("quantizer f0 special cases") {
  const double inf = std::numeric_limits<double>::infinity();
  QuantizedChannel whole({{-inf, inf}, {1.0}, 0.2});
  CHECK(std::exp(whole.log_f0(1.0, 0.3, 0.8)) == doctest::Approx(1.0));
  CHECK(std::exp(whole.log_f0(1.0, -5.0, 0.1)) == doctest::Approx(1.0));

  QuantizedChannel sign(one_bit_spec(0.1));
  CHECK(std::exp(sign.log_f0(1.0, 0.0, 0.5)) == doctest::Approx(0.5));
  CHECK(std::exp(sign.log_f0(-1.0, 0.0, 0.5)) == doctest::Approx(0.5));
  CHECK_THROWS(sign.log_f0(0.3, 0.0, 0.5));
}

TEST_CASE("quantizer moments: monte carlo and quadrature oracles") {
  // K = 4 equal bins on [-2, 2]
  QuantizerSpec spec;
  spec.thresholds = {-2.0, -1.0, 0.0, 1.0, 2.0};
  spec.levels = {-1.5, -0.5, 0.5, 1.5};
  spec.delta = 0.1;
  QuantizedChannel ch(spec);
  const double Zh = 0.3, Zb = 0.7;

  std::mt19937_64 rng(77);
  std::normal_distribution<double> gz(Zh, std::sqrt(Zb)), gn(0.0, std::sqrt(spec.delta));
  const int n = 10000000;
  std::vector<long long> counts(4, 0);
  for (int i = 0; i < n; ++i) {
    const double w = gz(rng) + gn(rng);
    for (int k = 0; k < 4; ++k)
      if (w >= spec.thresholds[k] && w < spec.thresholds[k + 1]) {
        counts[k]++;
        break;
      }
  }
  for (int k = 0; k < 4; ++k) {
    const double p = std::exp(ch.log_f0(spec.levels[k], Zh, Zb));
    const double phat = double(counts[k]) / n;
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(phat - p) < 3.0 * sigma + 1e-9);
  }

  // f1, f2 from the truncated-normal recurrence vs direct z-quadrature
  for (int k = 0; k < 4; ++k) {
    const double y = spec.levels[k];
    auto like = [&](double z) {
      // P(z + xi in bin k)
      const double sd = std::sqrt(spec.delta);
      return 0.5 * (std::erfc((spec.thresholds[k] - z) / (sd * kSqrt2)) -
                    std::erfc((spec.thresholds[k + 1] - z) / (sd * kSqrt2)));
    };
    const double f0 = oracle::integrate(
        [&](double z) { return like(z) * oracle::gauss(z, Zh, Zb); }, -12.0, 12.0);
    const double f1 = oracle::integrate(
        [&](double z) { return z * like(z) * oracle::gauss(z, Zh, Zb); }, -12.0, 12.0);
    const double f2 = oracle::integrate(
        [&](double z) { return z * z * like(z) * oracle::gauss(z, Zh, Zb); }, -12.0, 12.0);
    CHECK(std::abs(ch.moment(0, y, Zh, Zb) - f0) < 1e-8);
    CHECK(std::abs(ch.moment(1, y, Zh, Zb) - f1) < 1e-8);
    CHECK(std::abs(ch.moment(2, y, Zh, Zb) - f2) < 1e-8);
  }
}

TEST_CASE("channel f0 normalizes over y") {
  QuantizerSpec spec = one_bit_spec(0.05);
  QuantizedChannel sign(spec);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), uv(0.05, 2.0);
  for (int t = 0; t < 40; ++t) {
    const double Zh = u(rng), Zb = uv(rng);
    const double total =
        std::exp(sign.log_f0(-1.0, Zh, Zb)) + std::exp(sign.log_f0(1.0, Zh, Zb));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }

  PhaseRetrievalChannel pr(0.2);
  for (int t = 0; t < 10; ++t) {
    const cplx Zh(u(rng), u(rng));
    const double Zb = uv(rng);
    const double total = oracle::integrate(
        [&](double y) { return pr.moment0(y, Zh, Zb); }, 1e-9,
        std::abs(Zh) + 14.0 * std::sqrt(Zb + 0.2) + 1.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("phase retrieval moments vs polar quadrature") {
  PhaseRetrievalChannel ch(0.01);
  const double y = 1.2, Zb = 0.5, delta = 0.01;
  const cplx Zh(0.7, 0.4);

  // oracle: 2-d polar quadrature of int d^2z z^k Rice(y | z) CN(z; Zh, Zb)
  auto rice = [&](double r) {
    // p(y | |z| = r), scaled bessel form of the Rice density
    const double kap = 2.0 * y * r / delta;
    const double i0 = static_cast<double>(oracle::bessel_i_series(0, kap) *
                                          std::exp((long double)-kap));
    return 2.0 * y / delta * std::exp(-(y - r) * (y - r) / delta) * i0;
  };
  auto cn = [&](cplx z) { return std::exp(-std::norm(z - Zh) / Zb) / (kPi * Zb); };
  auto integrand = [&](int k, double r, double th) {
    const cplx z = std::polar(r, th);
    const cplx zk = (k == 0) ? cplx(1.0) : (k == 1 ? z : cplx(std::norm(z)));
    return r * rice(r) * cn(z) * zk;
  };
  auto polar = [&](int k, bool imag_part) {
    return oracle::integrate(
        [&](double r) {
          return oracle::integrate(
              [&](double th) {
                const cplx v = integrand(k, r, th);
                return imag_part ? v.imag() : v.real();
              },
              -kPi, kPi, 1e-11);
        },
        std::max(0.0, y - 30.0 * std::sqrt(delta)), y + 30.0 * std::sqrt(delta), 1e-11);
  };
  const double f0 = polar(0, false);
  const cplx f1(polar(1, false), polar(1, true));
  const double f2 = polar(2, false);
  CHECK(std::abs(ch.moment0(y, Zh, Zb) - f0) < 1e-7);
  CHECK(std::abs(ch.moment1(y, Zh, Zb) - f1) < 1e-7);
  CHECK(std::abs(ch.moment2(y, Zh, Zb) - f2) < 1e-7);
}

TEST_CASE("phase retrieval structure") {
  PhaseRetrievalChannel ch(0.05);
  CHECK(std::abs(ch.moment1(0.9, cplx(0.0, 0.0), 0.4)) == doctest::Approx(0.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), uy(0.05, 3.0), uv(0.05, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const cplx Zh(u(rng), u(rng));
    const double y = uy(rng), Zb = uv(rng);
    const cplx f1 = ch.moment1(y, Zh, Zb);
    if (std::abs(f1) > 1e-12) CHECK(std::abs(std::arg(f1) - std::arg(Zh)) < 1e-9);
    // posterior spread nonnegative: f2/f0 - |f1/f0|^2 >= 0
    const auto zp = ch.z_posterior(cplx(y, 0.0), Zh, Zb);
    CHECK(zp.var >= 0.0);
  }
}

TEST_CASE("channel sampling support") {
  Rng rng(8);
  AwgnChannel awgn(0.0);
  CHECK(awgn.sample(0.37, rng) == 0.37);

  QuantizedChannel sign(one_bit_spec(0.3));
  for (int t = 0; t < 200; ++t) {
    const double y = sign.sample(0.1 * t - 10.0, rng);
    CHECK((y == -1.0 || y == 1.0));
  }

  PhaseRetrievalChannel pr(0.0);
  const cplx z(0.3, -0.4);
  CHECK(pr.sample(z, rng).real() == doctest::Approx(0.5));
}
