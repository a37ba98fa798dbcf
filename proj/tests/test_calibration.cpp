#include <cmath>
#include <random>

#include "ampkit/calibration.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ampkit;

namespace {
// random row context with positive window variances
struct RowData {
  std::vector<double> y, Zh, Zb;
  RowContext ctx() { return {y.data(), Zh.data(), Zb.data(), static_cast<int>(y.size())}; }
};
RowData random_row(int P, std::mt19937_64& rng, bool pm_one_y = false) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), uv(0.05, 1.0);
  RowData r;
  for (int l = 0; l < P; ++l) {
    r.y.push_back(pm_one_y ? (u(rng) > 0 ? 1.0 : -1.0) : u(rng));
    r.Zh.push_back(u(rng));
    r.Zb.push_back(uv(rng));
  }
  return r;
}
}  // namespace

TEST_CASE("known gain reduces to the plain awgn channel") {
  const double d0 = 1.0, delta = 0.3;
  KnownGainCalibration cal(d0, delta);
  AwgnChannel awgn(delta);
  std::mt19937_64 rng(3);
  auto row = random_row(1, rng);
  // f_k^C with P = 1 and a unit point mass equals the AWGN moments
  for (int k = 0; k <= 2; ++k)
    CHECK(cal.fkc_generic(row.ctx(), 0, k) ==
          doctest::Approx(awgn.moment(k, row.y[0], row.Zh[0], row.Zb[0])).epsilon(1e-12));
}

TEST_CASE("delta-d gain updates equal awgn on the rescaled measurement") {
  const double d0 = 1.37, delta = 0.2;
  KnownGainCalibration cal(d0, delta);
  AwgnChannel awgn(delta);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto row = random_row(3, rng);
    std::vector<double> gh(3), gb(3);
    cal.row_g(row.ctx(), gh.data(), gb.data(), nullptr);
    for (int l = 0; l < 3; ++l) {
      const GPair g = awgn.g(d0 * row.y[l], row.Zh[l], row.Zb[l]);
      CHECK(gh[l] == g.ghat);  // identical arithmetic, not just close
      CHECK(gb[l] == g.gbar);
    }
  }
}

TEST_CASE("real gain closed form matches the generic fkc route") {
  RealGainCalibration cal(0.3, 1e-3);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 25; ++t) {
    const int P = 1 + t % 5;
    auto row = random_row(P, rng);
    std::vector<double> zh(P), zb(P), zh_gen(P), zb_gen(P);
    cal.row_update(row.ctx(), zh.data(), zb.data(), nullptr);
    cal.row_update_generic(row.ctx(), zh_gen.data(), zb_gen.data());
    for (int l = 0; l < P; ++l) {
      CHECK(zh[l] == doctest::Approx(zh_gen[l]).epsilon(1e-9));
      CHECK(zb[l] == doctest::Approx(zb_gen[l]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("gain d-posterior against direct quadrature and the no-information row") {
  RealGainCalibration cal(0.4, 1e-2);
  std::mt19937_64 rng(11);
  const int P = 4;
  auto row = random_row(P, rng);
  std::vector<double> zh(P), zb(P);
  DPosterior dp;
  cal.row_update(row.ctx(), zh.data(), zb.data(), &dp);
  // oracle: d-posterior ~ uniform(d) d^P Normal(d; Dh, Db)
  const double delta = 1e-2;
  double prec = 0.0, lin = 0.0;
  for (int l = 0; l < P; ++l) {
    prec += row.y[l] * row.y[l] / (delta + row.Zb[l]);
    lin += row.Zh[l] * row.y[l] / (delta + row.Zb[l]);
  }
  const double Db = 1.0 / prec, Dh = Db * lin;
  const double w = cal.solver_width();
  auto dens = [&](double d) { return std::pow(d, P) * oracle::gauss(d, Dh, Db); };
  const double m0 = oracle::integrate(dens, 1 - w / 2, 1 + w / 2);
  const double m1 = oracle::integrate([&](double d) { return d * dens(d); }, 1 - w / 2, 1 + w / 2);
  const double m2 = oracle::integrate([&](double d) { return d * d * dens(d); }, 1 - w / 2, 1 + w / 2);
  CHECK(dp.dhat == doctest::Approx(m1 / m0).epsilon(1e-9));
  CHECK(dp.dbar == doctest::Approx(m2 / m0 - (m1 / m0) * (m1 / m0)).epsilon(1e-7));

  // all-zero measurements carry no gain information
  std::fill(row.y.begin(), row.y.end(), 0.0);
  cal.row_update(row.ctx(), zh.data(), zb.data(), &dp);
  CHECK(dp.dhat == doctest::Approx(1.0));
  for (int l = 0; l < P; ++l) CHECK(zb[l] >= 0.0);
}

TEST_CASE("faulty sensors: degenerate mixtures and the direct two-atom oracle") {
  std::mt19937_64 rng(13);
  auto row = random_row(4, rng);
  {
    FaultySensorCalibration none(0.0, 0.0, 0.2);
    std::vector<double> zh(4), zb(4);
    none.row_update(row.ctx(), zh.data(), zb.data(), nullptr);
    for (int l = 0; l < 4; ++l) {
      CHECK(zh[l] == doctest::Approx(row.y[l]));
      CHECK(zb[l] == doctest::Approx(0.0));
    }
  }
  {
    FaultySensorCalibration all(1.0, 0.0, 0.2);
    std::vector<double> zh(4), zb(4);
    all.row_update(row.ctx(), zh.data(), zb.data(), nullptr);
    for (int l = 0; l < 4; ++l) {
      CHECK(zh[l] == doctest::Approx(row.Zh[l]));
      CHECK(zb[l] == doctest::Approx(row.Zb[l]));
    }
  }
  {
    const double fs = 0.2, mf = 0.1, sf = 0.3;
    FaultySensorCalibration cal(fs, mf, sf);
    std::vector<double> zh(4), zb(4);
    DPosterior dp;
    cal.row_update(row.ctx(), zh.data(), zb.data(), &dp);
    // direct mixture posterior
    double pf = fs, pz = 1 - fs;
    for (int m = 0; m < 4; ++m) {
      pf *= oracle::gauss(row.y[m], mf, sf);
      pz *= oracle::gauss(row.y[m], row.Zh[m], row.Zb[m]);
    }
    const double norm = pf + pz;
    for (int l = 0; l < 4; ++l) {
      const double want = (pf * row.Zh[l] + pz * row.y[l]) / norm;
      const double want2 =
          (pf * (row.Zh[l] * row.Zh[l] + row.Zb[l]) + pz * row.y[l] * row.y[l]) / norm;
      CHECK(zh[l] == doctest::Approx(want).epsilon(1e-12));
      CHECK(zb[l] == doctest::Approx(want2 - want * want).epsilon(1e-10).scale(1.0));
    }
    CHECK(dp.dhat == doctest::Approx(pz / norm).epsilon(1e-12));
    // generic fkc agrees with the closed mixture (finite two-atom sum)
    for (int l = 0; l < 4; ++l) {
      const double f0 = cal.fkc_generic(row.ctx(), l, 0);
      const double f1 = cal.fkc_generic(row.ctx(), l, 1);
      CHECK(f1 / f0 == doctest::Approx(zh[l]).epsilon(1e-10));
    }
  }
}

TEST_CASE("1-bit threshold calibration") {
  const double delta = 0.15;
  {
    // single atom at d = 0 and P = 1 reduces to the plain sign channel
    Threshold1BitCalibration cal({{0.0, 1.0}}, delta);
    QuantizedChannel sign(one_bit_spec(delta));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
      auto row = random_row(1, rng, true);
      std::vector<double> zh(1), zb(1);
      cal.row_update(row.ctx(), zh.data(), zb.data(), nullptr);
      const ZPosterior zp = sign.z_posterior(row.y[0], row.Zh[0], row.Zb[0]);
      CHECK(zh[0] == doctest::Approx(zp.mean).epsilon(1e-12));
      CHECK(zb[0] == doctest::Approx(zp.var).epsilon(1e-10));
    }
  }
  {
    // symmetric atoms, mirrored rows: the threshold posterior mirrors too
    Threshold1BitCalibration cal({{-0.6, 0.5}, {0.6, 0.5}}, delta);
    std::mt19937_64 rng(19);
    auto row = random_row(3, rng, true);
    RowData mirror = row;
    for (int l = 0; l < 3; ++l) {
      mirror.y[l] = -row.y[l];
      mirror.Zh[l] = -row.Zh[l];
    }
    std::vector<double> zh(3), zb(3);
    DPosterior dp, dm;
    cal.row_update(row.ctx(), zh.data(), zb.data(), &dp);
    cal.row_update(mirror.ctx(), zh.data(), zb.data(), &dm);
    CHECK(dp.dhat == doctest::Approx(-dm.dhat).epsilon(1e-12));
    CHECK(dp.dbar == doctest::Approx(dm.dbar).epsilon(1e-10));
  }
  {
    // n_d = 5, P = 3: closed erfc forms against per-atom z-quadrature
    std::vector<std::pair<double, double>> atoms;
    for (int i = 0; i < 5; ++i) atoms.emplace_back(-1.0 + 0.5 * i, 0.2);
    Threshold1BitCalibration cal(atoms, delta);
    std::mt19937_64 rng(23);
    auto row = random_row(3, rng, true);
    std::vector<double> zh(3), zb(3);
    cal.row_update(row.ctx(), zh.data(), zb.data(), nullptr);
    // oracle: f_kC by direct sums of z-quadrature moments
    for (int l = 0; l < 3; ++l) {
      double F0 = 0, F1 = 0, F2 = 0;
      for (auto [d, w] : atoms) {
        auto like = [&](double z, int ll) {
          const double t = row.y[ll] * (z - d) / std::sqrt(2 * delta);
          return 0.5 * std::erfc(-t);
        };
        double prod = w;
        for (int ll = 0; ll < 3; ++ll) {
          if (ll == l) continue;
          prod *= oracle::integrate(
              [&](double z) { return like(z, ll) * oracle::gauss(z, row.Zh[ll], row.Zb[ll]); },
              -10.0, 10.0);
        }
        for (int k = 0; k <= 2; ++k) {
          const double mk = oracle::integrate(
              [&](double z) {
                return std::pow(z, k) * like(z, l) * oracle::gauss(z, row.Zh[l], row.Zb[l]);
              },
              -10.0, 10.0);
          (k == 0 ? F0 : (k == 1 ? F1 : F2)) += prod * mk;
        }
      }
      CHECK(zh[l] == doctest::Approx(F1 / F0).epsilon(1e-8));
      CHECK(zb[l] == doctest::Approx(F2 / F0 - (F1 / F0) * (F1 / F0)).epsilon(1e-8).scale(1e-3));
    }
  }
}

TEST_CASE("fkc with P = 1 equals the d-marginalized channel") {
  const double delta = 0.1;
  Threshold1BitCalibration cal({{-0.4, 0.3}, {0.2, 0.7}}, delta);
  std::mt19937_64 rng(29);
  for (int t = 0; t < 30; ++t) {
    auto row = random_row(1, rng, true);
    for (int k = 0; k <= 2; ++k) {
      // marginal channel: p(y|z) = sum_i w_i p(y|z, d_i)
      double want = 0.0;
      for (auto [d, w] : std::vector<std::pair<double, double>>{{-0.4, 0.3}, {0.2, 0.7}}) {
        want += w * oracle::integrate(
                        [&](double z) {
                          const double arg = row.y[0] * (z - d) / std::sqrt(2 * delta);
                          return std::pow(z, k) * 0.5 * std::erfc(-arg) *
                                 oracle::gauss(z, row.Zh[0], row.Zb[0]);
                        },
                        -10.0, 10.0);
      }
      CHECK(cal.fkc_generic(row.ctx(), 0, k) == doctest::Approx(want).epsilon(1e-9).scale(1e-3));
    }
  }
}

TEST_CASE("complex gain updates carry the estimated phase") {
  ComplexGainCalibration cal(10.0, 1e-3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0), uv(0.05, 0.5);
  const int P = 5;
  std::vector<cplx> y(P), Zh(P);
  std::vector<double> Zb(P);
  for (int l = 0; l < P; ++l) {
    y[l] = cplx(u(rng), u(rng));
    Zh[l] = cplx(u(rng), u(rng));
    Zb[l] = uv(rng);
  }
  CRowContext row{y.data(), Zh.data(), Zb.data(), P};
  std::vector<cplx> zh(P);
  std::vector<double> zb(P);
  CDPosterior dp;
  cal.row_update(row, zh.data(), zb.data(), &dp);
  // dhat has the phase of Dh = Db sum Zh y* / (delta + Zb) and dbar = Db
  double prec = 0.0;
  cplx lin(0.0, 0.0);
  for (int l = 0; l < P; ++l) {
    prec += std::norm(y[l]) / (1e-3 + Zb[l]);
    lin += Zh[l] * std::conj(y[l]) / (1e-3 + Zb[l]);
  }
  const cplx Dh = lin / prec;
  CHECK(std::arg(dp.dhat) == doctest::Approx(std::arg(Dh)).epsilon(1e-10));
  CHECK(dp.dbar == doctest::Approx(1.0 / prec).epsilon(1e-12));
  const double r = std::abs(Dh), Db = 1.0 / prec;
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(std::abs(dp.dhat) ==
        doctest::Approx(j_integral(P + 1, r, Db, 0.0, inf) /
                        j_integral(P, r, Db, 0.0, inf))
            .epsilon(1e-10));
  for (int l = 0; l < P; ++l) CHECK(zb[l] >= 0.0);
}

TEST_CASE("calibration forward models") {
  Rng rng(37);
  {
    KnownGainCalibration cal(1.0, 0.0);
    std::vector<double> z{0.3, -1.2, 0.5}, y(3);
    double d;
    cal.sample_row(z.data(), 3, rng, &d, y.data());
    CHECK(d == 1.0);
    for (int l = 0; l < 3; ++l) CHECK(y[l] == z[l]);
  }
  {
    FaultySensorCalibration cal(1.0, 0.4, 0.25);
    std::vector<double> z(2000, 5.0), y(2000);
    double d;
    cal.sample_row(z.data(), 2000, rng, &d, y.data());
    CHECK(d == 0.0);
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (double v : y) var += (v - mean) * (v - mean);
    var /= y.size();
    CHECK(mean == doctest::Approx(0.4).epsilon(0.1));
    CHECK(var == doctest::Approx(0.25).epsilon(0.1));
  }
  {
    Threshold1BitCalibration cal({{-0.5, 0.5}, {0.5, 0.5}}, 0.1);
    std::vector<double> z{0.3, -1.2, 0.5, 2.0}, y(4);
    double d;
    cal.sample_row(z.data(), 4, rng, &d, y.data());
    for (double v : y) CHECK((v == 1.0 || v == -1.0));
  }
}
