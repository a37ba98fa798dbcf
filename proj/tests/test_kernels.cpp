#include <random>

#include "ampkit/kernels.hpp"
#include "doctest.h"

using namespace ampkit;

// The OpenMP kernels parallelize over output indices with serial per-output
// reductions; results must be bit-identical to the serial reference for any
// worker count.
TEST_CASE("glm kernels match the serial reference bitwise") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int M = 57, N = 83;
  std::vector<double> F(M * N), Ft(N * M), xh(N), xb(N), gh(M), gb(M);
  for (auto& v : F) v = g(rng);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < N; ++i) Ft[i * M + m] = F[m * N + i];
  for (auto& v : xh) v = g(rng);
  for (auto& v : xb) v = std::abs(g(rng));
  for (auto& v : gh) v = g(rng);
  for (auto& v : gb) v = g(rng);

  std::vector<double> z1(M), zb1(M), z2(M), zb2(M);
  kernels::glm_forward(F.data(), M, N, xh.data(), xb.data(), z1.data(), zb1.data());
  kernels::serial::glm_forward(F.data(), M, N, xh.data(), xb.data(), z2.data(), zb2.data());
  CHECK(z1 == z2);
  CHECK(zb1 == zb2);

  std::vector<double> r1(N), r2(N), s1(N), s2(N);
  kernels::glm_backward(Ft.data(), M, N, gh.data(), gb.data(), r1.data(), s1.data());
  kernels::serial::glm_backward(Ft.data(), M, N, gh.data(), gb.data(), r2.data(), s2.data());
  CHECK(r1 == r2);
  CHECK(s1 == s2);
}

TEST_CASE("pbigamp sweep matches the serial reference bitwise") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const int L = 23, M = 11, P = 13, R = 2;
  std::vector<double> A(static_cast<size_t>(L) * M * P);
  for (auto& v : A) v = g(rng);
  std::vector<double> uh(M * R), ub(M * R), vh(P * R), vb(P * R);
  for (auto& v : uh) v = g(rng);
  for (auto& v : ub) v = std::abs(g(rng));
  for (auto& v : vh) v = g(rng);
  for (auto& v : vb) v = std::abs(g(rng));

  auto run = [&](bool serial) {
    std::vector<std::vector<double>> out;
    std::vector<double> au(L * M * R), a2v(L * M * R), g2v(L * M * R);
    std::vector<double> av(L * P * R), a2u(L * P * R), g2u(L * P * R);
    std::vector<double> zl(L), zb(L);
    if (serial)
      kernels::serial::pbigamp_sweep(A.data(), L, M, P, R, uh.data(), ub.data(),
                                     vh.data(), vb.data(), au.data(), a2v.data(),
                                     g2v.data(), av.data(), a2u.data(), g2u.data(),
                                     zl.data(), zb.data());
    else
      kernels::pbigamp_sweep(A.data(), L, M, P, R, uh.data(), ub.data(), vh.data(),
                             vb.data(), au.data(), a2v.data(), g2v.data(), av.data(),
                             a2u.data(), g2u.data(), zl.data(), zb.data());
    out = {au, a2v, g2v, av, a2u, g2u, zl, zb};
    return out;
  };
  CHECK(run(false) == run(true));
}

TEST_CASE("pbigamp sweep products against direct sums") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  const int L = 4, M = 3, P = 5, R = 1;
  std::vector<double> A(L * M * P);
  for (auto& v : A) v = g(rng);
  std::vector<double> uh(M), ub(M), vh(P), vb(P);
  for (auto& v : uh) v = g(rng);
  for (auto& v : ub) v = std::abs(g(rng));
  for (auto& v : vh) v = g(rng);
  for (auto& v : vb) v = std::abs(g(rng));
  std::vector<double> au(L * M), a2v(L * M), av(L * P), a2u(L * P), zl(L), zb(L);
  kernels::pbigamp_sweep(A.data(), L, M, P, R, uh.data(), ub.data(), vh.data(),
                         vb.data(), au.data(), a2v.data(), nullptr, av.data(),
                         a2u.data(), nullptr, zl.data(), zb.data());
  for (int l = 0; l < L; ++l) {
    double z = 0.0, zv = 0.0;
    for (int m = 0; m < M; ++m) {
      double s1 = 0, s2 = 0;
      for (int p = 0; p < P; ++p) {
        const double a = A[(static_cast<size_t>(l) * M + m) * P + p];
        s1 += a * vh[p];
        s2 += a * a * vb[p];
        z += a * uh[m] * vh[p];
        zv += a * a * (ub[m] * vb[p] + ub[m] * vh[p] * vh[p] + uh[m] * uh[m] * vb[p]);
      }
      CHECK(au[l * M + m] == doctest::Approx(s1).epsilon(1e-14));
      CHECK(a2v[l * M + m] == doctest::Approx(s2).epsilon(1e-14));
    }
    for (int p = 0; p < P; ++p) {
      double s1 = 0, s2 = 0;
      for (int m = 0; m < M; ++m) {
        const double a = A[(static_cast<size_t>(l) * M + m) * P + p];
        s1 += a * uh[m];
        s2 += a * a * ub[m];
      }
      CHECK(av[l * P + p] == doctest::Approx(s1).epsilon(1e-14));
      CHECK(a2u[l * P + p] == doctest::Approx(s2).epsilon(1e-14));
    }
    CHECK(zl[l] == doctest::Approx(z).epsilon(1e-13));
    CHECK(zb[l] == doctest::Approx(zv).epsilon(1e-13));
  }
}

TEST_CASE("row reductions match the serial reference bitwise") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  const int L = 41, J = 29;
  std::vector<double> W(L * J), v(L), o1(J), o2(J);
  for (auto& x : W) x = g(rng);
  for (auto& x : v) x = g(rng);
  for (bool sq : {false, true}) {
    kernels::reduce_rows(W.data(), L, J, v.data(), o1.data(), sq);
    kernels::serial::reduce_rows(W.data(), L, J, v.data(), o2.data(), sq);
    CHECK(o1 == o2);
  }
}
