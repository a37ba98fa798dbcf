#include <cmath>
#include <numeric>

#include "ampkit/metrics.hpp"
#include "ampkit/solver.hpp"
#include "doctest.h"

using namespace ampkit;

namespace {
GlmInstance identity_instance(int n, double delta, std::uint64_t seed) {
  GlmInstance inst;
  inst.meta = {n, n, 1.0, delta, seed};
  inst.F.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inst.F[static_cast<size_t>(i) * n + i] = 1.0;
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  inst.x_truth.resize(n);
  for (auto& x : inst.x_truth) x = g(rng);
  inst.z = inst.x_truth;
  inst.y = inst.z;
  return inst;
}
}  // namespace

TEST_CASE("damping primitives") {
  CHECK(damp_single(3.0, 1.0, 1.0) == 3.0);
  CHECK(damp_single(3.0, 1.0, 0.5) == doctest::Approx(2.0));
  // equal old/new variances: variance unchanged and beta' = beta
  const auto pd = damp_pair(2.0, 0.7, -1.0, 0.7, 0.6);
  CHECK(pd.var == doctest::Approx(0.7));
  CHECK(pd.mean == doctest::Approx(0.6 * 2.0 + 0.4 * (-1.0)));
  const auto id = damp_pair(2.0, 0.7, -1.0, 0.3, 1.0);
  CHECK(id.var == doctest::Approx(0.7));
  CHECK(id.mean == doctest::Approx(2.0));
}

TEST_CASE("ist: fixed point and one-step identity") {
  GaussBernoulliPrior prior({0.1, 0.0, 1.0});
  AwgnChannel awgn(0.0);
  GlmInstance inst = generate_glm(prior, awgn, 400, 0.6, 11);
  int K = 0;
  for (double x : inst.x_truth) K += (x != 0.0);
  SolverOptions opts;
  opts.max_iters = 3;
  IstThreshold hard{IstThreshold::Kind::hard, K, 0.0};
  SolverResult r = ist_run(inst, hard, 1.0 / 0.6, opts, &inst.x_truth);
  CHECK(r.converged);
  CHECK(r.final_mse < 1e-25);

  // soft with lambda = 0, F = I, mu = 1 recovers y in one step
  GlmInstance id = identity_instance(50, 0.0, 3);
  SolverOptions one;
  one.max_iters = 1;
  IstThreshold soft{IstThreshold::Kind::soft, 0, 0.0};
  SolverResult rs = ist_run(id, soft, 1.0, one);
  for (int i = 0; i < 50; ++i) CHECK(rs.xhat[i] == doctest::Approx(id.y[i]));
}

TEST_CASE("iht recovers in the easy regime") {
  GaussBernoulliPrior prior({0.1, 0.0, 1.0});
  AwgnChannel awgn(0.0);
  int successes = 0;
  for (int s = 0; s < 10; ++s) {
    GlmInstance inst = generate_glm(prior, awgn, 2000, 0.6, 100 + s);
    int K = 0;
    for (double x : inst.x_truth) K += (x != 0.0);
    SolverOptions opts;
    opts.max_iters = 600;
    opts.tol = 1e-14;
    IstThreshold hard{IstThreshold::Kind::hard, K, 0.0};
    SolverResult r = ist_run(inst, hard, 1.0 / 0.6, opts);
    if (r.final_mse < 1e-8) successes++;
  }
  CHECK(successes >= 9);
}

TEST_CASE("gamp: invertible noiseless system returns the measurements") {
  GlmInstance inst = identity_instance(128, 0.0, 5);
  GaussBernoulliPrior prior({1.0, 0.0, 1.0});
  AwgnChannel awgn(1e-12);
  SolverOptions opts;
  opts.tol = 1e-14;
  SolverResult r = gamp_run(inst, prior, awgn, opts);
  CHECK(r.converged);
  for (int i = 0; i < 128; ++i) CHECK(std::abs(r.xhat[i] - inst.y[i]) < 1e-6);
}

TEST_CASE("gamp: exact recovery in the easy phase and determinism") {
  GaussBernoulliPrior prior({0.4, 0.0, 1.0});
  AwgnChannel awgn(0.0);
  for (std::uint64_t seed : {21u, 22u}) {
    GlmInstance inst = generate_glm(prior, awgn, 2000, 0.7, seed);
    SolverOptions opts;
    opts.tol = 1e-13;
    SolverResult r = gamp_run(inst, prior, awgn, opts);
    CHECK(r.final_mse < 1e-8);
    CHECK(r.clamp_events == 0);  // awgn keeps all variances positive
    SolverResult r2 = gamp_run(inst, prior, awgn, opts);
    CHECK(r.xhat == r2.xhat);  // bit-identical rerun
  }
}

TEST_CASE("gamp permutation equivariance") {
  GaussBernoulliPrior prior({0.4, 0.0, 1.0});
  AwgnChannel awgn(1e-8);
  GlmInstance inst = generate_glm(prior, awgn, 80, 1.2, 31);
  const int N = inst.meta.n, M = inst.meta.m;
  SolverOptions opts;
  opts.max_iters = 15;
  opts.tol = 0.0;
  SolverResult r = gamp_run(inst, prior, awgn, opts);
  // reverse the signal index order
  GlmInstance perm = inst;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < N; ++i)
      perm.F[static_cast<size_t>(m) * N + i] = inst.F[static_cast<size_t>(m) * N + (N - 1 - i)];
  for (int i = 0; i < N; ++i) perm.x_truth[i] = inst.x_truth[N - 1 - i];
  SolverResult rp = gamp_run(perm, prior, awgn, opts);
  for (int i = 0; i < N; ++i) CHECK(rp.xhat[i] == doctest::Approx(r.xhat[N - 1 - i]).epsilon(1e-8));
}

TEST_CASE("cgamp: overdetermined complex awgn recovery") {
  ComplexGaussBernoulliPrior prior(1.0);
  ComplexAwgnChannel awgn(1e-10);
  CGlmInstance inst = generate_glm(prior, awgn, 400, 2.0, 41);
  SolverOptions opts;
  opts.tol = 1e-13;
  SolverResult r = cgamp_run(inst, prior, awgn, opts);
  CHECK(r.final_mse < 1e-6);
}

TEST_CASE("pr-gamp smoke: dense signal recovers at high rate with damping") {
  ComplexGaussBernoulliPrior prior(1.0);
  PhaseRetrievalChannel pr(1e-12);
  int successes = 0;
  for (std::uint64_t seed : {51u, 52u, 53u}) {
    CGlmInstance inst = generate_glm(prior, pr, 256, 3.0, seed);
    SolverOptions opts;
    opts.max_iters = 600;
    opts.tol = 1e-13;
    opts.damping = 0.9;
    opts.damp_policy = DampPolicy::mean_var_pair;
    opts.init = InitPolicy::random;
    opts.init_seed = seed * 7 + 1;
    SolverResult r = cgamp_run(inst, prior, pr, opts);
    if (r.final_nmse >= 0 && r.final_nmse < 1e-6) successes++;
  }
  CHECK(successes >= 2);
}

TEST_CASE("calamp with a point-mass gain is trajectory-exact gamp") {
  GaussBernoulliPrior prior({0.3, 0.0, 1.0});
  KnownGainCalibration cal(1.3, 1e-6);
  CalInstance cinst = generate_calibration(prior, cal, 200, 0.8, 1, 61);
  SolverOptions opts;
  opts.max_iters = 50;
  opts.tol = 1e-13;
  SolverResult rc = calamp_run(cinst, prior, cal, opts);

  GlmInstance ginst;
  ginst.F = cinst.F;
  ginst.y = cinst.y;
  ginst.x_truth = cinst.x_truth;
  ginst.meta = cinst.meta;
  SolverResult rg = gamp_run(ginst, prior, *cal.marginal_channel(), opts);
  CHECK(rc.iterations == rg.iterations);
  CHECK(rc.xhat == rg.xhat);  // bit-identical, not merely close
}

TEST_CASE("calamp real gain recovers signal and gains") {
  GaussBernoulliPrior prior({0.2, 0.0, 1.0});
  RealGainCalibration cal(0.1, 1e-12);
  int ok = 0;
  for (std::uint64_t seed : {71u, 72u}) {
    CalInstance inst = generate_calibration(prior, cal, 300, 0.9, 5, seed);
    SolverOptions opts;
    opts.max_iters = 2000;
    opts.tol = 1e-13;
    opts.damping = 0.8;
    opts.damp_policy = DampPolicy::mean_var_pair;
    SolverResult r = calamp_run(inst, prior, cal, opts);
    const double nd = nmse(r.dhat, inst.d_truth);
    if (r.final_nmse < 1e-6 && nd < 1e-6) ok++;
  }
  CHECK(ok == 2);
}

TEST_CASE("faulty sensors: several signals resolve what one cannot") {
  const double rho = 0.2, alpha = 0.5;
  GaussBernoulliPrior prior({rho, 0.0, 1.0});
  FaultySensorCalibration cal(0.2, 0.0, rho);
  int ok4 = 0, ok1 = 0;
  for (std::uint64_t seed : {81u, 82u, 83u}) {
    SolverOptions opts;
    opts.max_iters = 2000;
    opts.tol = 1e-13;
    opts.damping = 0.8;
    opts.damp_policy = DampPolicy::mean_var_pair;
    CalInstance i4 = generate_calibration(prior, cal, 400, alpha, 4, seed);
    if (calamp_run(i4, prior, cal, opts).final_nmse < 1e-6) ok4++;
    CalInstance i1 = generate_calibration(prior, cal, 400, alpha, 1, seed);
    if (calamp_run(i1, prior, cal, opts).final_nmse < 1e-6) ok1++;
  }
  CHECK(ok4 >= 2);
  CHECK(ok1 <= 1);
}

TEST_CASE("pbigamp with the u factor pinned solves the remaining glm") {
  GaussBernoulliPrior pu({1.0, 0.0, 1.0});
  GaussBernoulliPrior pv({0.6, 0.0, 1.0});
  AwgnChannel awgn(1e-12);
  const int M = 40, P = 40, L = static_cast<int>(1.2 * (M + P));
  McsInstance inst = generate_mcs(pu, pv, awgn, 1, M, P, L, 91);
  SolverOptions opts;
  opts.max_iters = 400;
  opts.tol = 1e-13;
  opts.damping = 0.3;
  DenseTensorOperator op(inst.A.data(), L, M, P);
  SolverResult r = pbigamp_run(op, inst.y, 1, pu, pv, awgn, opts, &inst.u_truth,
                               &inst.v_truth, 91, /*pin_u=*/true);
  CHECK(nmse(r.vhat, inst.v_truth) < 1e-6);
}

TEST_CASE("pbigamp easy-phase smoke and determinism") {
  GaussBernoulliPrior prior({0.6, 0.0, 1.0});
  AwgnChannel awgn(3.6e-11);
  const int M = 50, P = 50;
  const double alpha = 1.3;  // global rate: L = alpha * 2 M
  const int L = static_cast<int>(alpha * (M + P));
  int ok = 0;
  SolverResult first, second;
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    McsInstance inst = generate_mcs(prior, prior, awgn, 1, M, P, L, seed);
    SolverOptions opts;
    opts.max_iters = 1000;
    opts.tol = 1e-14;
    opts.damping = 0.3;
    SolverResult r = pbigamp_run(inst, prior, prior, awgn, opts);
    if (r.final_nmse < 1e-6) ok++;
    if (seed == 101u) {
      first = r;
      second = pbigamp_run(inst, prior, prior, awgn, opts);
    }
  }
  CHECK(ok >= 2);
  CHECK(first.uhat == second.uhat);
}

TEST_CASE("power factorization: bijective operator drives the objective to zero") {
  GaussBernoulliPrior dense({1.0, 0.0, 1.0});
  AwgnChannel awgn(0.0);
  McsInstance inst = generate_mcs(dense, dense, awgn, 1, 10, 10, 100, 111);
  SolverOptions opts;
  opts.max_iters = 200;
  opts.tol = 1e-16;
  opts.record_trace = true;
  SolverResult r = power_factorization_run(inst, opts);
  CHECK(r.final_mse < 1e-18);
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].mse <= r.trace[i - 1].mse * (1 + 1e-12) + 1e-18);
}

TEST_CASE("power factorization vs pbigamp head-to-head") {
  GaussBernoulliPrior dense({1.0, 0.0, 1.0});
  AwgnChannel awgn(1e-12);
  const int M = 50, P = 50;
  const int L = static_cast<int>(0.8 * (M + P));
  int ok_pf = 0, ok_bi = 0;
  for (int s = 0; s < 40; ++s) {
    McsInstance inst = generate_mcs(dense, dense, awgn, 1, M, P, L, 2000 + s);
    SolverOptions opts;
    opts.max_iters = 400;
    opts.tol = 1e-14;
    if (power_factorization_run(inst, opts).final_nmse < 1e-6) ok_pf++;
    SolverOptions bopts = opts;
    bopts.damping = 0.3;
    if (pbigamp_run(inst, dense, dense, awgn, bopts).final_nmse < 1e-6) ok_bi++;
  }
  CHECK(std::abs(ok_pf - ok_bi) <= 0.15 * 40);
}
