#include "ampkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/kernels.hpp"
#include "ampkit/metrics.hpp"

namespace ampkit {

namespace {

template <typename T>
double abs2(T x) {
  if constexpr (std::is_same_v<T, cplx>)
    return std::norm(x);
  else
    return x * x;
}

template <typename T>
std::vector<T> transpose(const std::vector<T>& F, int M, int N) {
  std::vector<T> Ft(F.size());
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < N; ++i) Ft[static_cast<size_t>(i) * M + m] = F[static_cast<size_t>(m) * N + i];
  return Ft;
}

// The shared GLM AMP loop (Cal-AMP is the same loop with a row-coupled
// z-step; c-GAMP is the same loop over complex scalars). PriorStep fills
// (xhat, xbar) from (Xh, Xb); ZStep fills (gh, gb) from (y, Zh, Zb).
template <typename T, typename PriorStep, typename ZStep, typename TraceHook>
SolverResult amp_core(const std::vector<T>& F, int M, int N, int P,
                      PriorStep prior_step, ZStep z_step, const SolverOptions& opts,
                      std::vector<T>& xh, std::vector<double>& xb,
                      TraceHook trace_hook) {
  SolverResult res;
  const std::vector<T> Ft = transpose(F, M, N);
  const size_t nn = static_cast<size_t>(N) * P;
  const size_t mm = static_cast<size_t>(M) * P;
  std::vector<T> gh(mm, T{}), Zh(mm, T{}), Zh_prev(mm, T{}), Xh(nn, T{}), Xh_prev(nn, T{});
  std::vector<double> Zb(mm, 0.0), Zb_prev(mm, 0.0), Xb(nn, 0.0), Xb_prev(nn, 0.0);
  std::vector<T> zlin(mm, T{}), r1(nn, T{});
  std::vector<double> zbr(mm, 0.0), r2(nn, 0.0);
  std::vector<T> xh_prev(nn, T{});

  const double beta = opts.damping;
  const bool pair = opts.damp_policy == DampPolicy::mean_var_pair && beta < 1.0;
  const bool single = opts.damp_policy == DampPolicy::single_xhat && beta < 1.0;

  for (int it = 0; it < opts.max_iters; ++it) {
    kernels::glm_forward_multi(F.data(), M, N, P, xh.data(), xb.data(), zlin.data(),
                               zbr.data());
    for (size_t j = 0; j < mm; ++j) zlin[j] -= zbr[j] * gh[j];  // Onsager
    if (pair && it > 0) {
      for (size_t j = 0; j < mm; ++j) {
        const double v0 = std::max(zbr[j], opts.variance_floor);
        T mean;
        PairDamped pd;
        if constexpr (std::is_same_v<T, cplx>) {
          pd = damp_pair(zlin[j], v0, Zh_prev[j], Zb_prev[j], beta, &mean);
        } else {
          pd = damp_pair(zlin[j], v0, Zh_prev[j], Zb_prev[j], beta);
          mean = pd.mean;
        }
        Zh[j] = mean;
        Zb[j] = pd.var;
      }
    } else {
      for (size_t j = 0; j < mm; ++j) {
        Zh[j] = zlin[j];
        Zb[j] = std::max(zbr[j], opts.variance_floor);
      }
    }
    Zh_prev = Zh;
    Zb_prev = Zb;

    z_step(Zh.data(), Zb.data(), gh.data(), zbr.data());  // zbr reused as gb
    kernels::glm_backward_multi(Ft.data(), M, N, P, gh.data(), zbr.data(), r1.data(),
                                r2.data());

    for (size_t j = 0; j < nn; ++j) {
      double v = (r2[j] < 0.0) ? -1.0 / r2[j] : -1.0;
      if (v <= 0.0 || !std::isfinite(v)) {
        if (opts.clamp_policy == ClampPolicy::abort) {
          res.diverged = true;
          res.iterations = it + 1;
          res.clamp_events++;
          return res;
        }
        v = opts.variance_floor;
        res.clamp_events++;
      }
      Xb[j] = v;
      Xh[j] = xh[j] + v * r1[j];
    }
    if (pair && it > 0) {
      for (size_t j = 0; j < nn; ++j) {
        T mean;
        PairDamped pd;
        if constexpr (std::is_same_v<T, cplx>) {
          pd = damp_pair(Xh[j], Xb[j], Xh_prev[j], Xb_prev[j], beta, &mean);
        } else {
          pd = damp_pair(Xh[j], Xb[j], Xh_prev[j], Xb_prev[j], beta);
          mean = pd.mean;
        }
        Xh[j] = mean;
        Xb[j] = pd.var;
      }
    }
    Xh_prev = Xh;
    Xb_prev = Xb;

    xh_prev = xh;
    prior_step(Xh.data(), Xb.data(), xh.data(), xb.data());
    if (single && it > 0)
      for (size_t j = 0; j < nn; ++j) xh[j] = beta * xh[j] + (1.0 - beta) * xh_prev[j];

    double diff = 0.0, varn = 0.0, norm = 0.0;
    for (size_t j = 0; j < nn; ++j) {
      diff += abs2(xh[j] - xh_prev[j]);
      varn += xb[j] * xb[j];
      norm += abs2(xh[j]);
    }
    diff /= nn;
    varn = std::sqrt(varn);
    res.iterations = it + 1;
    trace_hook(res, xh, xb, varn);
    if (norm > 1e24 || !std::isfinite(norm)) {
      res.diverged = true;
      break;
    }
    if (it > 0 && (diff < opts.tol || varn < opts.tol)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// iterative thresholding
// ---------------------------------------------------------------------------

SolverResult ist_run(const GlmInstance& inst, const IstThreshold& threshold,
                     double step_mu, const SolverOptions& opts,
                     const std::vector<double>* x0) {
  const int M = inst.meta.m, N = inst.meta.n;
  if (threshold.kind == IstThreshold::Kind::hard &&
      (threshold.k < 1 || threshold.k > N))
    throw std::invalid_argument("ist_run: hard threshold needs 1 <= K <= N");
  SolverResult res;
  std::vector<double> xh(N, 0.0), Zh(M), g(M), Xh(N), xh_prev(N);
  if (x0 != nullptr) xh = *x0;
  const std::vector<double> Ft = transpose(inst.F, M, N);
  std::vector<int> order(N);
  for (int it = 0; it < opts.max_iters; ++it) {
    for (int m = 0; m < M; ++m) {
      const double* row = inst.F.data() + static_cast<size_t>(m) * N;
      double acc = 0.0;
      for (int i = 0; i < N; ++i) acc += row[i] * xh[i];
      Zh[m] = acc;
      g[m] = inst.y[m] - acc;
    }
    for (int i = 0; i < N; ++i) {
      const double* col = Ft.data() + static_cast<size_t>(i) * M;
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += col[m] * g[m];
      Xh[i] = xh[i] + step_mu * acc;
    }
    xh_prev = xh;
    if (threshold.kind == IstThreshold::Kind::soft) {
      for (int i = 0; i < N; ++i) xh[i] = soft_threshold(Xh[i], threshold.lambda);
    } else {
      // keep exactly the K largest magnitudes
      for (int i = 0; i < N; ++i) order[i] = i;
      std::nth_element(order.begin(), order.begin() + threshold.k, order.end(),
                       [&](int a, int b) { return std::abs(Xh[a]) > std::abs(Xh[b]); });
      std::fill(xh.begin(), xh.end(), 0.0);
      for (int j = 0; j < threshold.k; ++j) xh[order[j]] = Xh[order[j]];
    }
    double diff = 0.0, norm = 0.0;
    for (int i = 0; i < N; ++i) {
      diff += (xh[i] - xh_prev[i]) * (xh[i] - xh_prev[i]);
      norm += xh[i] * xh[i];
    }
    res.iterations = it + 1;
    if (opts.record_trace && !inst.x_truth.empty())
      res.trace.push_back({mse(xh, inst.x_truth), nmse(xh, inst.x_truth), 0.0});
    if (std::sqrt(norm) > 1e12 || !std::isfinite(norm)) {
      res.diverged = true;
      break;
    }
    if (it > 0 && diff / N < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.xhat = std::move(xh);
  if (!inst.x_truth.empty()) {
    res.final_mse = mse(res.xhat, inst.x_truth);
    res.final_nmse = nmse(res.xhat, inst.x_truth);
  }
  return res;
}

// ---------------------------------------------------------------------------
// GAMP
// ---------------------------------------------------------------------------

SolverResult gamp_run(const GlmInstance& inst, const Prior& prior,
                      const Channel& channel, const SolverOptions& opts) {
  const int M = inst.meta.m, N = inst.meta.n;
  std::vector<double> xh(N), xb(N, prior.variance());
  if (opts.init == InitPolicy::random) {
    Rng rng(derive_seed(opts.init_seed, 0x9a39));
    for (auto& x : xh) x = prior.sample(rng);
  } else {
    std::fill(xh.begin(), xh.end(), prior.mean());
  }
  auto prior_step = [&](const double* Xh, const double* Xb, double* oxh, double* oxb) {
    for (int i = 0; i < N; ++i) {
      const PosteriorUpdate u = prior.posterior(Xh[i], Xb[i]);
      oxh[i] = u.mean;
      oxb[i] = u.var;
    }
  };
  auto z_step = [&](const double* Zh, const double* Zb, double* gh, double* gb) {
    for (int m = 0; m < M; ++m) {
      const GPair g = channel.g(inst.y[m], Zh[m], Zb[m]);
      gh[m] = g.ghat;
      gb[m] = g.gbar;
    }
  };
  auto hook = [&](SolverResult& r, const std::vector<double>& x,
                  const std::vector<double>& v, double varn) {
    if (opts.record_trace && !inst.x_truth.empty())
      r.trace.push_back({mse(x, inst.x_truth), nmse(x, inst.x_truth), varn});
  };
  SolverResult res = amp_core<double>(inst.F, M, N, 1, prior_step, z_step, opts, xh, xb, hook);
  res.xhat = std::move(xh);
  res.xbar = std::move(xb);
  if (!inst.x_truth.empty()) {
    res.final_mse = mse(res.xhat, inst.x_truth);
    res.final_nmse = nmse(res.xhat, inst.x_truth);
  }
  return res;
}

SolverResult cgamp_run(const CGlmInstance& inst, const ComplexPrior& prior,
                       const ComplexChannel& channel, const SolverOptions& opts) {
  const int M = inst.meta.m, N = inst.meta.n;
  std::vector<cplx> xh(N, cplx(0.0, 0.0));
  std::vector<double> xb(N, prior.variance());
  if (opts.init == InitPolicy::random) {
    Rng rng(derive_seed(opts.init_seed, 0xc9a39));
    for (auto& x : xh) x = prior.sample(rng);
    // a dense draw breaks the phase symmetry even for sparse priors
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * prior.variance()));
    for (auto& x : xh)
      if (x == cplx(0.0, 0.0)) x = cplx(g(rng), g(rng));
  }
  auto prior_step = [&](const cplx* Xh, const double* Xb, cplx* oxh, double* oxb) {
    for (int i = 0; i < N; ++i) {
      const CPosteriorUpdate u = prior.posterior(Xh[i], Xb[i]);
      oxh[i] = u.mean;
      oxb[i] = u.var;
    }
  };
  auto z_step = [&](const cplx* Zh, const double* Zb, cplx* gh, double* gb) {
    for (int m = 0; m < M; ++m) {
      const CGPair g = channel.g(inst.y[m], Zh[m], Zb[m]);
      gh[m] = g.ghat;
      gb[m] = g.gbar;
    }
  };
  auto hook = [&](SolverResult& r, const std::vector<cplx>& x,
                  const std::vector<double>& v, double varn) {
    if (opts.record_trace && !inst.x_truth.empty())
      r.trace.push_back({mse(x, inst.x_truth), nmse(x, inst.x_truth), varn});
  };
  SolverResult res = amp_core<cplx>(inst.F, M, N, 1, prior_step, z_step, opts, xh, xb, hook);
  res.xhat_c = std::move(xh);
  res.xbar = std::move(xb);
  if (!inst.x_truth.empty()) {
    res.final_mse = mse(res.xhat_c, inst.x_truth);
    res.final_nmse = nmse(res.xhat_c, inst.x_truth);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Cal-AMP
// ---------------------------------------------------------------------------

SolverResult calamp_run(const CalInstance& inst, const Prior& prior,
                        const CalibrationChannel& channel, const SolverOptions& opts) {
  const int M = inst.meta.m, N = inst.meta.n, P = inst.p;
  std::vector<double> xh(static_cast<size_t>(N) * P), xb(xh.size(), prior.variance());
  if (opts.init == InitPolicy::random) {
    Rng rng(derive_seed(opts.init_seed, 0xca139));
    for (auto& x : xh) x = prior.sample(rng);
  } else {
    std::fill(xh.begin(), xh.end(), prior.mean());
  }
  std::vector<double> dh(M, channel.d_prior_mean());
  auto prior_step = [&](const double* Xh, const double* Xb, double* oxh, double* oxb) {
    for (size_t j = 0; j < xh.size(); ++j) {
      const PosteriorUpdate u = prior.posterior(Xh[j], Xb[j]);
      oxh[j] = u.mean;
      oxb[j] = u.var;
    }
  };
  const Channel* marginal = channel.marginal_channel();
  auto z_step = [&](const double* Zh, const double* Zb, double* gh, double* gb) {
    if (marginal != nullptr) {
      // point-mass d: identical arithmetic to per-signal GAMP
      for (size_t j = 0; j < static_cast<size_t>(M) * P; ++j) {
        const GPair g = marginal->g(inst.y[j], Zh[j], Zb[j]);
        gh[j] = g.ghat;
        gb[j] = g.gbar;
      }
      return;
    }
    for (int m = 0; m < M; ++m) {
      const size_t off = static_cast<size_t>(m) * P;
      RowContext row{inst.y.data() + off, Zh + off, Zb + off, P};
      DPosterior dp;
      channel.row_g(row, gh + off, gb + off, &dp);
      dh[m] = dp.dhat;
    }
  };
  auto hook = [&](SolverResult& r, const std::vector<double>& x,
                  const std::vector<double>& v, double varn) {
    if (opts.record_trace && !inst.x_truth.empty())
      r.trace.push_back({mse(x, inst.x_truth), nmse(x, inst.x_truth), varn});
  };
  SolverResult res =
      amp_core<double>(inst.F, M, N, P, prior_step, z_step, opts, xh, xb, hook);
  res.xhat = std::move(xh);
  res.xbar = std::move(xb);
  res.dhat = std::move(dh);
  if (!inst.x_truth.empty()) {
    res.final_mse = mse(res.xhat, inst.x_truth);
    res.final_nmse = nmse(res.xhat, inst.x_truth);
  }
  return res;
}

CCalInstance generate_calibration(const ComplexPrior& prior,
                                  const ComplexGainCalibration& channel, int n,
                                  double alpha, int p, std::uint64_t seed) {
  CCalInstance inst;
  const int m = static_cast<int>(std::lround(alpha * n));
  inst.meta = {n, m, alpha, 0.0, seed};
  inst.p = p;
  Rng rng(derive_seed(seed, 0xcca1));
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 / n));
  inst.F.resize(static_cast<size_t>(m) * n);
  for (auto& f : inst.F) f = cplx(g(rng), g(rng));
  inst.x_truth.resize(static_cast<size_t>(n) * p);
  for (auto& x : inst.x_truth) x = prior.sample(rng);
  std::vector<cplx> z(static_cast<size_t>(m) * p, cplx(0.0, 0.0));
  for (int mu = 0; mu < m; ++mu)
    for (int l = 0; l < p; ++l) {
      cplx acc(0.0, 0.0);
      for (int i = 0; i < n; ++i)
        acc += inst.F[static_cast<size_t>(mu) * n + i] *
               inst.x_truth[static_cast<size_t>(i) * p + l];
      z[static_cast<size_t>(mu) * p + l] = acc;
    }
  inst.y.resize(z.size());
  inst.d_truth.resize(m);
  for (int mu = 0; mu < m; ++mu)
    channel.sample_row(z.data() + static_cast<size_t>(mu) * p, p, rng,
                       &inst.d_truth[mu], inst.y.data() + static_cast<size_t>(mu) * p);
  return inst;
}

SolverResult calamp_run(const CCalInstance& inst, const ComplexPrior& prior,
                        const ComplexGainCalibration& channel,
                        const SolverOptions& opts) {
  const int M = inst.meta.m, N = inst.meta.n, P = inst.p;
  std::vector<cplx> xh(static_cast<size_t>(N) * P, cplx(0.0, 0.0));
  std::vector<double> xb(xh.size(), prior.variance());
  if (opts.init == InitPolicy::random) {
    Rng rng(derive_seed(opts.init_seed, 0xcca139));
    for (auto& x : xh) x = prior.sample(rng);
  }
  std::vector<cplx> dh(M, cplx(0.0, 0.0));
  auto prior_step = [&](const cplx* Xh, const double* Xb, cplx* oxh, double* oxb) {
    for (size_t j = 0; j < xh.size(); ++j) {
      const CPosteriorUpdate u = prior.posterior(Xh[j], Xb[j]);
      oxh[j] = u.mean;
      oxb[j] = u.var;
    }
  };
  auto z_step = [&](const cplx* Zh, const double* Zb, cplx* gh, double* gb) {
    for (int m = 0; m < M; ++m) {
      const size_t off = static_cast<size_t>(m) * P;
      CRowContext row{inst.y.data() + off, Zh + off, Zb + off, P};
      CDPosterior dp;
      channel.row_g(row, gh + off, gb + off, &dp);
      dh[m] = dp.dhat;
    }
  };
  auto hook = [&](SolverResult& r, const std::vector<cplx>& x,
                  const std::vector<double>& v, double varn) {
    if (opts.record_trace && !inst.x_truth.empty())
      r.trace.push_back({mse(x, inst.x_truth), nmse(x, inst.x_truth), varn});
  };
  SolverResult res =
      amp_core<cplx>(inst.F, M, N, P, prior_step, z_step, opts, xh, xb, hook);
  res.xhat_c = std::move(xh);
  res.xbar = std::move(xb);
  res.dhat_c = std::move(dh);
  if (!inst.x_truth.empty()) {
    res.final_mse = mse(res.xhat_c, inst.x_truth);
    res.final_nmse = nmse(res.xhat_c, inst.x_truth);
  }
  return res;
}

}  // namespace ampkit
