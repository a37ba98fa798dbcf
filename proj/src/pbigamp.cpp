#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/kernels.hpp"
#include "ampkit/metrics.hpp"
#include "ampkit/solver.hpp"

namespace ampkit {

void DenseTensorOperator::sweep(int R, const double* uh, const double* ub,
                                const double* vh, const double* vb, double* au,
                                double* a2v, double* g2v, double* av, double* a2u,
                                double* g2u, double* zlin, double* zb) const {
  kernels::pbigamp_sweep(A_, L_, M_, P_, R, uh, ub, vh, vb, au, a2v, g2v, av, a2u,
                         g2u, zlin, zb);
}

namespace {

struct FactorSide {
  std::vector<double> h, b;        // current posterior mean / variance
  std::vector<double> h_prev;      // value at t-1 (for the Onsager terms)
  std::vector<double> Hh, Hb;      // cavity mean / variance
  std::vector<double> Hh_prev;
};

void factor_update(const Prior& prior, FactorSide& f, const double* lin,
                   const double* quad, const double* onsager3, bool damp,
                   double beta, SolverResult& res, const SolverOptions& opts) {
  const size_t n = f.h.size();
  for (size_t j = 0; j < n; ++j) {
    double denom = quad[j];
    double v = (denom < 0.0) ? -1.0 / denom : -1.0;
    if (v <= 0.0 || !std::isfinite(v)) {
      v = opts.variance_floor;
      res.clamp_events++;
    }
    f.Hb[j] = v;
    f.Hh[j] = v * (lin[j] + onsager3[j]);
  }
  if (damp && !f.Hh_prev.empty())
    for (size_t j = 0; j < n; ++j)
      f.Hh[j] = beta * f.Hh[j] + (1.0 - beta) * f.Hh_prev[j];
  f.Hh_prev = f.Hh;
  f.h_prev = f.h;
  for (size_t j = 0; j < n; ++j) {
    const PosteriorUpdate u = prior.posterior(f.Hh[j], f.Hb[j]);
    f.h[j] = u.mean;
    f.b[j] = u.var;
  }
}

SolverResult pbigamp_single(const McsOperator& op, const std::vector<double>& y, int R,
                            const Prior& prior_u, const Prior& prior_v,
                            const Channel& channel, const SolverOptions& opts,
                            const std::vector<double>* u_truth,
                            const std::vector<double>* v_truth, std::uint64_t seed,
                            bool pin_u) {
  const int L = op.l(), M = op.m(), P = op.p();
  const size_t MR = static_cast<size_t>(M) * R, PR = static_cast<size_t>(P) * R;
  SolverResult res;

  FactorSide u, v;
  u.h.resize(MR);
  u.b.assign(MR, prior_u.variance());
  u.Hh.assign(MR, 0.0);
  u.Hb.assign(MR, 0.0);
  v.h.resize(PR);
  v.b.assign(PR, prior_v.variance());
  v.Hh.assign(PR, 0.0);
  v.Hb.assign(PR, 0.0);
  {
    Rng rng(derive_seed(seed, 0xb197));
    for (auto& x : u.h) x = prior_u.sample(rng);
    for (auto& x : v.h) x = prior_v.sample(rng);
  }
  if (pin_u) {
    if (!u_truth) throw std::invalid_argument("pbigamp: pin_u needs the true u");
    u.h = *u_truth;
    std::fill(u.b.begin(), u.b.end(), 0.0);
  }
  u.h_prev = u.h;
  v.h_prev = v.h;

  std::vector<double> au(static_cast<size_t>(L) * MR), a2v(au.size()),
      au_prev(au.size(), 0.0), a2v_prev(au.size(), 0.0);
  std::vector<double> av(static_cast<size_t>(L) * PR), a2u(av.size()),
      av_prev(av.size(), 0.0), a2u_prev(av.size(), 0.0);
  std::vector<double> zlin(L), zb(L), Zh(L), Zb(L);
  std::vector<double> gh(L, 0.0), gb(L, 0.0), gh_prev(L, 0.0);
  std::vector<double> lin(std::max(MR, PR)), quad(lin.size()), ons3(lin.size());
  std::vector<double> scratch(lin.size());
  std::vector<double> gg(L);

  const bool damp = opts.damping < 1.0;

  for (int it = 0; it < opts.max_iters; ++it) {
    op.sweep(R, u.h.data(), u.b.data(), v.h.data(), v.b.data(), au.data(), a2v.data(),
             nullptr, av.data(), a2u.data(), nullptr, zlin.data(), zb.data());

    // Onsager correction of the plain estimate A(uh vh^T)
    for (int l = 0; l < L; ++l) {
      double corr = 0.0;
      if (it > 0) {
        const double* aul = au.data() + static_cast<size_t>(l) * MR;
        const double* aupl = au_prev.data() + static_cast<size_t>(l) * MR;
        for (size_t j = 0; j < MR; ++j) corr += aul[j] * aupl[j] * u.b[j];
        const double* avl = av.data() + static_cast<size_t>(l) * PR;
        const double* avpl = av_prev.data() + static_cast<size_t>(l) * PR;
        for (size_t j = 0; j < PR; ++j) corr += avl[j] * avpl[j] * v.b[j];
      }
      Zh[l] = zlin[l] - gh[l] * corr;
      Zb[l] = std::max(zb[l], opts.variance_floor);
    }
    gh_prev = gh;
    for (int l = 0; l < L; ++l) {
      const GPair g = channel.g(y[l], Zh[l], Zb[l]);
      gh[l] = g.ghat;
      gb[l] = g.gbar;
    }
    for (int l = 0; l < L; ++l) gg[l] = gh[l] * gh[l];
    std::vector<double> ghgh(L);
    for (int l = 0; l < L; ++l) ghgh[l] = gh[l] * gh_prev[l];

    // ---- U side ----
    kernels::reduce_rows(au.data(), L, static_cast<int>(MR), gh.data(), lin.data(), false);
    kernels::reduce_rows(au.data(), L, static_cast<int>(MR), gb.data(), quad.data(), true);
    // -uh .* (Au(vh)^2)^T gb enters the linear part
    for (size_t j = 0; j < MR; ++j) lin[j] -= u.h[j] * quad[j];
    if (!opts.bayes_optimal) {
      kernels::reduce_rows(a2v.data(), L, static_cast<int>(MR), gb.data(), scratch.data(), false);
      for (size_t j = 0; j < MR; ++j) quad[j] += scratch[j];
      kernels::reduce_rows(a2v.data(), L, static_cast<int>(MR), gg.data(), scratch.data(), false);
      for (size_t j = 0; j < MR; ++j) quad[j] += scratch[j];
    }
    if (it > 0) {
      kernels::reduce_rows(a2v_prev.data(), L, static_cast<int>(MR), ghgh.data(), ons3.data(), false);
      for (size_t j = 0; j < MR; ++j) ons3[j] = -u.h_prev[j] * ons3[j];
    } else {
      std::fill(ons3.begin(), ons3.begin() + MR, 0.0);
    }
    if (pin_u) {
      u.h_prev = u.h;
    } else {
      factor_update(prior_u, u, lin.data(), quad.data(), ons3.data(), damp,
                    opts.damping, res, opts);
    }

    // ---- V side (uses the pre-update u via av/a2u from the sweep) ----
    kernels::reduce_rows(av.data(), L, static_cast<int>(PR), gh.data(), lin.data(), false);
    kernels::reduce_rows(av.data(), L, static_cast<int>(PR), gb.data(), quad.data(), true);
    for (size_t j = 0; j < PR; ++j) lin[j] -= v.h[j] * quad[j];
    if (!opts.bayes_optimal) {
      kernels::reduce_rows(a2u.data(), L, static_cast<int>(PR), gb.data(), scratch.data(), false);
      for (size_t j = 0; j < PR; ++j) quad[j] += scratch[j];
      kernels::reduce_rows(a2u.data(), L, static_cast<int>(PR), gg.data(), scratch.data(), false);
      for (size_t j = 0; j < PR; ++j) quad[j] += scratch[j];
    }
    if (it > 0) {
      kernels::reduce_rows(a2u_prev.data(), L, static_cast<int>(PR), ghgh.data(), ons3.data(), false);
      for (size_t j = 0; j < PR; ++j) ons3[j] = -v.h_prev[j] * ons3[j];
    } else {
      std::fill(ons3.begin(), ons3.begin() + PR, 0.0);
    }
    factor_update(prior_v, v, lin.data(), quad.data(), ons3.data(), false, 1.0, res,
                  opts);

    std::swap(au_prev, au);
    std::swap(av_prev, av);
    std::swap(a2v_prev, a2v);
    std::swap(a2u_prev, a2u);

    double diff = 0.0, varn = 0.0, norm = 0.0;
    for (size_t j = 0; j < MR; ++j) {
      diff += (u.h[j] - u.h_prev[j]) * (u.h[j] - u.h_prev[j]);
      varn += u.b[j] * u.b[j];
      norm += u.h[j] * u.h[j];
    }
    for (size_t j = 0; j < PR; ++j) {
      diff += (v.h[j] - v.h_prev[j]) * (v.h[j] - v.h_prev[j]);
      varn += v.b[j] * v.b[j];
      norm += v.h[j] * v.h[j];
    }
    diff /= (MR + PR);
    varn = std::sqrt(varn);
    res.iterations = it + 1;
    if (opts.record_trace && u_truth && v_truth)
      res.trace.push_back({0.0, mcs_nmse(u.h, *u_truth, v.h, *v_truth), varn});
    if (norm > 1e24 || !std::isfinite(norm)) {
      res.diverged = true;
      break;
    }
    if (it > 0 && (diff < opts.tol || varn < opts.tol)) {
      res.converged = true;
      break;
    }
  }

  res.uhat = std::move(u.h);
  res.ubar = std::move(u.b);
  res.vhat = std::move(v.h);
  res.vbar = std::move(v.b);
  if (u_truth && v_truth)
    res.final_nmse = mcs_nmse(res.uhat, *u_truth, res.vhat, *v_truth);
  return res;
}

}  // namespace

SolverResult pbigamp_run(const McsOperator& op, const std::vector<double>& y, int R,
                         const Prior& prior_u, const Prior& prior_v,
                         const Channel& channel, const SolverOptions& opts,
                         const std::vector<double>* u_truth,
                         const std::vector<double>* v_truth, std::uint64_t seed,
                         bool pin_u) {
  SolverResult best;
  for (int attempt = 0; attempt <= std::max(0, opts.restarts); ++attempt) {
    SolverResult r = pbigamp_single(op, y, R, prior_u, prior_v, channel, opts, u_truth,
                                    v_truth, derive_seed(seed, 0x7e57a, attempt), pin_u);
    const bool better = attempt == 0 ||
                        (r.final_nmse >= 0 && (best.final_nmse < 0 ||
                                               r.final_nmse < best.final_nmse));
    if (better) best = std::move(r);
    if (best.final_nmse >= 0 && best.final_nmse < 1e-6) break;
  }
  return best;
}

SolverResult pbigamp_run(const McsInstance& inst, const Prior& prior_u,
                         const Prior& prior_v, const Channel& channel,
                         const SolverOptions& opts) {
  DenseTensorOperator op(inst.A.data(), inst.meta.l, inst.meta.m, inst.meta.p);
  return pbigamp_run(op, inst.y, inst.meta.r, prior_u, prior_v, channel, opts,
                     inst.u_truth.empty() ? nullptr : &inst.u_truth,
                     inst.v_truth.empty() ? nullptr : &inst.v_truth, inst.meta.seed);
}

}  // namespace ampkit
