#include <Eigen/Dense>
#include <cmath>

#include "ampkit/kernels.hpp"
#include "ampkit/metrics.hpp"
#include "ampkit/solver.hpp"

namespace ampkit {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// least-squares for one factor given the design matrix Phi [L x K]; falls
// back to a ridge-regularized solve when the normal matrix is near singular
Eigen::VectorXd ls_solve(const Eigen::Map<const RowMat>& Phi,
                         const Eigen::Map<const Eigen::VectorXd>& y, long* regularized) {
  Eigen::MatrixXd G = Phi.transpose() * Phi;
  Eigen::VectorXd rhs = Phi.transpose() * y;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  bool bad = ldlt.info() != Eigen::Success;
  if (!bad) {
    const auto& d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(d.minCoeff() > 1e-12 * dmax)) bad = true;
  }
  if (bad) {
    (*regularized)++;
    G.diagonal().array() += 1e-10;
    ldlt.compute(G);
  }
  return ldlt.solve(rhs);
}

}  // namespace

SolverResult power_factorization_run(const McsInstance& inst,
                                     const SolverOptions& opts) {
  const int L = inst.meta.l, M = inst.meta.m, P = inst.meta.p, R = inst.meta.r;
  const size_t MR = static_cast<size_t>(M) * R, PR = static_cast<size_t>(P) * R;
  SolverResult res;

  std::vector<double> uh(MR, 0.0), vh(PR);
  Rng rng(derive_seed(inst.meta.seed, 0x9f5, opts.init_seed));
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& x : vh) x = g(rng);

  std::vector<double> zeros_u(MR, 0.0), zeros_v(PR, 0.0);
  std::vector<double> au(static_cast<size_t>(L) * MR), av(static_cast<size_t>(L) * PR);
  std::vector<double> zlin(L);
  Eigen::Map<const Eigen::VectorXd> yv(inst.y.data(), L);
  const DenseTensorOperator op(inst.A.data(), L, M, P);

  auto objective = [&]() {
    op.sweep(R, uh.data(), zeros_u.data(), vh.data(), zeros_v.data(), nullptr, nullptr,
             nullptr, nullptr, nullptr, nullptr, zlin.data(), nullptr);
    double s = 0.0;
    for (int l = 0; l < L; ++l) s += (inst.y[l] - zlin[l]) * (inst.y[l] - zlin[l]);
    return s;
  };

  double prev_obj = objective();
  long regularized = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    // fix vh, solve for uh: design matrix is Au(vh)
    op.sweep(R, uh.data(), zeros_u.data(), vh.data(), zeros_v.data(), au.data(),
             nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr);
    Eigen::Map<const RowMat> Phi_u(au.data(), L, static_cast<int>(MR));
    Eigen::VectorXd unew = ls_solve(Phi_u, yv, &regularized);
    for (size_t j = 0; j < MR; ++j) uh[j] = unew[static_cast<int>(j)];

    // fix uh, solve for vh
    op.sweep(R, uh.data(), zeros_u.data(), vh.data(), zeros_v.data(), nullptr, nullptr,
             nullptr, av.data(), nullptr, nullptr, nullptr, nullptr);
    Eigen::Map<const RowMat> Phi_v(av.data(), L, static_cast<int>(PR));
    Eigen::VectorXd vnew = ls_solve(Phi_v, yv, &regularized);
    for (size_t j = 0; j < PR; ++j) vh[j] = vnew[static_cast<int>(j)];

    const double obj = objective();
    res.iterations = it + 1;
    if (opts.record_trace) {
      TracePoint tp;
      tp.mse = obj / L;
      tp.nmse = (!inst.u_truth.empty() && !inst.v_truth.empty())
                    ? mcs_nmse(uh, inst.u_truth, vh, inst.v_truth)
                    : 0.0;
      res.trace.push_back(tp);
    }
    if (it > 0 && std::abs(prev_obj - obj) < opts.tol * std::max(1.0, prev_obj)) {
      res.converged = true;
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
  }
  res.clamp_events = regularized;
  res.uhat = std::move(uh);
  res.vhat = std::move(vh);
  if (!inst.u_truth.empty() && !inst.v_truth.empty())
    res.final_nmse = mcs_nmse(res.uhat, inst.u_truth, res.vhat, inst.v_truth);
  res.final_mse = prev_obj / L;
  return res;
}

}  // namespace ampkit
