#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ampkit/calibration.hpp"
#include "ampkit/channel.hpp"
#include "ampkit/instance.hpp"
#include "ampkit/prior.hpp"

namespace ampkit {

enum class DampPolicy { none, single_xhat, mean_var_pair };
enum class ClampPolicy { floor, abort };
enum class InitPolicy { prior_mean, random };

struct SolverOptions {
  int max_iters = 1000;
  double tol = 1e-8;          // on ||xhat_t - xhat_{t-1}||^2 / N and on ||xbar||
  double damping = 1.0;       // beta; 1 = no damping
  DampPolicy damp_policy = DampPolicy::none;
  double variance_floor = 1e-12;
  ClampPolicy clamp_policy = ClampPolicy::floor;
  InitPolicy init = InitPolicy::prior_mean;
  std::uint64_t init_seed = 1;
  bool record_trace = false;
  bool bayes_optimal = true;  // PBiGAMP: drop ub/vb from the variance denominators
  int restarts = 0;           // extra random restarts keeping the best final nmse
};

struct TracePoint {
  double mse = 0.0;
  double nmse = 0.0;
  double var_norm = 0.0;
};

struct SolverResult {
  std::vector<double> xhat, xbar;
  std::vector<cplx> xhat_c;
  std::vector<double> dhat;  // calibration estimates (per sensor)
  std::vector<cplx> dhat_c;
  std::vector<double> uhat, ubar, vhat, vbar;  // bilinear factors
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  long clamp_events = 0;  // negative-variance floors applied
  std::vector<TracePoint> trace;
  double final_mse = -1.0;
  double final_nmse = -1.0;
};

// ---------------------------------------------------------------------------
// damping primitives (beta = 1 is the identity)
// ---------------------------------------------------------------------------

inline double damp_single(double fresh, double prev, double beta) {
  return beta * fresh + (1.0 - beta) * prev;
}

// harmonic damping of the variance followed by damping of the mean with the
// rescaled coefficient beta' = beta * var / var0
struct PairDamped {
  double mean;
  double var;
};
inline PairDamped damp_pair(double mean0, double var0, double mean_prev,
                            double var_prev, double beta) {
  PairDamped out;
  out.var = 1.0 / (beta / var0 + (1.0 - beta) / var_prev);
  const double beta_p = beta * out.var / var0;
  out.mean = beta_p * mean0 + (1.0 - beta_p) * mean_prev;
  return out;
}
inline PairDamped damp_pair(cplx mean0, double var0, cplx mean_prev, double var_prev,
                            double beta, cplx* mean_out) {
  PairDamped out;
  out.var = 1.0 / (beta / var0 + (1.0 - beta) / var_prev);
  const double beta_p = beta * out.var / var0;
  *mean_out = beta_p * mean0 + (1.0 - beta_p) * mean_prev;
  out.mean = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// solvers
// ---------------------------------------------------------------------------

struct IstThreshold {
  enum class Kind { hard, soft } kind = Kind::soft;
  int k = 0;            // hard: keep the K largest magnitudes
  double lambda = 0.0;  // soft threshold
};

SolverResult ist_run(const GlmInstance& inst, const IstThreshold& threshold,
                     double step_mu, const SolverOptions& opts,
                     const std::vector<double>* x0 = nullptr);

SolverResult gamp_run(const GlmInstance& inst, const Prior& prior,
                      const Channel& channel, const SolverOptions& opts);

SolverResult cgamp_run(const CGlmInstance& inst, const ComplexPrior& prior,
                       const ComplexChannel& channel, const SolverOptions& opts);

SolverResult calamp_run(const CalInstance& inst, const Prior& prior,
                        const CalibrationChannel& channel, const SolverOptions& opts);

// complex gain calibration (y and x are [M x P] / [N x P] complex)
struct CCalInstance {
  std::vector<cplx> F;
  std::vector<cplx> y;
  std::vector<cplx> x_truth;
  std::vector<cplx> d_truth;
  int p = 1;
  GlmMeta meta;
};
CCalInstance generate_calibration(const ComplexPrior& prior,
                                  const ComplexGainCalibration& channel, int n,
                                  double alpha, int p, std::uint64_t seed);
SolverResult calamp_run(const CCalInstance& inst, const ComplexPrior& prior,
                        const ComplexGainCalibration& channel,
                        const SolverOptions& opts);

// measurement operator interface for PBiGAMP; DenseTensorOperator wraps the
// instance tensor, larger experiments can supply their own sweep
class McsOperator {
 public:
  virtual ~McsOperator() = default;
  virtual int l() const = 0;
  virtual int m() const = 0;
  virtual int p() const = 0;
  // contract: see kernels::pbigamp_sweep
  virtual void sweep(int R, const double* uh, const double* ub, const double* vh,
                     const double* vb, double* au, double* a2v, double* g2v, double* av,
                     double* a2u, double* g2u, double* zlin, double* zb) const = 0;
};

class DenseTensorOperator final : public McsOperator {
 public:
  DenseTensorOperator(const double* A, int L, int M, int P)
      : A_(A), L_(L), M_(M), P_(P) {}
  int l() const override { return L_; }
  int m() const override { return M_; }
  int p() const override { return P_; }
  void sweep(int R, const double* uh, const double* ub, const double* vh,
             const double* vb, double* au, double* a2v, double* g2v, double* av,
             double* a2u, double* g2u, double* zlin, double* zb) const override;

 private:
  const double* A_;
  int L_, M_, P_;
};

SolverResult pbigamp_run(const McsInstance& inst, const Prior& prior_u,
                         const Prior& prior_v, const Channel& channel,
                         const SolverOptions& opts);
SolverResult pbigamp_run(const McsOperator& op, const std::vector<double>& y, int R,
                         const Prior& prior_u, const Prior& prior_v,
                         const Channel& channel, const SolverOptions& opts,
                         const std::vector<double>* u_truth,
                         const std::vector<double>* v_truth, std::uint64_t seed,
                         bool pin_u = false);

// alternating least squares baseline (AWGN semantics)
SolverResult power_factorization_run(const McsInstance& inst, const SolverOptions& opts);

}  // namespace ampkit
