#pragma once

#include <functional>
#include <vector>

#include "ampkit/channel.hpp"
#include "ampkit/prior.hpp"

namespace ampkit {

// ---------------------------------------------------------------------------
// Bayes-optimal GLM state evolution: iterate
//   mhat <- alpha * K(m),   m <- int ds f1(s, 1/mhat)^2 / f0(s, 1/mhat)
// where K is the channel kernel. MSE comes in two flavours: the
// posterior-mean estimator has mse_mean = Q0 - m, a posterior sample has
// mse_sample = 2 (Q0 - m).
// ---------------------------------------------------------------------------

struct SeGlmState {
  double m = 0.0;
  double mhat = 0.0;
  double mse_mean = 0.0;
  double mse_sample = 0.0;
};

struct SeGlmTrajectory {
  std::vector<SeGlmState> steps;
  bool converged = false;
  double q0 = 0.0;
};

// the prior-side overlap integral m(mhat)
double se_overlap(const Prior& prior, double mhat);

SeGlmTrajectory se_glm_bo(const Prior& prior, const Channel& channel, double alpha,
                          double m0, double tol = 1e-12, int max_iters = 2000);

// uninformed initial overlap used throughout (the expected overlap of a
// random start is O(1/N))
inline double se_uninformed_m0(const Prior& prior) { return prior.variance() * 1e-6; }

// complex CS: scalar recursion on the complex MSE E
struct SeComplexTrajectory {
  std::vector<double> E;
  bool converged = false;
};
SeComplexTrajectory se_complex_cs(const ComplexPrior& prior, double alpha, double delta,
                                  double E0, double tol = 1e-12, int max_iters = 2000);

// ---------------------------------------------------------------------------
// matrix compressed sensing
// ---------------------------------------------------------------------------

struct SeMcsState {
  double m_u = 0.0, m_v = 0.0, mhat_z = 0.0;
  double nmse_u = 0.0, nmse_v = 0.0, nmse_x = 0.0;
};

struct SeMcsTrajectory {
  std::vector<SeMcsState> steps;
  bool converged = false;
};

// three-equation Bayes-optimal loop; pin_u holds m_u = Q0_u (GLM reduction)
SeMcsTrajectory se_mcs_bo(const Prior& prior_u, const Prior& prior_v,
                          const Channel& channel, double alpha_u, double alpha_v,
                          double mu0, double mv0, bool pin_u = false,
                          double tol = 1e-12, int max_iters = 2000);

// symmetric case-study map (rho_U = rho_V = rho, M = P, AWGN): one scalar
// equation with mhat_u = 2 alpha m / (delta + rho^2 - m^2); alpha is the
// global measurement rate L / (2 M R)
std::function<double(double)> se_mcs_symmetric_map(double rho, double alpha,
                                                   double delta);
struct SeScalarTrajectory {
  std::vector<double> m;
  bool converged = false;
};
SeScalarTrajectory se_mcs_symmetric(double rho, double alpha, double delta, double m0,
                                    double tol = 1e-12, int max_iters = 4000);

// nMSE <-> overlap for the symmetric case (nmse_x convention of the factors)
inline double mcs_nmse_of_m(double m, double rho) { return 1.0 - m / rho; }

// ---------------------------------------------------------------------------
// free entropies (stationary points coincide with SE fixed points)
// ---------------------------------------------------------------------------

double free_entropy_cs(const Prior& prior, double alpha, double delta, double m);
double free_entropy_mcs_symmetric(double rho, double alpha, double delta, double m);

// ---------------------------------------------------------------------------
// fixed points
// ---------------------------------------------------------------------------

enum class Stability { stable, unstable, marginal };

struct FixedPoint {
  double location = 0.0;
  double slope = 0.0;
  Stability stability = Stability::stable;
};

// brackets sign changes of map(m) - m on an n-point grid and bisects them to
// 1e-10; an endpoint that is itself a fixed point (the m = 0 boundary of the
// symmetric MCS map) is included. n must be >= 100.
std::vector<FixedPoint> fixed_point_scan(const std::function<double(double)>& map,
                                         double m_min, double m_max, int n);

// bisection on alpha for the appearance/disappearance of a property;
// reports the final bracket (width <= tol)
struct AlphaBracket {
  double lo = 0.0;
  double hi = 0.0;
};
AlphaBracket locate_alpha_transition(const std::function<bool(double)>& success,
                                     double alpha_lo, double alpha_hi,
                                     double tol = 1e-3);

// ---------------------------------------------------------------------------
// blind matrix calibration (9-variable loop, Nishimori stability study)
// ---------------------------------------------------------------------------

struct SeFullState {
  double m_u = 0, q_u = 0, Q_u = 0;
  double m_v = 0, q_v = 0, Q_v = 0;
  double nmse_v = 0;  // 1 - m_v / sqrt(Q0_v Q_v)
};

struct SeBlindCalTrajectory {
  std::vector<SeFullState> steps;
  bool unphysical = false;  // a variance went negative
  int unphysical_iter = -1;
  bool converged = false;
};

struct BlindCalParams {
  double eta = 0.0;     // noise on the partial knowledge of u
  double rho_v = 0.2;   // Gauss-Bernoulli sparsity of v
  double alpha_u = 0.5;
  double alpha_v = 4.0;
  double delta = 1e-8;
  bool impose_nishimori = false;
  double mv0 = -1.0;          // < 0: uninformed rho_v * 1e-6
  double q_perturbation = 1e-12;
  int max_iters = 200;
  double tol = 1e-13;
};

SeBlindCalTrajectory se_blind_matrix_cal(const BlindCalParams& params);

}  // namespace ampkit
