#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ampkit/numerics.hpp"
#include "ampkit/rng.hpp"

namespace ampkit {

struct PosteriorUpdate {
  double mean = 0.0;
  double var = 0.0;
};

struct CPosteriorUpdate {
  cplx mean{0.0, 0.0};
  double var = 0.0;
};

// Gaussian windows with variance below this are clamped before moment
// evaluation; the closed forms divide by the window variance.
inline constexpr double kMinWindowVar = 1e-14;

// Real scalar signal distribution. moment(k, Xh, Xb) is
//   f_k(Xh, Xb) = int x^k p(x) Normal(x; Xh, Xb) dx,
// posterior() returns (f1/f0, f2/f0 - (f1/f0)^2).
class Prior {
 public:
  virtual ~Prior() = default;
  virtual double moment(int k, double Xh, double Xb) const = 0;
  virtual PosteriorUpdate posterior(double Xh, double Xb) const = 0;
  virtual double mean() const = 0;
  virtual double variance() const = 0;  // Q0 used by state evolution
  virtual double sample(Rng& rng) const = 0;
  // false for the soft-threshold pseudo-prior, which has posterior updates
  // but no normalizable density behind them
  virtual bool is_proper() const { return true; }
  // locations of mixture components / atoms; quadrature code splits integration
  // intervals around these when the Gaussian window is narrow
  virtual std::vector<double> support_points() const { return {0.0}; }
  virtual double max_component_sd() const { return std::sqrt(variance()); }
};

struct GaussBernoulliParams {
  double rho = 0.5;
  double comp_mean = 0.0;
  double comp_var = 1.0;
};

class GaussBernoulliPrior final : public Prior {
 public:
  explicit GaussBernoulliPrior(GaussBernoulliParams p);
  double moment(int k, double Xh, double Xb) const override;
  PosteriorUpdate posterior(double Xh, double Xb) const override;
  double mean() const override { return p_.rho * p_.comp_mean; }
  double variance() const override;
  double sample(Rng& rng) const override;
  std::vector<double> support_points() const override { return {0.0, p_.comp_mean}; }
  double max_component_sd() const override { return std::sqrt(p_.comp_var); }
  const GaussBernoulliParams& params() const { return p_; }

 private:
  GaussBernoulliParams p_;
};

struct DiscreteAtomsParams {
  std::vector<std::pair<double, double>> atoms;  // (value, weight)
};

class DiscreteAtomsPrior final : public Prior {
 public:
  explicit DiscreteAtomsPrior(DiscreteAtomsParams p);
  double moment(int k, double Xh, double Xb) const override;
  PosteriorUpdate posterior(double Xh, double Xb) const override;
  double mean() const override { return mean_; }
  double variance() const override { return var_; }
  double sample(Rng& rng) const override;
  std::vector<double> support_points() const override;
  double max_component_sd() const override { return 0.0; }

 private:
  DiscreteAtomsParams p_;
  double mean_ = 0.0, var_ = 0.0;
};

// LASSO-AMP updates packaged with the Prior interface: posterior() applies the
// soft-thresholding rule, variance() reports the second moment of the signal
// the mismatched run is expected to see (needed by metrics, not by the
// algorithm itself). moment() is undefined for this pseudo-prior.
class SoftThresholdPrior final : public Prior {
 public:
  explicit SoftThresholdPrior(double reference_q0 = 1.0) : q0_(reference_q0) {}
  double moment(int k, double Xh, double Xb) const override;
  PosteriorUpdate posterior(double Xh, double Xb) const override;
  double mean() const override { return 0.0; }
  double variance() const override { return q0_; }
  double sample(Rng& rng) const override;
  bool is_proper() const override { return false; }

 private:
  double q0_;
};

// soft thresholding S_lambda and its complex counterpart
double soft_threshold(double x, double lambda);
PosteriorUpdate soft_threshold_update(double Xh, double Xb);
CPosteriorUpdate soft_threshold_update(cplx Xh, double Xb);

// ---------------------------------------------------------------------------
// complex priors (circular-Gaussian convention: CN(x; m, v) has total
// variance v, split evenly over real and imaginary parts)
// ---------------------------------------------------------------------------

class ComplexPrior {
 public:
  virtual ~ComplexPrior() = default;
  virtual double moment0(cplx Xh, double Xb) const = 0;
  virtual cplx moment1(cplx Xh, double Xb) const = 0;
  virtual double moment2(cplx Xh, double Xb) const = 0;
  virtual CPosteriorUpdate posterior(cplx Xh, double Xb) const = 0;
  virtual double variance() const = 0;  // Q0, total complex variance
  virtual cplx sample(Rng& rng) const = 0;
  // one step of the complex-CS state evolution map,
  //   E' = E_{x ~ p, t ~ CN(0,1)}[ fbar(x + t sqrt(Sigma), Sigma) ];
  // circular-symmetric priors reduce it to radial integrals
  virtual double se_mse(double Sigma) const = 0;
};

class ComplexGaussBernoulliPrior final : public ComplexPrior {
 public:
  explicit ComplexGaussBernoulliPrior(double rho) : rho_(rho) {}
  double moment0(cplx Xh, double Xb) const override;
  cplx moment1(cplx Xh, double Xb) const override;
  double moment2(cplx Xh, double Xb) const override;
  CPosteriorUpdate posterior(cplx Xh, double Xb) const override;
  double variance() const override { return rho_; }
  cplx sample(Rng& rng) const override;
  double se_mse(double Sigma) const override;
  double rho() const { return rho_; }

 private:
  double rho_;
};

class ComplexSoftThresholdPrior final : public ComplexPrior {
 public:
  explicit ComplexSoftThresholdPrior(double reference_q0 = 1.0) : q0_(reference_q0) {}
  double moment0(cplx, double) const override;
  cplx moment1(cplx, double) const override;
  double moment2(cplx, double) const override;
  CPosteriorUpdate posterior(cplx Xh, double Xb) const override;
  double variance() const override { return q0_; }
  cplx sample(Rng& rng) const override;
  double se_mse(double Sigma) const override;

 private:
  double q0_;
};

std::vector<double> prior_sample(const Prior& prior, int n, std::uint64_t seed);
std::vector<cplx> prior_sample(const ComplexPrior& prior, int n, std::uint64_t seed);

}  // namespace ampkit
