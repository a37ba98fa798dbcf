#include "ampkit/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/quadrature.hpp"

namespace ampkit {

// ---------------------------------------------------------------------------
// Gauss-Bernoulli
// ---------------------------------------------------------------------------

GaussBernoulliPrior::GaussBernoulliPrior(GaussBernoulliParams p) : p_(p) {
  if (p_.rho < 0 || p_.rho > 1) throw std::invalid_argument("gauss-bernoulli: rho not in [0,1]");
  if (!(p_.comp_var > 0)) throw std::invalid_argument("gauss-bernoulli: comp_var <= 0");
}

double GaussBernoulliPrior::variance() const {
  const double m = p_.rho * p_.comp_mean;
  return p_.rho * (p_.comp_var + p_.comp_mean * p_.comp_mean) - m * m;
}

// f0 = (1-rho) N(Xh; 0, Xb) + rho N(Xh; mc, Xb + vc)
// f1, f2 carry the Gaussian component's posterior mean/second moment; the
// two mixture weights are combined through logs.
double GaussBernoulliPrior::moment(int k, double Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  const double la = std::log1p(-p_.rho) + log_npdf(Xh, 0.0, Xb);
  const double lb = std::log(p_.rho) + log_npdf(Xh, p_.comp_mean, Xb + p_.comp_var);
  if (k == 0) return std::exp(log_sum_exp(la, lb));
  const double pm = (p_.comp_mean * Xb + Xh * p_.comp_var) / (Xb + p_.comp_var);
  const double pv = Xb * p_.comp_var / (Xb + p_.comp_var);
  if (k == 1) return std::exp(lb) * pm;
  if (k == 2) return std::exp(lb) * (pm * pm + pv);
  throw std::invalid_argument("gb_moments: k must be 0, 1 or 2");
}

PosteriorUpdate GaussBernoulliPrior::posterior(double Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  if (p_.rho == 0.0) return {0.0, 0.0};
  const double la = std::log1p(-p_.rho) + log_npdf(Xh, 0.0, Xb);
  const double lb = std::log(p_.rho) + log_npdf(Xh, p_.comp_mean, Xb + p_.comp_var);
  const double w = (p_.rho == 1.0) ? 1.0 : 1.0 / (1.0 + std::exp(la - lb));
  const double pm = (p_.comp_mean * Xb + Xh * p_.comp_var) / (Xb + p_.comp_var);
  const double pv = Xb * p_.comp_var / (Xb + p_.comp_var);
  PosteriorUpdate u;
  u.mean = w * pm;
  u.var = w * (pm * pm + pv) - u.mean * u.mean;
  return u;
}

double GaussBernoulliPrior::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (uni(rng) >= p_.rho) return 0.0;
  std::normal_distribution<double> g(p_.comp_mean, std::sqrt(p_.comp_var));
  return g(rng);
}

// ---------------------------------------------------------------------------
// discrete atoms
// ---------------------------------------------------------------------------

DiscreteAtomsPrior::DiscreteAtomsPrior(DiscreteAtomsParams p) : p_(std::move(p)) {
  if (p_.atoms.empty()) throw std::invalid_argument("discrete prior: no atoms");
  double wsum = 0.0;
  for (auto& [v, w] : p_.atoms) {
    if (w < 0) throw std::invalid_argument("discrete prior: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("discrete prior: weights must sum to 1");
  for (auto& [v, w] : p_.atoms) {
    mean_ += w * v;
    var_ += w * v * v;
  }
  var_ -= mean_ * mean_;
}

double DiscreteAtomsPrior::moment(int k, double Xh, double Xb) const {
  if (k < 0 || k > 2) throw std::invalid_argument("discrete_moments: k must be 0, 1 or 2");
  Xb = std::max(Xb, kMinWindowVar);
  std::vector<double> lw;
  std::vector<double> sgn;
  lw.reserve(p_.atoms.size());
  for (auto& [v, w] : p_.atoms) {
    if (w == 0.0) continue;
    const double coef = (k == 0) ? 1.0 : (k == 1 ? v : v * v);
    if (coef == 0.0) continue;
    lw.push_back(std::log(w * std::abs(coef)) + log_npdf(v, Xh, Xb));
    sgn.push_back(coef < 0 ? -1.0 : 1.0);
  }
  if (lw.empty()) return 0.0;
  // signed log-sum-exp
  double m = *std::max_element(lw.begin(), lw.end());
  double s = 0.0;
  for (size_t i = 0; i < lw.size(); ++i) s += sgn[i] * std::exp(lw[i] - m);
  return std::exp(m) * s;
}

PosteriorUpdate DiscreteAtomsPrior::posterior(double Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(p_.atoms.size());
  for (size_t i = 0; i < p_.atoms.size(); ++i) {
    lw[i] = (p_.atoms[i].second > 0 ? std::log(p_.atoms[i].second) : -1e300) +
            log_npdf(p_.atoms[i].first, Xh, Xb);
    lmax = std::max(lmax, lw[i]);
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < p_.atoms.size(); ++i) {
    const double w = std::exp(lw[i] - lmax);
    z += w;
    m1 += w * p_.atoms[i].first;
    m2 += w * p_.atoms[i].first * p_.atoms[i].first;
  }
  PosteriorUpdate u;
  u.mean = m1 / z;
  u.var = std::max(0.0, m2 / z - u.mean * u.mean);
  return u;
}

double DiscreteAtomsPrior::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng), acc = 0.0;
  for (auto& [v, w] : p_.atoms) {
    acc += w;
    if (u <= acc) return v;
  }
  return p_.atoms.back().first;
}

std::vector<double> DiscreteAtomsPrior::support_points() const {
  std::vector<double> pts;
  for (auto& [v, w] : p_.atoms) pts.push_back(v);
  return pts;
}

// ---------------------------------------------------------------------------
// soft threshold
// ---------------------------------------------------------------------------

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

PosteriorUpdate soft_threshold_update(double Xh, double Xb) {
  PosteriorUpdate u;
  u.mean = soft_threshold(Xh, Xb);
  u.var = (std::abs(Xh) > Xb) ? Xb : 0.0;
  return u;
}

CPosteriorUpdate soft_threshold_update(cplx Xh, double Xb) {
  CPosteriorUpdate u;
  const double a = std::abs(Xh);
  const double shr = std::max(a - Xb, 0.0);
  u.mean = (a == 0.0) ? cplx(0.0, 0.0) : Xh * (shr / (shr + Xb));
  u.var = (a > Xb) ? Xb : 0.0;
  return u;
}

double SoftThresholdPrior::moment(int, double, double) const {
  throw std::logic_error("soft-threshold pseudo-prior has no moments");
}

PosteriorUpdate SoftThresholdPrior::posterior(double Xh, double Xb) const {
  return soft_threshold_update(Xh, Xb);
}

double SoftThresholdPrior::sample(Rng&) const {
  throw std::logic_error("soft-threshold pseudo-prior cannot be sampled");
}

// ---------------------------------------------------------------------------
// complex Gauss-Bernoulli (joint sparsity)
// ---------------------------------------------------------------------------

double ComplexGaussBernoulliPrior::moment0(cplx Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  const double la = std::log1p(-rho_) + log_cnpdf(Xh, cplx(0.0), Xb);
  const double lb = std::log(rho_) + log_cnpdf(Xh, cplx(0.0), Xb + 1.0);
  if (rho_ == 0.0) return std::exp(la);
  if (rho_ == 1.0) return std::exp(lb);
  return std::exp(log_sum_exp(la, lb));
}

cplx ComplexGaussBernoulliPrior::moment1(cplx Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  if (rho_ == 0.0) return {0.0, 0.0};
  const double lb = std::log(rho_) + log_cnpdf(Xh, cplx(0.0), Xb + 1.0);
  return std::exp(lb) * Xh / (Xb + 1.0);
}

double ComplexGaussBernoulliPrior::moment2(cplx Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  if (rho_ == 0.0) return 0.0;
  const double lb = std::log(rho_) + log_cnpdf(Xh, cplx(0.0), Xb + 1.0);
  const double pm2 = std::norm(Xh) / ((Xb + 1.0) * (Xb + 1.0));
  const double pv = Xb / (Xb + 1.0);
  return std::exp(lb) * (pm2 + pv);
}

CPosteriorUpdate ComplexGaussBernoulliPrior::posterior(cplx Xh, double Xb) const {
  Xb = std::max(Xb, kMinWindowVar);
  CPosteriorUpdate u;
  if (rho_ == 0.0) return u;
  const double la = std::log1p(-rho_) + log_cnpdf(Xh, cplx(0.0), Xb);
  const double lb = std::log(rho_) + log_cnpdf(Xh, cplx(0.0), Xb + 1.0);
  const double w = (rho_ == 1.0) ? 1.0 : 1.0 / (1.0 + std::exp(la - lb));
  const cplx pm = Xh / (Xb + 1.0);
  const double pv = Xb / (Xb + 1.0);
  u.mean = w * pm;
  u.var = std::max(0.0, w * (std::norm(pm) + pv) - std::norm(u.mean));
  return u;
}

cplx ComplexGaussBernoulliPrior::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (uni(rng) >= rho_) return {0.0, 0.0};
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

double ComplexSoftThresholdPrior::moment0(cplx, double) const {
  throw std::logic_error("soft-threshold pseudo-prior has no moments");
}
cplx ComplexSoftThresholdPrior::moment1(cplx, double) const {
  throw std::logic_error("soft-threshold pseudo-prior has no moments");
}
double ComplexSoftThresholdPrior::moment2(cplx, double) const {
  throw std::logic_error("soft-threshold pseudo-prior has no moments");
}
CPosteriorUpdate ComplexSoftThresholdPrior::posterior(cplx Xh, double Xb) const {
  return soft_threshold_update(Xh, Xb);
}
cplx ComplexSoftThresholdPrior::sample(Rng&) const {
  throw std::logic_error("soft-threshold pseudo-prior cannot be sampled");
}


// ---------------------------------------------------------------------------
// complex-CS state evolution maps (radial reduction)
// ---------------------------------------------------------------------------

// For a circular-symmetric prior, X = x + t sqrt(Sigma) is circular with
// |X|^2 ~ scale * Exp(1) per mixture component, so the 4-d expectation of
// fbar collapses to 1-d integrals over u = |X|^2 / scale.
double ComplexGaussBernoulliPrior::se_mse(double Sigma) const {
  auto radial = [&](double scale) {
    return adaptive_quad(
        [&](double u) {
          const double r = std::sqrt(scale * u);
          return std::exp(-u) * posterior(cplx(r, 0.0), Sigma).var;
        },
        0.0, 60.0, 1e-12);
  };
  double e = (1.0 - rho_) * radial(Sigma);
  if (rho_ > 0) e += rho_ * radial(Sigma + 1.0);
  return e;
}

double ComplexSoftThresholdPrior::se_mse(double Sigma) const {
  auto radial = [&](double scale) {
    return adaptive_quad(
        [&](double u) {
          const double r = std::sqrt(scale * u);
          return std::exp(-u) * posterior(cplx(r, 0.0), Sigma).var;
        },
        0.0, 60.0, 1e-12);
  };
  return radial(Sigma + q0_);
}

std::vector<double> prior_sample(const Prior& prior, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("prior_sample: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = prior.sample(rng);
  return out;
}

std::vector<cplx> prior_sample(const ComplexPrior& prior, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("prior_sample: n must be >= 1");
  Rng rng(seed);
  std::vector<cplx> out(n);
  for (auto& x : out) x = prior.sample(rng);
  return out;
}

}  // namespace ampkit
