#include "ampkit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ampkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Channel::moment(int k, double y, double Zh, double Zb) const {
  const double f0 = std::exp(log_f0(y, Zh, Zb));
  if (k == 0) return f0;
  const ZPosterior zp = z_posterior(y, Zh, Zb);
  if (k == 1) return f0 * zp.mean;
  if (k == 2) return f0 * (zp.var + zp.mean * zp.mean);
  throw std::invalid_argument("Channel::moment: k must be 0, 1 or 2");
}

std::pair<double, double> Channel::y_range(double Zh, double V) const {
  const double s = 12.0 * std::sqrt(V) + 12.0;
  return {Zh - s, Zh + s};
}

double Channel::se_mhat_kernel(double m, double q0, const QuadratureRule& t_rule) const {
  return se_mhat_kernel_generic(m, q0, t_rule);
}

double Channel::se_mhat_kernel_generic(double m, double q0,
                                       const QuadratureRule& t_rule) const {
  const double V = q0 - m;
  const double sm = std::sqrt(std::max(m, 0.0));
  return quad_expect(t_rule, [&](double t) {
    const double Zh = sm * t;
    auto [ylo, yhi] = y_range(Zh, V);
    return adaptive_quad(
        [&](double y) {
          const double lf0 = log_f0(y, Zh, V);
          if (lf0 < -700.0) return 0.0;
          const GPair gp = g(y, Zh, V);
          return std::exp(lf0) * gp.ghat * gp.ghat;
        },
        ylo, yhi, 1e-11);
  });
}

// ---------------------------------------------------------------------------
// AWGN
// ---------------------------------------------------------------------------

GPair AwgnChannel::g(double y, double Zh, double Zb) const {
  const double V = delta_ + Zb;
  if (!(V > 0)) throw std::domain_error("awgn: delta + Zb must be > 0");
  return {(y - Zh) / V, -1.0 / V};
}

ZPosterior AwgnChannel::z_posterior(double y, double Zh, double Zb) const {
  const double V = delta_ + Zb;
  if (!(V > 0)) throw std::domain_error("awgn: delta + Zb must be > 0");
  return {(y * Zb + Zh * delta_) / V, delta_ * Zb / V};
}

double AwgnChannel::log_f0(double y, double Zh, double Zb) const {
  return log_npdf(y, Zh, delta_ + Zb);
}

double AwgnChannel::sample(double z, Rng& rng) const {
  if (delta_ == 0.0) return z;
  std::normal_distribution<double> n(0.0, std::sqrt(delta_));
  return z + n(rng);
}

double AwgnChannel::se_mhat_kernel(double m, double q0, const QuadratureRule&) const {
  return 1.0 / (delta_ + q0 - m);
}

std::pair<double, double> AwgnChannel::y_range(double Zh, double V) const {
  const double s = 12.0 * std::sqrt(V + delta_) + 1e-6;
  return {Zh - s, Zh + s};
}

// ---------------------------------------------------------------------------
// quantizer
// ---------------------------------------------------------------------------

QuantizedChannel::QuantizedChannel(QuantizerSpec spec) : spec_(std::move(spec)) {
  const size_t K = spec_.levels.size();
  if (K < 1 || spec_.thresholds.size() != K + 1)
    throw std::invalid_argument("quantizer: need K levels and K+1 thresholds");
  for (size_t i = 0; i + 1 < spec_.thresholds.size(); ++i)
    if (!(spec_.thresholds[i] < spec_.thresholds[i + 1]))
      throw std::invalid_argument("quantizer: thresholds must be strictly increasing");
  if (spec_.delta < 0) throw std::invalid_argument("quantizer: delta < 0");
}

QuantizerSpec one_bit_spec(double delta) {
  QuantizerSpec s;
  s.thresholds = {-kInf, 0.0, kInf};
  s.levels = {-1.0, 1.0};
  s.delta = delta;
  return s;
}

int QuantizedChannel::level_index(double y) const {
  for (size_t k = 0; k < spec_.levels.size(); ++k)
    if (spec_.levels[k] == y) return static_cast<int>(k);
  throw std::invalid_argument("quantizer: unknown level " + std::to_string(y));
}

TruncatedNormal QuantizedChannel::bin_moments(int k, double Zh, double Zb,
                                              double* s_out) const {
  const double s2 = spec_.delta + Zb;
  const double s = std::sqrt(s2);
  *s_out = s;
  const double a = spec_.thresholds[k];
  const double b = spec_.thresholds[k + 1];
  const double lo = std::isinf(a) ? -kInf : (a - Zh) / s;
  const double hi = std::isinf(b) ? kInf : (b - Zh) / s;
  return truncated_std_normal(lo, hi);
}

double QuantizedChannel::log_f0(double y, double Zh, double Zb) const {
  double s;
  return bin_moments(level_index(y), Zh, Zb, &s).log_mass;
}

// ghat = E[t | bin]/s and gbar = (Var[t | bin] - 1)/s^2 in standardized units
// of w = z + xi; both stay finite for Zb -> 0 and gbar <= 0 always.
GPair QuantizedChannel::g(double y, double Zh, double Zb) const {
  double s;
  const TruncatedNormal t = bin_moments(level_index(y), Zh, Zb, &s);
  return {t.mean / s, (t.var - 1.0) / (s * s)};
}

ZPosterior QuantizedChannel::z_posterior(double y, double Zh, double Zb) const {
  double s;
  const TruncatedNormal t = bin_moments(level_index(y), Zh, Zb, &s);
  const double s2 = s * s;
  ZPosterior zp;
  zp.mean = Zh + Zb / s * t.mean;
  zp.var = Zb * spec_.delta / s2 + Zb * Zb / s2 * t.var;
  return zp;
}

double QuantizedChannel::sample(double z, Rng& rng) const {
  double w = z;
  if (spec_.delta > 0) {
    std::normal_distribution<double> n(0.0, std::sqrt(spec_.delta));
    w += n(rng);
  }
  // ties on a threshold go to the lower bin
  for (size_t k = 0; k < spec_.levels.size(); ++k)
    if (w <= spec_.thresholds[k + 1]) return spec_.levels[k];
  return spec_.levels.back();
}

double QuantizedChannel::se_mhat_kernel(double m, double q0,
                                        const QuadratureRule& t_rule) const {
  // sum over levels of E_t[f0 ghat^2] = E_t[mass * mean^2]/s^2
  const double V = q0 - m;
  const double sm = std::sqrt(std::max(m, 0.0));
  return quad_expect(t_rule, [&](double t) {
    const double Zh = sm * t;
    double acc = 0.0;
    for (size_t k = 0; k < spec_.levels.size(); ++k) {
      double s;
      const TruncatedNormal tn = bin_moments(static_cast<int>(k), Zh, V, &s);
      if (tn.log_mass < -700.0 || tn.mean == 0.0) continue;
      acc += std::exp(tn.log_mass + 2.0 * std::log(std::abs(tn.mean))) / (s * s);
    }
    return acc;
  });
}

// ---------------------------------------------------------------------------
// complex AWGN
// ---------------------------------------------------------------------------

CGPair ComplexAwgnChannel::g(cplx y, cplx Zh, double Zb) const {
  const double V = delta_ + Zb;
  if (!(V > 0)) throw std::domain_error("complex awgn: delta + Zb must be > 0");
  return {(y - Zh) / V, -1.0 / V};
}

CZPosterior ComplexAwgnChannel::z_posterior(cplx y, cplx Zh, double Zb) const {
  const double V = delta_ + Zb;
  return {(y * Zb + Zh * delta_) / V, delta_ * Zb / V};
}

double ComplexAwgnChannel::log_f0(cplx y, cplx Zh, double Zb) const {
  return log_cnpdf(y, Zh, delta_ + Zb);
}

cplx ComplexAwgnChannel::sample(cplx z, Rng& rng) const {
  if (delta_ == 0.0) return z;
  std::normal_distribution<double> n(0.0, std::sqrt(0.5 * delta_));
  return z + cplx(n(rng), n(rng));
}

// ---------------------------------------------------------------------------
// phase retrieval
// ---------------------------------------------------------------------------

double PhaseRetrievalChannel::log_f0(cplx yc, cplx Zh, double Zb) const {
  const double y = yc.real();
  if (!(y > 0)) return -kInf;
  const double V = delta_ + Zb;
  const double r = std::abs(Zh);
  const double b = 2.0 * y * r / V;
  return std::log(2.0 * y / V) - (y - r) * (y - r) / V + std::log(scaled_bessel_i(0, b));
}

CZPosterior PhaseRetrievalChannel::z_posterior(cplx yc, cplx Zh, double Zb) const {
  const double y = yc.real();
  const double V = delta_ + Zb;
  const double r = std::abs(Zh);
  const double b = 2.0 * y * r / V;
  const double R = (b == 0.0) ? 0.0 : scaled_bessel_i(1, b) / scaled_bessel_i(0, b);
  CZPosterior zp;
  const cplx phase = (r == 0.0) ? cplx(0.0, 0.0) : Zh / r;
  zp.mean = phase * ((Zb * y * R + delta_ * r) / V);
  const double m2 =
      (y * y * Zb * Zb + delta_ * delta_ * r * r + (1.0 + b * R) * delta_ * Zb * V) /
      (V * V);
  zp.var = std::max(0.0, m2 - std::norm(zp.mean));
  return zp;
}

CGPair PhaseRetrievalChannel::g(cplx yc, cplx Zh, double Zb) const {
  const CZPosterior zp = z_posterior(yc, Zh, Zb);
  return {(zp.mean - Zh) / Zb, (zp.var - Zb) / (Zb * Zb)};
}

double PhaseRetrievalChannel::moment0(double y, cplx Zh, double Zb) const {
  return std::exp(log_f0(cplx(y, 0.0), Zh, Zb));
}

cplx PhaseRetrievalChannel::moment1(double y, cplx Zh, double Zb) const {
  return moment0(y, Zh, Zb) * z_posterior(cplx(y, 0.0), Zh, Zb).mean;
}

double PhaseRetrievalChannel::moment2(double y, cplx Zh, double Zb) const {
  const CZPosterior zp = z_posterior(cplx(y, 0.0), Zh, Zb);
  return moment0(y, Zh, Zb) * (zp.var + std::norm(zp.mean));
}

cplx PhaseRetrievalChannel::sample(cplx z, Rng& rng) const {
  cplx w = z;
  if (delta_ > 0) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * delta_));
    w += cplx(n(rng), n(rng));
  }
  return {std::abs(w), 0.0};
}

double PhaseRetrievalChannel::se_mhat_kernel_experimental(double m, double q0) const {
  const double V = delta_ + q0 - m;
  const double sm = std::sqrt(std::max(m, 0.0));
  auto inner = [&](double r) {
    const double ylo = std::max(0.0, sm * r - 14.0 * std::sqrt(V));
    const double yhi = sm * r + 14.0 * std::sqrt(V) + 1.0;
    return adaptive_quad(
        [&](double y) {
          const double kappa = 2.0 * r * y * sm / V;
          const double i0 = scaled_bessel_i(0, kappa);
          const double i1 = scaled_bessel_i(1, kappa);
          const double num = y * i1 - r * sm * i0;
          const double e = std::exp(-r * r - (y - sm * r) * (y - sm * r) / V);
          return y * r * e * num * num / i0;
        },
        ylo, yhi, 1e-10);
  };
  const double integral = adaptive_quad(inner, 0.0, 7.0, 1e-10);
  return 4.0 * integral / (V * V * V);
}

}  // namespace ampkit
