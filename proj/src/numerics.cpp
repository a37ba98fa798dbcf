#include "ampkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace ampkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double log_npdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * d * d / var;
}

double npdf(double x, double mean, double var) {
  return std::exp(log_npdf(x, mean, var));
}

double npdf_std(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * kPi); }

double log_cnpdf(cplx x, cplx mean, double var) {
  return -std::norm(x - mean) / var - std::log(kPi * var);
}

GaussProduct gaussian_product(std::span<const GaussParams> factors) {
  if (factors.empty()) throw std::invalid_argument("gaussian_product: empty");
  double prec = 0.0, wmean = 0.0;
  for (const auto& f : factors) {
    if (!(f.var > 0)) throw std::invalid_argument("gaussian_product: var <= 0");
    prec += 1.0 / f.var;
    wmean += f.mean / f.var;
  }
  GaussProduct out;
  out.g.var = 1.0 / prec;
  out.g.mean = wmean * out.g.var;
  double ls = -log_npdf(out.g.mean, 0.0, out.g.var);
  for (const auto& f : factors) ls += log_npdf(f.mean, 0.0, f.var);
  out.log_scale = ls;
  return out;
}

double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -kInf) return -kInf;
  return a + std::log1p(std::exp(b - a));
}

// Asymptotic series 1/(x sqrt(pi)) sum_k (-1)^k (2k-1)!!/(2x^2)^k, used from
// x >= 8 where it converges to full double precision before diverging.
static double erfcx_asymptotic(double x) {
  const double ix2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 24; ++k) {
    term *= -(2 * k - 1) * ix2;
    const double next = sum + term;
    if (next == sum) break;
    sum = next;
  }
  return sum / (x * std::sqrt(kPi));
}

double erfcx(double x) {
  if (x >= 8.0) return erfcx_asymptotic(x);
  if (x >= -25.0) return std::exp(x * x) * std::erfc(x);
  throw std::domain_error("erfcx: argument too negative, use log_erfc");
}

double log_erfc(double x) {
  if (x < 8.0) return std::log(std::erfc(x));
  return -x * x + std::log(erfcx_asymptotic(x));
}

// ---------------------------------------------------------------------------
// scaled modified Bessel functions
// ---------------------------------------------------------------------------

static double scaled_bessel_series(int order, double x) {
  // power series in long double, then scale by e^{-x}; safe for x <= 40
  const long double h = static_cast<long double>(x) / 2.0L;
  long double term = (order == 0) ? 1.0L : h;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= h * h / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (term < sum * 1e-20L) break;
  }
  return static_cast<double>(sum * std::exp(static_cast<long double>(-x)));
}

static double scaled_bessel_asymptotic(int order, double x) {
  // e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k prod_{j<=k}(mu-(2j-1)^2) (-1)^k/(k! (8x)^k)
  const double mu = 4.0 * order * order;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * x * k);
    const double next = sum + term;
    if (next == sum) break;
    sum = next;
  }
  return sum / std::sqrt(2 * kPi * x);
}

double scaled_bessel_i(int order, double x) {
  if (order != 0 && order != 1) throw std::invalid_argument("scaled_bessel_i: order must be 0 or 1");
  if (!(x >= 0)) throw std::domain_error("scaled_bessel_i: x must be >= 0");
  return (x <= 30.0) ? scaled_bessel_series(order, x) : scaled_bessel_asymptotic(order, x);
}

// ---------------------------------------------------------------------------
// truncated standard normal
// ---------------------------------------------------------------------------

// One-sided ingredients with lo >= 0:
//   P(t > lo) = 0.5 erfc(lo/sqrt(2)) = 0.5 erfcx(lo/sqrt(2)) e^{-lo^2/2}
// Differences of the scaled form keep the shared e^{-lo^2/2} factored out.
TruncatedNormal truncated_std_normal(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("truncated_std_normal: lo >= hi");
  if (hi <= 0.0) {
    // mirror to the right tail
    TruncatedNormal t = truncated_std_normal(-hi, -lo);
    t.mean = -t.mean;
    return t;
  }
  const double inv_s2 = 1.0 / kSqrt2;
  TruncatedNormal out{};
  double phi_lo = std::isinf(lo) ? 0.0 : npdf_std(lo);
  double phi_hi = std::isinf(hi) ? 0.0 : npdf_std(hi);
  double r1, r2;  // (phi(lo)-phi(hi))/Z, (lo phi(lo) - hi phi(hi))/Z
  if (lo >= 0.0) {
    const double elo = std::isinf(lo) ? 0.0 : erfcx(lo * inv_s2);
    const double ehi = std::isinf(hi) ? 0.0 : erfcx(hi * inv_s2);
    // Z = 0.5 e^{-lo^2/2} (elo - ehi e^{-(hi^2-lo^2)/2})
    const double dexp = std::isinf(hi) ? 0.0 : std::exp(-0.5 * (hi - lo) * (hi + lo));
    const double zs = 0.5 * (elo - ehi * dexp);  // Z * e^{lo^2/2}
    out.log_mass = -0.5 * lo * lo + std::log(zs);
    const double c = 1.0 / (std::sqrt(2 * kPi) * zs);
    r1 = c * (1.0 - dexp);
    r2 = c * (lo - hi * dexp);
    if (std::isinf(hi)) r2 = c * lo;
  } else {
    // interval straddles zero, mass is order one
    const double mass = 0.5 * (std::erfc(lo * inv_s2) - std::erfc(hi * inv_s2));
    out.log_mass = std::log(mass);
    r1 = (phi_lo - phi_hi) / mass;
    double lp = std::isinf(lo) ? 0.0 : lo * phi_lo;
    double hp = std::isinf(hi) ? 0.0 : hi * phi_hi;
    r2 = (lp - hp) / mass;
  }
  out.mean = r1;
  out.var = std::max(0.0, 1.0 + r2 - r1 * r1);
  return out;
}

// ---------------------------------------------------------------------------
// J integral
// ---------------------------------------------------------------------------

// int_{sa}^{sb} s^i e^{-s^2} ds, with the tail-side difference taken through
// the upper incomplete gamma when both limits share a sign.
static double pow_gauss_integral(int i, double sa, double sb) {
  const double s = 0.5 * (i + 1);
  auto lower = [&](double t) {  // int_0^t, t >= 0
    if (std::isinf(t)) return 0.5 * boost::math::tgamma(s);
    return 0.5 * boost::math::tgamma_lower(s, t * t);
  };
  auto upper = [&](double t) {  // int_t^inf, t >= 0
    if (std::isinf(t)) return 0.0;
    return 0.5 * boost::math::tgamma(s, t * t);
  };
  if (sa >= 0.0 && sb >= 0.0) return upper(sa) - upper(sb);
  if (sa <= 0.0 && sb <= 0.0) {
    // mirror: int_{sa}^{sb} = (-1)^i int_{-sb}^{-sa}
    const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
    return sgn * (upper(-sb) - upper(-sa));
  }
  // straddles zero
  const double left = (i % 2 == 0) ? lower(-sa) : -lower(-sa);
  return left + lower(sb);
}

double j_integral(int n, double xh, double xb, double a, double b) {
  if (n < 0 || n > 12)
    throw std::invalid_argument("j_integral: order must be in [0, 12]");
  if (!(xb > 0)) throw std::invalid_argument("j_integral: xb must be > 0");
  if (!(a < b)) throw std::invalid_argument("j_integral: need a < b");
  const double w = std::sqrt(2.0 * xb);
  const double sa = std::isinf(a) ? -kInf : (a - xh) / w;
  const double sb = std::isinf(b) ? kInf : (b - xh) / w;
  double binom = 1.0;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) binom = binom * (n - i + 1) / i;
    sum += binom * std::pow(xh, n - i) * std::pow(w, i) * pow_gauss_integral(i, sa, sb);
  }
  return sum / std::sqrt(kPi);
}

}  // namespace ampkit
