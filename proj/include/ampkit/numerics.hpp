#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ampkit {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
inline constexpr double kSqrt2 = 1.4142135623730950488016887242096981;

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Gaussians. All densities are also available in log form; solver and channel
// code combines them through logs so that converged regimes do not underflow.
// ---------------------------------------------------------------------------

struct GaussParams {
  double mean = 0.0;
  double var = 1.0;
};

double log_npdf(double x, double mean, double var);
double npdf(double x, double mean, double var);
double npdf_std(double x);

// circular complex Gaussian CN(x; mean, var), total variance `var` split
// evenly between real and imaginary parts
double log_cnpdf(cplx x, cplx mean, double var);

// Product of Gaussian densities in the same argument. Returns the resulting
// Gaussian and the log of the scale factor so that
//   prod_i N(x; m_i, v_i) = exp(log_scale) * N(x; mean, var).
struct GaussProduct {
  GaussParams g;
  double log_scale = 0.0;
};
GaussProduct gaussian_product(std::span<const GaussParams> factors);

double log_sum_exp(std::span<const double> v);
double log_sum_exp(double a, double b);

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

// scaled complementary error function e^{x^2} erfc(x); valid for x >= -25
double erfcx(double x);

// log(erfc(x)) for any finite x, without underflow on the right tail
double log_erfc(double x);

// e^{-x} I_order(x) for order 0 or 1, x >= 0
double scaled_bessel_i(int order, double x);

// moments of the standard normal restricted to [lo, hi] (either may be
// +-infinity): log of the contained mass, and mean/variance of the
// truncated distribution. Evaluated through erfcx in the tails.
struct TruncatedNormal {
  double log_mass;
  double mean;
  double var;
};
TruncatedNormal truncated_std_normal(double lo, double hi);

// J(N, xh, xb, a, b) = int_a^b x^N Normal(x; xh, xb) dx via incomplete gamma
// functions. N is capped at 12: the binomial expansion loses accuracy far
// before anything in this codebase needs higher orders.
double j_integral(int n, double xh, double xb, double a, double b);

}  // namespace ampkit
