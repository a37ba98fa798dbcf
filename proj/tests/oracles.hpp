// Test-only reference implementations. Everything here is written from the
// defining integrals and series, independent of the closed forms in src/,
// so the unit tests can use them as oracles.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ampkit/numerics.hpp"
#include "ampkit/quadrature.hpp"

namespace oracle {

// int_a^b f, adaptive Simpson so the oracle does not share the library's
// Gauss-Kronrod code path
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  // the minimum depth guards against false convergence when the coarse
  // samples all miss the integrand's support
  if (depth > 60 || (depth >= 9 && std::abs(left + right - whole) < 15 * tol))
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth + 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

// splits the interval at given points first (for spiky integrands)
inline double integrate_split(const std::function<double(double)>& f,
                              std::vector<double> pts, double tol = 1e-13) {
  std::sort(pts.begin(), pts.end());
  double s = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) s += integrate(f, pts[i], pts[i + 1], tol);
  return s;
}

inline double gauss(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * ampkit::kPi * var);
}

// I_nu(x) by long-double power series (truncated when terms stop contributing)
inline long double bessel_i_series(int order, long double x) {
  const long double h = x / 2.0L;
  long double term = (order == 0) ? 1.0L : h;
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= h * h / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return sum;
}

// I1(x)/I0(x) by the Gauss continued fraction
//   I_{nu+1}/I_nu = 1/(2(nu+1)/x + 1/(2(nu+2)/x + ...)),
// evaluated backwards; independent of the series
inline double bessel_ratio_cf(double x) {
  const int K = 400 + static_cast<int>(3 * x);
  double r = 0.0;
  for (int k = K; k >= 1; --k) r = 1.0 / (2.0 * k / x + r);
  return r;
}

}  // namespace oracle
