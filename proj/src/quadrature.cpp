#include "ampkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/numerics.hpp"

namespace ampkit {

namespace {

// orthonormal physicists' Hermite H~_n via the three-term recurrence;
// also returns H~_{n-1} for the derivative H~_n' = sqrt(2n) H~_{n-1}
long double hermite_eval(int n, long double z, long double* prev) {
  const long double pim4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
  long double p1 = pim4, p2 = 0.0L;
  for (int j = 0; j < n; ++j) {
    const long double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt((long double)j / (j + 1)) * p3;
  }
  *prev = p2;
  return p1;
}

}  // namespace

// Physicists' Gauss-Hermite rule rescaled to the standard normal weight.
// Nodes are located by a sign-change scan plus bisection: the usual Newton
// marching from asymptotic seeds picks wrong roots for orders of a few
// hundred, while the oscillation spacing bounds below make the scan exact.
QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  std::vector<long double> roots;  // positive roots, ascending
  const long double top = std::sqrt(2.0L * n + 1.0L) + 0.5L;
  const long double step = 3.141592653589793L / std::sqrt(2.0L * n + 1.0L) / 6.0L;
  long double dummy;
  long double za = (n % 2 == 1) ? step * 1e-3L : 0.0L;  // skip the root at 0 for odd n
  long double fa = hermite_eval(n, za, &dummy);
  for (long double zb = za + step; za < top; za = zb, fa = hermite_eval(n, za, &dummy), zb = za + step) {
    long double fb = hermite_eval(n, zb, &dummy);
    if (fa == 0.0L) {
      roots.push_back(za);
      continue;
    }
    if ((fa < 0) != (fb < 0)) {
      long double lo = za, hi = zb, flo = fa;
      for (int it = 0; it < 90; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = hermite_eval(n, mid, &dummy);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-19L * std::max(1.0L, hi)) break;
      }
      long double z = 0.5L * (lo + hi);
      for (int it = 0; it < 4; ++it) {  // Newton polish
        long double p2;
        const long double p1 = hermite_eval(n, z, &p2);
        z -= p1 / (std::sqrt(2.0L * n) * p2);
      }
      roots.push_back(z);
    }
  }
  if (static_cast<int>(roots.size()) != n / 2)
    throw std::runtime_error("gauss_hermite: root scan failed");

  std::vector<long double> t, v;
  auto push = [&](long double z) {
    long double p2;
    hermite_eval(n, z, &p2);
    const long double pp = std::sqrt(2.0L * n) * p2;
    t.push_back(z);
    v.push_back(2.0L / (pp * pp));
  };
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) push(-*it);
  if (n % 2 == 1) push(0.0L);
  for (long double z : roots) push(z);

  QuadratureRule rule;
  rule.kind = RuleKind::gauss_hermite;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double spi = std::sqrt(3.14159265358979323846264338327950288L);
  for (int i = 0; i < n; ++i) {
    // physicists' weight e^{-t^2} -> standard normal: x = sqrt(2) t, w = v/sqrt(pi)
    rule.nodes[i] = static_cast<double>(t[i] * std::sqrt(2.0L));
    rule.weights[i] = static_cast<double>(v[i] / spi);
  }
  return rule;
}

double quad_expect(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double fx = f(rule.nodes[i]);
    if (!std::isfinite(fx))
      throw std::runtime_error("quad_expect: non-finite integrand at node " +
                               std::to_string(rule.nodes[i]));
    s += rule.weights[i] * fx;
  }
  return s;
}

double quad_expect_2d(const QuadratureRule& ra, const QuadratureRule& rb,
                      const std::function<double(double, double)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < ra.nodes.size(); ++i) {
    double si = 0.0;
    for (size_t j = 0; j < rb.nodes.size(); ++j) {
      const double fx = f(ra.nodes[i], rb.nodes[j]);
      if (!std::isfinite(fx))
        throw std::runtime_error("quad_expect_2d: non-finite integrand at node (" +
                                 std::to_string(ra.nodes[i]) + ", " +
                                 std::to_string(rb.nodes[j]) + ")");
      si += rb.weights[j] * fx;
    }
    s += ra.weights[i] * si;
  }
  return s;
}

namespace {

// Gauss-Kronrod 7-15 pair on [-1, 1]
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct GkResult {
  double integral;
  double err;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resg = 0.0, resk = 0.0;
  const double fc = f(c);
  resk = fc * kWgk[7];
  resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x), f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  GkResult r;
  r.integral = resk * h;
  r.err = std::abs((resk - resg) * h);
  return r;
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double tol, int depth) {
  GkResult r = gk15(f, a, b);
  if (r.err <= tol || depth >= 52) return r.integral;
  const double c = 0.5 * (a + b);
  return adaptive_rec(f, a, c, 0.5 * tol, depth + 1) +
         adaptive_rec(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double tol) {
  if (!(a < b)) return 0.0;
  return adaptive_rec(f, a, b, tol, 0);
}

double adaptive_quad_split(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breakpoints, double tol) {
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  double s = 0.0;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    double lo = std::max(a, breakpoints[i]);
    double hi = std::min(b, breakpoints[i + 1]);
    if (hi > lo) s += adaptive_rec(f, lo, hi, tol, 0);
  }
  return s;
}

}  // namespace ampkit
