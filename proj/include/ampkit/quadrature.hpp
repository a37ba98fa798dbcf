#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ampkit {

enum class RuleKind { gauss_hermite, adaptive_1d, tensor_2d };

// A quadrature rule against the standard normal weight: for gauss-hermite,
// sum w_i = 1 and sum w_i x_i^2 = 1 so that quad_expect(rule, f) = E[f(t)],
// t ~ N(0,1).
struct QuadratureRule {
  RuleKind kind = RuleKind::gauss_hermite;
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_hermite(int n);

// Default rule order for state-evolution integrals (resolves the kernels used
// here to <= 1e-9; 2-d integrals use the tensor product of two of these).
inline constexpr int kSeHermiteOrder = 201;

double quad_expect(const QuadratureRule& rule, const std::function<double(double)>& f);
double quad_expect_2d(const QuadratureRule& ra, const QuadratureRule& rb,
                      const std::function<double(double, double)>& f);

// Adaptive Gauss-Kronrod (7, 15) on a finite interval.
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-12);

// Adaptive integration with caller-specified interior breakpoints (sorted or
// not); used when the integrand has known narrow features.
double adaptive_quad_split(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breakpoints, double tol = 1e-12);

}  // namespace ampkit
