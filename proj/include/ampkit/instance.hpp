#pragma once

#include <cstdint>
#include <vector>

#include "ampkit/calibration.hpp"
#include "ampkit/channel.hpp"
#include "ampkit/prior.hpp"

namespace ampkit {

struct GlmMeta {
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// y = channel(F x); F is row-major [M x N] with i.i.d. N(0, 1/N) entries
struct GlmInstance {
  std::vector<double> F;
  std::vector<double> y;
  std::vector<double> x_truth;
  std::vector<double> z;
  GlmMeta meta;
};

// complex variant: Re and Im of F independent with variance 1/(2N) each
struct CGlmInstance {
  std::vector<cplx> F;
  std::vector<cplx> y;
  std::vector<cplx> x_truth;
  std::vector<cplx> z;
  GlmMeta meta;
};

// P signals sharing a per-sensor calibration parameter d; y and x are
// row-major [M x P] and [N x P]
struct CalInstance {
  std::vector<double> F;
  std::vector<double> y;
  std::vector<double> x_truth;
  std::vector<double> d_truth;
  int p = 1;
  GlmMeta meta;
};

struct McsMeta {
  int m = 0, p = 0, l = 0, r = 1;
  double alpha = 0.0;  // L / (R (M + P))
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// y = channel(A(u v^T)); A is [L x M x P] with i.i.d. N(0, 1/(R M P)) entries
struct McsInstance {
  std::vector<double> A;
  std::vector<double> y;
  std::vector<double> u_truth;  // [M x R]
  std::vector<double> v_truth;  // [P x R]
  std::vector<double> z;
  McsMeta meta;
};

// dense tensors above this entry count must go through the operator form
inline constexpr std::size_t kDenseTensorLimit = 100'000'000;

GlmInstance generate_glm(const Prior& prior, const Channel& channel, int n,
                         double alpha, std::uint64_t seed);
CGlmInstance generate_glm(const ComplexPrior& prior, const ComplexChannel& channel,
                          int n, double alpha, std::uint64_t seed);
CalInstance generate_calibration(const Prior& prior, const CalibrationChannel& channel,
                                 int n, double alpha, int p, std::uint64_t seed);
McsInstance generate_mcs(const Prior& prior_u, const Prior& prior_v,
                         const Channel& channel, int r, int m, int p, int l,
                         std::uint64_t seed);

// matrix-factorization regime: L = M P, each z_l reads one entry of u v^T
// (rescaled by 1/sqrt(R) so z keeps unit-order variance)
McsInstance generate_mcs_identity(const Prior& prior_u, const Prior& prior_v,
                                  const Channel& channel, int r, int m, int p,
                                  std::uint64_t seed);

// real-equivalent 2M x 2N system of a complex instance: [Re y; Im y] =
// [[Re F, -Im F], [Im F, Re F]] [Re x; Im x]; used to run real solvers that
// treat the two parts independently
GlmInstance real_equivalent(const CGlmInstance& c);

}  // namespace ampkit
