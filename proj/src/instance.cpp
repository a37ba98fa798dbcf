#include "ampkit/instance.hpp"

#include <cmath>
#include <stdexcept>

namespace ampkit {

namespace {
template <typename T>
void fill_gaussian_matrix(std::vector<T>& F, int rows, int cols, double var, Rng& rng) {
  F.resize(static_cast<size_t>(rows) * cols);
  if constexpr (std::is_same_v<T, cplx>) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * var));
    for (auto& f : F) f = cplx(g(rng), g(rng));
  } else {
    std::normal_distribution<double> g(0.0, std::sqrt(var));
    for (auto& f : F) f = g(rng);
  }
}
}  // namespace

GlmInstance generate_glm(const Prior& prior, const Channel& channel, int n,
                         double alpha, std::uint64_t seed) {
  if (n < 2 || !(alpha > 0)) throw std::invalid_argument("generate_glm: bad dimensions");
  GlmInstance inst;
  const int m = static_cast<int>(std::lround(alpha * n));
  inst.meta = {n, m, alpha, 0.0, seed};
  Rng rng(derive_seed(seed, 0xa11ce));
  fill_gaussian_matrix(inst.F, m, n, 1.0 / n, rng);
  inst.x_truth.resize(n);
  for (auto& x : inst.x_truth) x = prior.sample(rng);
  inst.z.assign(m, 0.0);
  for (int mu = 0; mu < m; ++mu) {
    const double* row = inst.F.data() + static_cast<size_t>(mu) * n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += row[i] * inst.x_truth[i];
    inst.z[mu] = acc;
  }
  inst.y.resize(m);
  for (int mu = 0; mu < m; ++mu) inst.y[mu] = channel.sample(inst.z[mu], rng);
  return inst;
}

CGlmInstance generate_glm(const ComplexPrior& prior, const ComplexChannel& channel,
                          int n, double alpha, std::uint64_t seed) {
  if (n < 2 || !(alpha > 0)) throw std::invalid_argument("generate_glm: bad dimensions");
  CGlmInstance inst;
  const int m = static_cast<int>(std::lround(alpha * n));
  inst.meta = {n, m, alpha, 0.0, seed};
  Rng rng(derive_seed(seed, 0xc011ce));
  fill_gaussian_matrix(inst.F, m, n, 1.0 / n, rng);
  inst.x_truth.resize(n);
  for (auto& x : inst.x_truth) x = prior.sample(rng);
  inst.z.assign(m, cplx(0.0, 0.0));
  for (int mu = 0; mu < m; ++mu) {
    const cplx* row = inst.F.data() + static_cast<size_t>(mu) * n;
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) acc += row[i] * inst.x_truth[i];
    inst.z[mu] = acc;
  }
  inst.y.resize(m);
  for (int mu = 0; mu < m; ++mu) inst.y[mu] = channel.sample(inst.z[mu], rng);
  return inst;
}

CalInstance generate_calibration(const Prior& prior, const CalibrationChannel& channel,
                                 int n, double alpha, int p, std::uint64_t seed) {
  if (n < 2 || !(alpha > 0) || p < 1)
    throw std::invalid_argument("generate_calibration: bad dimensions");
  CalInstance inst;
  const int m = static_cast<int>(std::lround(alpha * n));
  inst.meta = {n, m, alpha, 0.0, seed};
  inst.p = p;
  Rng rng(derive_seed(seed, 0xca11b));
  fill_gaussian_matrix(inst.F, m, n, 1.0 / n, rng);
  inst.x_truth.resize(static_cast<size_t>(n) * p);
  for (auto& x : inst.x_truth) x = prior.sample(rng);
  std::vector<double> z(static_cast<size_t>(m) * p, 0.0);
  for (int mu = 0; mu < m; ++mu) {
    const double* row = inst.F.data() + static_cast<size_t>(mu) * n;
    for (int l = 0; l < p; ++l) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += row[i] * inst.x_truth[static_cast<size_t>(i) * p + l];
      z[static_cast<size_t>(mu) * p + l] = acc;
    }
  }
  inst.y.resize(static_cast<size_t>(m) * p);
  inst.d_truth.resize(m);
  for (int mu = 0; mu < m; ++mu)
    channel.sample_row(z.data() + static_cast<size_t>(mu) * p, p, rng,
                       &inst.d_truth[mu], inst.y.data() + static_cast<size_t>(mu) * p);
  return inst;
}

McsInstance generate_mcs(const Prior& prior_u, const Prior& prior_v,
                         const Channel& channel, int r, int m, int p, int l,
                         std::uint64_t seed) {
  if (r < 1 || m < 1 || p < 1 || l < 1)
    throw std::invalid_argument("generate_mcs: bad dimensions");
  const std::size_t entries = static_cast<std::size_t>(l) * m * p;
  if (entries > kDenseTensorLimit)
    throw std::invalid_argument(
        "generate_mcs: dense tensor would exceed 1e8 entries; use the operator "
        "form of pbigamp_run for larger experiments");
  McsInstance inst;
  inst.meta = {m, p, l, r, double(l) / (double(r) * (m + p)), 0.0, seed};
  Rng rng(derive_seed(seed, 0x3c5));
  fill_gaussian_matrix(inst.A, l, m * p, 1.0 / (double(r) * m * p), rng);
  inst.u_truth.resize(static_cast<size_t>(m) * r);
  inst.v_truth.resize(static_cast<size_t>(p) * r);
  for (auto& u : inst.u_truth) u = prior_u.sample(rng);
  for (auto& v : inst.v_truth) v = prior_v.sample(rng);
  inst.z.assign(l, 0.0);
  for (int li = 0; li < l; ++li) {
    const double* row = inst.A.data() + static_cast<size_t>(li) * m * p;
    double acc = 0.0;
    for (int mu = 0; mu < m; ++mu)
      for (int pi = 0; pi < p; ++pi) {
        double x = 0.0;
        for (int s = 0; s < r; ++s)
          x += inst.u_truth[static_cast<size_t>(mu) * r + s] *
               inst.v_truth[static_cast<size_t>(pi) * r + s];
        acc += row[static_cast<size_t>(mu) * p + pi] * x;
      }
    inst.z[li] = acc;
  }
  inst.y.resize(l);
  for (int li = 0; li < l; ++li) inst.y[li] = channel.sample(inst.z[li], rng);
  return inst;
}

McsInstance generate_mcs_identity(const Prior& prior_u, const Prior& prior_v,
                                  const Channel& channel, int r, int m, int p,
                                  std::uint64_t seed) {
  const int l = m * p;
  if (static_cast<std::size_t>(l) * m * p > kDenseTensorLimit)
    throw std::invalid_argument("generate_mcs_identity: dense tensor too large");
  McsInstance inst;
  inst.meta = {m, p, l, r, double(l) / (double(r) * (m + p)), 0.0, seed};
  Rng rng(derive_seed(seed, 0x1de57));
  inst.A.assign(static_cast<size_t>(l) * m * p, 0.0);
  const double scale = 1.0 / std::sqrt(double(r));
  for (int mu = 0; mu < m; ++mu)
    for (int pi = 0; pi < p; ++pi) {
      const int li = mu * p + pi;
      inst.A[(static_cast<size_t>(li) * m + mu) * p + pi] = scale;
    }
  inst.u_truth.resize(static_cast<size_t>(m) * r);
  inst.v_truth.resize(static_cast<size_t>(p) * r);
  for (auto& u : inst.u_truth) u = prior_u.sample(rng);
  for (auto& v : inst.v_truth) v = prior_v.sample(rng);
  inst.z.assign(l, 0.0);
  for (int mu = 0; mu < m; ++mu)
    for (int pi = 0; pi < p; ++pi) {
      double x = 0.0;
      for (int s = 0; s < r; ++s)
        x += inst.u_truth[static_cast<size_t>(mu) * r + s] *
             inst.v_truth[static_cast<size_t>(pi) * r + s];
      inst.z[mu * p + pi] = scale * x;
    }
  inst.y.resize(l);
  for (int li = 0; li < l; ++li) inst.y[li] = channel.sample(inst.z[li], rng);
  return inst;
}

GlmInstance real_equivalent(const CGlmInstance& c) {
  GlmInstance r;
  const int N = c.meta.n, M = c.meta.m;
  r.meta = c.meta;
  r.meta.n = 2 * N;
  r.meta.m = 2 * M;
  r.F.assign(static_cast<size_t>(2 * M) * (2 * N), 0.0);
  for (int mu = 0; mu < M; ++mu) {
    for (int i = 0; i < N; ++i) {
      const cplx f = c.F[static_cast<size_t>(mu) * N + i];
      double* top = r.F.data() + static_cast<size_t>(mu) * 2 * N;
      double* bot = r.F.data() + static_cast<size_t>(mu + M) * 2 * N;
      top[i] = f.real();
      top[i + N] = -f.imag();
      bot[i] = f.imag();
      bot[i + N] = f.real();
    }
  }
  r.y.resize(2 * M);
  r.x_truth.resize(2 * N);
  for (int mu = 0; mu < M; ++mu) {
    r.y[mu] = c.y[mu].real();
    r.y[mu + M] = c.y[mu].imag();
  }
  for (int i = 0; i < N; ++i) {
    r.x_truth[i] = c.x_truth[i].real();
    r.x_truth[i + N] = c.x_truth[i].imag();
  }
  return r;
}

}  // namespace ampkit
