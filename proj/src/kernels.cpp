#include "ampkit/kernels.hpp"

namespace ampkit::kernels {

namespace {

template <typename T>
inline double abs2(T x) {
  if constexpr (std::is_same_v<T, cplx>)
    return x.real() * x.real() + x.imag() * x.imag();
  else
    return x * x;
}

template <typename T>
inline T conj_of(T x) {
  if constexpr (std::is_same_v<T, cplx>)
    return std::conj(x);
  else
    return x;
}

template <typename T>
void forward_impl(const T* F, int M, int N, int P, const T* xh, const double* xb,
                  T* Zlin, double* Zb) {
#pragma omp parallel for schedule(static)
  for (int m = 0; m < M; ++m) {
    const T* row = F + static_cast<size_t>(m) * N;
    for (int l = 0; l < P; ++l) {
      T acc1{};
      double acc2 = 0.0;
      for (int i = 0; i < N; ++i) {
        acc1 += row[i] * xh[static_cast<size_t>(i) * P + l];
        acc2 += abs2(row[i]) * xb[static_cast<size_t>(i) * P + l];
      }
      Zlin[static_cast<size_t>(m) * P + l] = acc1;
      Zb[static_cast<size_t>(m) * P + l] = acc2;
    }
  }
}

template <typename T>
void backward_impl(const T* Ft, int M, int N, int P, const T* gh, const double* gb,
                   T* r1, double* r2) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < N; ++i) {
    const T* col = Ft + static_cast<size_t>(i) * M;
    for (int l = 0; l < P; ++l) {
      T acc1{};
      double acc2 = 0.0;
      for (int m = 0; m < M; ++m) {
        acc1 += conj_of(col[m]) * gh[static_cast<size_t>(m) * P + l];
        acc2 += abs2(col[m]) * gb[static_cast<size_t>(m) * P + l];
      }
      r1[static_cast<size_t>(i) * P + l] = acc1;
      r2[static_cast<size_t>(i) * P + l] = acc2;
    }
  }
}

void pbigamp_sweep_row(const double* A, int M, int P, int R, const double* uh,
                       const double* ub, const double* vh, const double* vb, double* au,
                       double* a2v, double* g2v, double* av, double* a2u, double* g2u,
                       double* zlin, double* zb) {
  // single row A_l [M x P]; outputs au/a2v/g2v are [M x R], av/a2u/g2u are [P x R]
  for (int j = 0; j < M * R; ++j) {
    if (au) au[j] = 0.0;
    if (a2v) a2v[j] = 0.0;
    if (g2v) g2v[j] = 0.0;
  }
  for (int j = 0; j < P * R; ++j) {
    if (av) av[j] = 0.0;
    if (a2u) a2u[j] = 0.0;
    if (g2u) g2u[j] = 0.0;
  }
  double zl = 0.0, zv = 0.0;
  for (int m = 0; m < M; ++m) {
    const double* arow = A + static_cast<size_t>(m) * P;
    for (int p = 0; p < P; ++p) {
      const double a = arow[p];
      const double a2 = a * a;
      for (int s = 0; s < R; ++s) {
        const double uhs = uh[static_cast<size_t>(m) * R + s];
        const double ubs = ub[static_cast<size_t>(m) * R + s];
        const double vhs = vh[static_cast<size_t>(p) * R + s];
        const double vbs = vb[static_cast<size_t>(p) * R + s];
        if (au) au[m * R + s] += a * vhs;
        if (a2v) a2v[m * R + s] += a2 * vbs;
        if (g2v) g2v[m * R + s] += a2 * vhs * vhs;
        if (av) av[p * R + s] += a * uhs;
        if (a2u) a2u[p * R + s] += a2 * ubs;
        if (g2u) g2u[p * R + s] += a2 * uhs * uhs;
        zl += a * uhs * vhs;
        zv += a2 * (ubs * vbs + ubs * vhs * vhs + uhs * uhs * vbs);
      }
    }
  }
  if (zlin) *zlin = zl;
  if (zb) *zb = zv;
}

}  // namespace

void glm_forward(const double* F, int M, int N, const double* xh, const double* xb,
                 double* Zlin, double* Zb) {
  forward_impl(F, M, N, 1, xh, xb, Zlin, Zb);
}
void glm_backward(const double* Ft, int M, int N, const double* gh, const double* gb,
                  double* r1, double* r2) {
  backward_impl(Ft, M, N, 1, gh, gb, r1, r2);
}
void glm_forward(const cplx* F, int M, int N, const cplx* xh, const double* xb,
                 cplx* Zlin, double* Zb) {
  forward_impl(F, M, N, 1, xh, xb, Zlin, Zb);
}
void glm_backward(const cplx* Ft, int M, int N, const cplx* gh, const double* gb,
                  cplx* r1, double* r2) {
  backward_impl(Ft, M, N, 1, gh, gb, r1, r2);
}
void glm_forward_multi(const double* F, int M, int N, int P, const double* xh,
                       const double* xb, double* Zlin, double* Zb) {
  forward_impl(F, M, N, P, xh, xb, Zlin, Zb);
}
void glm_backward_multi(const double* Ft, int M, int N, int P, const double* gh,
                        const double* gb, double* r1, double* r2) {
  backward_impl(Ft, M, N, P, gh, gb, r1, r2);
}
void glm_forward_multi(const cplx* F, int M, int N, int P, const cplx* xh,
                       const double* xb, cplx* Zlin, double* Zb) {
  forward_impl(F, M, N, P, xh, xb, Zlin, Zb);
}
void glm_backward_multi(const cplx* Ft, int M, int N, int P, const cplx* gh,
                        const double* gb, cplx* r1, double* r2) {
  backward_impl(Ft, M, N, P, gh, gb, r1, r2);
}

void pbigamp_sweep(const double* A, int L, int M, int P, int R, const double* uh,
                   const double* ub, const double* vh, const double* vb, double* au,
                   double* a2v, double* g2v, double* av, double* a2u, double* g2u,
                   double* zlin, double* zb) {
  const size_t mp = static_cast<size_t>(M) * P;
#pragma omp parallel for schedule(static)
  for (int l = 0; l < L; ++l) {
    pbigamp_sweep_row(A + l * mp, M, P, R, uh, ub, vh, vb,
                      au ? au + static_cast<size_t>(l) * M * R : nullptr,
                      a2v ? a2v + static_cast<size_t>(l) * M * R : nullptr,
                      g2v ? g2v + static_cast<size_t>(l) * M * R : nullptr,
                      av ? av + static_cast<size_t>(l) * P * R : nullptr,
                      a2u ? a2u + static_cast<size_t>(l) * P * R : nullptr,
                      g2u ? g2u + static_cast<size_t>(l) * P * R : nullptr,
                      zlin ? zlin + l : nullptr, zb ? zb + l : nullptr);
  }
}

void reduce_rows(const double* W, int L, int J, const double* g, double* out,
                 bool square_w) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < J; ++j) {
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const double w = W[static_cast<size_t>(l) * J + j];
      acc += (square_w ? w * w : w) * g[l];
    }
    out[j] = acc;
  }
}

namespace serial {

void glm_forward(const double* F, int M, int N, const double* xh, const double* xb,
                 double* Zlin, double* Zb) {
  for (int m = 0; m < M; ++m) {
    const double* row = F + static_cast<size_t>(m) * N;
    double acc1 = 0.0, acc2 = 0.0;
    for (int i = 0; i < N; ++i) {
      acc1 += row[i] * xh[i];
      acc2 += row[i] * row[i] * xb[i];
    }
    Zlin[m] = acc1;
    Zb[m] = acc2;
  }
}

void glm_backward(const double* Ft, int M, int N, const double* gh, const double* gb,
                  double* r1, double* r2) {
  for (int i = 0; i < N; ++i) {
    const double* col = Ft + static_cast<size_t>(i) * M;
    double acc1 = 0.0, acc2 = 0.0;
    for (int m = 0; m < M; ++m) {
      acc1 += col[m] * gh[m];
      acc2 += col[m] * col[m] * gb[m];
    }
    r1[i] = acc1;
    r2[i] = acc2;
  }
}

void pbigamp_sweep(const double* A, int L, int M, int P, int R, const double* uh,
                   const double* ub, const double* vh, const double* vb, double* au,
                   double* a2v, double* g2v, double* av, double* a2u, double* g2u,
                   double* zlin, double* zb) {
  const size_t mp = static_cast<size_t>(M) * P;
  for (int l = 0; l < L; ++l) {
    pbigamp_sweep_row(A + l * mp, M, P, R, uh, ub, vh, vb,
                      au ? au + static_cast<size_t>(l) * M * R : nullptr,
                      a2v ? a2v + static_cast<size_t>(l) * M * R : nullptr,
                      g2v ? g2v + static_cast<size_t>(l) * M * R : nullptr,
                      av ? av + static_cast<size_t>(l) * P * R : nullptr,
                      a2u ? a2u + static_cast<size_t>(l) * P * R : nullptr,
                      g2u ? g2u + static_cast<size_t>(l) * P * R : nullptr,
                      zlin ? zlin + l : nullptr, zb ? zb + l : nullptr);
  }
}

void reduce_rows(const double* W, int L, int J, const double* g, double* out,
                 bool square_w) {
  for (int j = 0; j < J; ++j) {
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const double w = W[static_cast<size_t>(l) * J + j];
      acc += (square_w ? w * w : w) * g[l];
    }
    out[j] = acc;
  }
}

}  // namespace serial

}  // namespace ampkit::kernels
