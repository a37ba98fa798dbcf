#pragma once

#include <complex>
#include <cstddef>

// Dense data-parallel kernels used by the solvers. Every kernel is
// parallelized over its output index with a serial per-output reduction, so
// results are bit-identical to the serial reference regardless of the number
// of OpenMP workers. The serial:: twins are kept for tests and benchmarks.
namespace ampkit::kernels {

using cplx = std::complex<double>;

// Zlin[m] = sum_i F[m,i] xh[i],  Zb[m] = sum_i F[m,i]^2 xb[i]
void glm_forward(const double* F, int M, int N, const double* xh, const double* xb,
                 double* Zlin, double* Zb);
// r1[i] = sum_m F[m,i] gh[m],  r2[i] = sum_m F[m,i]^2 gb[m]; Ft is the
// transposed matrix [N x M]
void glm_backward(const double* Ft, int M, int N, const double* gh, const double* gb,
                  double* r1, double* r2);

// complex variants: squares become |F|^2 and the backward pass uses conj(F)
void glm_forward(const cplx* F, int M, int N, const cplx* xh, const double* xb,
                 cplx* Zlin, double* Zb);
void glm_backward(const cplx* Ft, int M, int N, const cplx* gh, const double* gb,
                  cplx* r1, double* r2);

// column-major P-signal variants (arrays are [M x P] / [N x P], row-major)
void glm_forward_multi(const double* F, int M, int N, int P, const double* xh,
                       const double* xb, double* Zlin, double* Zb);
void glm_backward_multi(const double* Ft, int M, int N, int P, const double* gh,
                        const double* gb, double* r1, double* r2);
void glm_forward_multi(const cplx* F, int M, int N, int P, const cplx* xh,
                       const double* xb, cplx* Zlin, double* Zb);
void glm_backward_multi(const cplx* Ft, int M, int N, int P, const cplx* gh,
                        const double* gb, cplx* r1, double* r2);

// One fused sweep over the measurement tensor A [L x M x P] of matrix
// compressed sensing, producing everything PBiGAMP needs per iteration:
//   au[l, m, s] = sum_p A[l,m,p] vh[p,s]          a2v[l, m, s] = sum_p A^2 vb
//   g2v[l, m, s] = sum_p A^2 vh^2
//   av[l, p, s] = sum_m A[l,m,p] uh[m,s]          a2u[l, p, s] = sum_m A^2 ub
//   g2u[l, p, s] = sum_m A^2 uh^2
//   zlin[l] = sum_{m,p} A[l,m,p] (uh vh^T)[m,p]
//   zb[l]   = sum_{m,p} A^2 (ub vb^T + ub (vh^2)^T + (uh^2) vb^T)[m,p]
// Any of the output pointers may be null to skip that product.
void pbigamp_sweep(const double* A, int L, int M, int P, int R, const double* uh,
                   const double* ub, const double* vh, const double* vb, double* au,
                   double* a2v, double* g2v, double* av, double* a2u, double* g2u,
                   double* zlin, double* zb);

// out[j] = sum_l W[l, j] g[l] for W of shape [L x J]; optionally squares W or
// multiplies two row vectors elementwise (used for the Onsager reductions)
void reduce_rows(const double* W, int L, int J, const double* g, double* out,
                 bool square_w);

namespace serial {
void glm_forward(const double* F, int M, int N, const double* xh, const double* xb,
                 double* Zlin, double* Zb);
void glm_backward(const double* Ft, int M, int N, const double* gh, const double* gb,
                  double* r1, double* r2);
void pbigamp_sweep(const double* A, int L, int M, int P, int R, const double* uh,
                   const double* ub, const double* vh, const double* vb, double* au,
                   double* a2v, double* g2v, double* av, double* a2u, double* g2u,
                   double* zlin, double* zb);
void reduce_rows(const double* W, int L, int J, const double* g, double* out,
                 bool square_w);
}  // namespace serial

}  // namespace ampkit::kernels
