#include "ampkit/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ampkit {

namespace {
template <typename T>
double mse_impl(std::span<const T> est, std::span<const T> truth) {
  if (est.size() != truth.size()) throw std::invalid_argument("mse: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    if constexpr (std::is_same_v<T, cplx>)
      acc += std::norm(est[i] - truth[i]);
    else
      acc += (est[i] - truth[i]) * (est[i] - truth[i]);
  }
  return acc / est.size();
}

template <typename T>
double cc_impl(std::span<const T> est, std::span<const T> truth) {
  if (est.size() != truth.size())
    throw std::invalid_argument("cross_corr: shape mismatch");
  double ne = 0.0, nt = 0.0;
  T dot{};
  for (size_t i = 0; i < est.size(); ++i) {
    if constexpr (std::is_same_v<T, cplx>) {
      dot += std::conj(truth[i]) * est[i];
      ne += std::norm(est[i]);
      nt += std::norm(truth[i]);
    } else {
      dot += truth[i] * est[i];
      ne += est[i] * est[i];
      nt += truth[i] * truth[i];
    }
  }
  if (ne == 0.0 || nt == 0.0) return 0.0;
  return std::abs(dot) / std::sqrt(ne * nt);
}
}  // namespace

double mse(std::span<const double> est, std::span<const double> truth) {
  return mse_impl(est, truth);
}
double mse(std::span<const cplx> est, std::span<const cplx> truth) {
  return mse_impl(est, truth);
}
double cross_corr(std::span<const double> est, std::span<const double> truth) {
  return cc_impl(est, truth);
}
double cross_corr(std::span<const cplx> est, std::span<const cplx> truth) {
  return cc_impl(est, truth);
}
double nmse(std::span<const double> est, std::span<const double> truth) {
  return 1.0 - cross_corr(est, truth);
}
double nmse(std::span<const cplx> est, std::span<const cplx> truth) {
  return 1.0 - cross_corr(est, truth);
}
double mcs_nmse(std::span<const double> u_est, std::span<const double> u_truth,
                std::span<const double> v_est, std::span<const double> v_truth) {
  return 0.5 * (nmse(u_est, u_truth) + nmse(v_est, v_truth));
}

}  // namespace ampkit
