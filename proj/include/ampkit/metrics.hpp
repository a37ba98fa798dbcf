#pragma once

#include <span>

#include "ampkit/numerics.hpp"

namespace ampkit {

double mse(std::span<const double> est, std::span<const double> truth);
double mse(std::span<const cplx> est, std::span<const cplx> truth);

// |<truth, est>| / (||truth|| ||est||), in [0, 1]; 0 when either norm vanishes
double cross_corr(std::span<const double> est, std::span<const double> truth);
double cross_corr(std::span<const cplx> est, std::span<const cplx> truth);

// nmse = 1 - cross_corr: invariant under positive rescaling (and global
// phases in the complex case)
double nmse(std::span<const double> est, std::span<const double> truth);
double nmse(std::span<const cplx> est, std::span<const cplx> truth);

// rank-1 factor metric: average of the u and v normalized errors
double mcs_nmse(std::span<const double> u_est, std::span<const double> u_truth,
                std::span<const double> v_est, std::span<const double> v_truth);

}  // namespace ampkit
