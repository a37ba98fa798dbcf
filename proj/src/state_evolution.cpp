#include "ampkit/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/quadrature.hpp"

namespace ampkit {

namespace {

const QuadratureRule& se_rule() {
  static const QuadratureRule rule = gauss_hermite(kSeHermiteOrder);
  return rule;
}

// integration breakpoints for prior-window integrals: the window variance
// sets the narrow scale around each support point
std::vector<double> window_breakpoints(const Prior& prior, double win_var) {
  const double w = std::sqrt(win_var);
  std::vector<double> pts;
  for (double c : prior.support_points())
    for (double k : {-20.0, -6.0, -2.0, 0.0, 2.0, 6.0, 20.0}) pts.push_back(c + k * w);
  return pts;
}

struct PriorWindowRange {
  double lo, hi;
};
PriorWindowRange window_range(const Prior& prior, double win_var) {
  double lo = 0.0, hi = 0.0;
  for (double c : prior.support_points()) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double pad =
      14.0 * (std::sqrt(win_var) + prior.max_component_sd()) + 1e-12;
  return {lo - pad, hi + pad};
}

}  // namespace

double se_overlap(const Prior& prior, double mhat) {
  const double sigma = 1.0 / std::max(mhat, 1e-12);
  auto [lo, hi] = window_range(prior, sigma);
  return adaptive_quad_split(
      [&](double s) {
        const double f0 = prior.moment(0, s, sigma);
        if (!(f0 > 1e-300)) return 0.0;
        const double fh = prior.moment(1, s, sigma) / f0;
        return f0 * fh * fh;
      },
      lo, hi, window_breakpoints(prior, sigma), 1e-13);
}

SeGlmTrajectory se_glm_bo(const Prior& prior, const Channel& channel, double alpha,
                          double m0, double tol, int max_iters) {
  const double q0 = prior.variance();
  if (!(m0 > 0.0) || m0 > q0)
    throw std::invalid_argument("se_glm_bo: need 0 < m0 <= Q0");
  SeGlmTrajectory traj;
  traj.q0 = q0;
  double m = m0;
  traj.steps.push_back({m, 0.0, q0 - m, 2 * (q0 - m)});
  for (int it = 0; it < max_iters; ++it) {
    const double mc = std::min(m, q0 * (1.0 - 1e-15));
    const double mhat = alpha * channel.se_mhat_kernel(mc, q0, se_rule());
    double mn = se_overlap(prior, mhat);
    mn = std::min(mn, q0);
    traj.steps.push_back({mn, mhat, q0 - mn, 2 * (q0 - mn)});
    const bool done = std::abs(mn - m) < tol;
    m = mn;
    if (done) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

SeComplexTrajectory se_complex_cs(const ComplexPrior& prior, double alpha, double delta,
                                  double E0, double tol, int max_iters) {
  if (!(E0 > 0)) throw std::invalid_argument("se_complex_cs: need E0 > 0");
  SeComplexTrajectory traj;
  double E = E0;
  traj.E.push_back(E);
  for (int it = 0; it < max_iters; ++it) {
    const double sigma = (delta + E) / alpha;
    const double En = prior.se_mse(std::max(sigma, 1e-300));
    traj.E.push_back(En);
    const bool done = std::abs(En - E) < tol;
    E = En;
    if (done) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// matrix CS
// ---------------------------------------------------------------------------

SeMcsTrajectory se_mcs_bo(const Prior& prior_u, const Prior& prior_v,
                          const Channel& channel, double alpha_u, double alpha_v,
                          double mu0, double mv0, bool pin_u, double tol,
                          int max_iters) {
  const double q0u = prior_u.variance(), q0v = prior_v.variance();
  if (!(mu0 > 0) || !(mv0 > 0))
    throw std::invalid_argument("se_mcs_bo: initial overlaps must be > 0");
  SeMcsTrajectory traj;
  double mu = pin_u ? q0u : mu0, mv = mv0;
  auto record = [&](double mhz) {
    traj.steps.push_back({mu, mv, mhz, 1.0 - mu / q0u, 1.0 - mv / q0v,
                          1.0 - mu * mv / (q0u * q0v)});
  };
  record(0.0);
  const double q0z = q0u * q0v;
  for (int it = 0; it < max_iters; ++it) {
    const double mz = std::min(mu * mv, q0z * (1.0 - 1e-15));
    const double mhz = channel.se_mhat_kernel(mz, q0z, se_rule());
    double mun = pin_u ? q0u : std::min(se_overlap(prior_u, alpha_u * mv * mhz), q0u);
    double mvn = std::min(se_overlap(prior_v, alpha_v * mu * mhz), q0v);
    const bool done = std::abs(mun - mu) < tol && std::abs(mvn - mv) < tol;
    mu = mun;
    mv = mvn;
    record(mhz);
    if (done) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

std::function<double(double)> se_mcs_symmetric_map(double rho, double alpha,
                                                   double delta) {
  GaussBernoulliPrior prior({rho, 0.0, 1.0});
  return [prior = std::move(prior), rho, alpha, delta](double m) {
    if (m <= 0.0) return 0.0;
    m = std::min(m, rho * (1.0 - 1e-15));
    const double mhat_u = 2.0 * alpha * m / (delta + rho * rho - m * m);
    return se_overlap(prior, mhat_u);
  };
}

SeScalarTrajectory se_mcs_symmetric(double rho, double alpha, double delta, double m0,
                                    double tol, int max_iters) {
  if (!(m0 > 0) || m0 > rho)
    throw std::invalid_argument("se_mcs_symmetric: need 0 < m0 <= rho");
  auto map = se_mcs_symmetric_map(rho, alpha, delta);
  SeScalarTrajectory traj;
  double m = m0;
  traj.m.push_back(m);
  for (int it = 0; it < max_iters; ++it) {
    const double mn = map(m);
    traj.m.push_back(mn);
    const bool done = std::abs(mn - m) < tol;
    m = mn;
    if (done) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// free entropies
// ---------------------------------------------------------------------------

double free_entropy_cs(const Prior& prior, double alpha, double delta, double m) {
  const double q0 = prior.variance();
  if (!(m >= 0) || m >= q0 + 1e-15 || (delta == 0.0 && m >= q0))
    throw std::domain_error("free_entropy_cs: need 0 <= m < Q0 (or delta > 0)");
  const double V = delta + q0 - m;
  const double mhat = alpha / V;
  const double sigma = 1.0 / mhat;
  auto [lo, hi] = window_range(prior, sigma);
  const double ent = adaptive_quad_split(
      [&](double s) {
        const double f0 = prior.moment(0, s, sigma);
        return (f0 > 1e-300) ? f0 * std::log(f0) : 0.0;
      },
      lo, hi, window_breakpoints(prior, sigma), 1e-12);
  const double ix = 0.5 * (std::log(2 * kPi / mhat) + mhat * q0 + 1.0) + ent;
  const double iz = -0.5 * (std::log(2 * kPi * V) + 1.0);
  return -0.5 * m * mhat + ix + alpha * iz;
}

double free_entropy_mcs_symmetric(double rho, double alpha, double delta, double m) {
  if (!(m >= 0) || m >= rho || (delta == 0.0 && m >= rho))
    throw std::domain_error("free_entropy_mcs_symmetric: need 0 <= m < rho");
  const GaussBernoulliPrior prior({rho, 0.0, 1.0});
  const double denom = delta + rho * rho - m * m;
  const double mhat = 2.0 * alpha * m / denom;
  const double mh = std::max(mhat, 1e-300);
  const double rooth = std::sqrt(mh);
  // I_U in the t-parametrization, with the integral taken as
  // 2 (int_0^20 + int_20^{20 sqrt(1+mhat)}): the two pieces resolve the two
  // scales of f0's mixture components
  auto integrand = [&](double t) {
    const double f0 = prior.moment(0, t / rooth, 1.0 / mh);
    if (!(f0 > 1e-300)) return 0.0;
    return f0 / rooth *
           (0.5 * t * t + std::log(std::sqrt(2 * kPi / mh) * f0));
  };
  const double cut = 20.0;
  const double outer = 20.0 * std::sqrt(1.0 + mh);
  double iu = adaptive_quad(integrand, 0.0, std::min(cut, outer), 1e-12);
  if (outer > cut) iu += adaptive_quad(integrand, cut, outer, 1e-12);
  iu *= 2.0;
  const double iz = -0.5 * (std::log(2 * kPi * denom) + 1.0);
  return -0.5 * m * mhat + iu + alpha * iz;
}

// ---------------------------------------------------------------------------
// fixed points
// ---------------------------------------------------------------------------

std::vector<FixedPoint> fixed_point_scan(const std::function<double(double)>& map,
                                         double m_min, double m_max, int n) {
  if (n < 100) throw std::invalid_argument("fixed_point_scan: need n >= 100");
  auto h = [&](double m) { return map(m) - m; };
  std::vector<FixedPoint> out;
  auto classify = [&](double loc) {
    FixedPoint fp;
    fp.location = loc;
    const double eps = std::max(1e-7 * (m_max - m_min), 1e-10);
    double lo = std::max(m_min, loc - eps), hi = std::min(m_max, loc + eps);
    fp.slope = (map(hi) - map(lo)) / (hi - lo);
    if (std::abs(fp.slope - 1.0) < 1e-4)
      fp.stability = Stability::marginal;
    else
      fp.stability = std::abs(fp.slope) < 1.0 ? Stability::stable : Stability::unstable;
    return fp;
  };
  const double step = (m_max - m_min) / n;
  // the lower endpoint may itself be a fixed point (m = 0 for the MCS map)
  if (std::abs(h(m_min)) < 1e-12 * std::max(1.0, std::abs(m_min)))
    out.push_back(classify(m_min + 0.5 * std::max(1e-9 * (m_max - m_min), 1e-12)));
  double a = m_min + (out.empty() ? 0.0 : 0.5 * step);
  double fa = h(a);
  for (int i = 1; i <= n; ++i) {
    const double b = std::min(m_min + i * step, m_max);
    if (b <= a) continue;
    const double fb = h(b);
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(classify(0.5 * (lo + hi)));
    }
    a = b;
    fa = fb;
  }
  if (!out.empty() && std::abs(h(m_min)) < 1e-12)
    out.front().location = m_min;  // report the boundary root at its exact spot
  return out;
}

AlphaBracket locate_alpha_transition(const std::function<bool(double)>& success,
                                     double alpha_lo, double alpha_hi, double tol) {
  // grid seed at step 0.01 to find the first flip, then bisect the bracket
  double lo = alpha_lo, hi = alpha_hi;
  bool slo = success(lo);
  double a = lo;
  bool found = false;
  for (double b = lo + 0.01; b <= hi + 1e-12; b += 0.01) {
    const bool sb = success(std::min(b, hi));
    if (sb != slo) {
      lo = a;
      hi = std::min(b, alpha_hi);
      found = true;
      break;
    }
    a = b;
  }
  if (!found) throw std::runtime_error("locate_alpha_transition: no flip in range");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (success(mid) == slo)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// blind matrix calibration
// ---------------------------------------------------------------------------

namespace {

struct VSideUpdate {
  double m, q, Q;
};

// generic (m, q, Q - q) t-integrals for a Gauss-Bernoulli v with matching
// truth and assumed priors, given the conjugates (mh, qh, Qh)
VSideUpdate v_side_update(const GaussBernoulliPrior& prior, double mh, double qh,
                          double Qh) {
  const double denom = qh - Qh;
  if (!(denom > 0) || !(qh > 0))
    throw std::domain_error("v_side_update: nonpositive precision");
  const double sigma = qh / (mh * mh);  // truth-window variance
  const double c = mh / denom;          // estimate-window mean scale
  const double b = 1.0 / denom;         // estimate-window variance
  auto [lo, hi] = window_range(prior, sigma);
  auto pts = window_breakpoints(prior, sigma);
  auto integ = [&](auto f) {
    return adaptive_quad_split(f, lo, hi, pts, 1e-13);
  };
  VSideUpdate out;
  out.m = integ([&](double s) {
    const double f1t = prior.moment(1, s, sigma);
    if (f1t == 0.0) return 0.0;
    return f1t * prior.posterior(c * s, b).mean;
  });
  out.q = integ([&](double s) {
    const double f0t = prior.moment(0, s, sigma);
    if (!(f0t > 1e-300)) return 0.0;
    const double fh = prior.posterior(c * s, b).mean;
    return f0t * fh * fh;
  });
  const double qmQ = integ([&](double s) {
    const double f0t = prior.moment(0, s, sigma);
    if (!(f0t > 1e-300)) return 0.0;
    return f0t * prior.posterior(c * s, b).var;
  });
  out.Q = out.q + qmQ;
  return out;
}

}  // namespace

SeBlindCalTrajectory se_blind_matrix_cal(const BlindCalParams& prm) {
  if (prm.eta < 0) throw std::invalid_argument("se_blind_matrix_cal: eta must be >= 0");
  const GaussBernoulliPrior prior_v({prm.rho_v, 0.0, 1.0});
  const double q0v = prm.rho_v;  // Q0 of the GB prior
  const double q0u = 1.0;
  const double eta = prm.eta;

  SeBlindCalTrajectory traj;
  SeFullState s;
  s.m_u = s.q_u = 1.0 / (1.0 + eta);  // posterior overlap from the partial info alone
  s.Q_u = q0u;
  s.m_v = (prm.mv0 > 0) ? prm.mv0 : q0v * 1e-6;
  s.q_v = s.m_v * (1.0 + prm.q_perturbation);
  s.Q_v = q0v;
  auto record = [&](SeFullState st) {
    st.nmse_v = 1.0 - st.m_v / std::sqrt(q0v * std::max(st.Q_v, 1e-300));
    traj.steps.push_back(st);
  };
  record(s);

  for (int it = 0; it < prm.max_iters; ++it) {
    if (prm.impose_nishimori) {
      s.q_u = s.m_u;
      s.Q_u = q0u;
      s.q_v = s.m_v;
      s.Q_v = q0v;
    }
    const double mz = s.m_u * s.m_v, qz = s.q_u * s.q_v, Qz = s.Q_u * s.Q_v;
    const double q0z = q0u * q0v;
    const double D = prm.delta + Qz - qz;
    if (!(D > 0)) {
      traj.unphysical = true;
      traj.unphysical_iter = it;
      break;
    }
    double mhz = 1.0 / D;
    double qhz = (prm.delta + q0z + qz - 2 * mz) / (D * D);
    double Qhz = (q0z - Qz + 2 * (qz - mz)) / (D * D);
    if (prm.impose_nishimori) {
      qhz = mhz;
      Qhz = 0.0;
    }

    double mhu = prm.alpha_u * s.m_v * mhz;
    double qhu = prm.alpha_u * s.q_v * qhz;
    double Qhu = prm.alpha_u * s.Q_v * Qhz;
    double mhv = prm.alpha_v * s.m_u * mhz;
    double qhv = prm.alpha_v * s.q_u * qhz;
    double Qhv = prm.alpha_v * s.Q_u * Qhz;
    if (prm.impose_nishimori) {
      qhu = mhu;
      Qhu = 0.0;
      qhv = mhv;
      Qhv = 0.0;
    }

    // u side: Gaussian prior with the eta-noisy direct observations, closed form
    SeFullState ns = s;
    {
      const double du = qhu - Qhu;
      if (!(du > 0) || !(qhu > 0)) {
        traj.unphysical = true;
        traj.unphysical_iter = it;
        break;
      }
      const double B = qhu / (mhu * mhu);
      const double A = 1.0 / du;
      const double cu = mhu / du;  // = a / b in the paper's shorthand
      const double den_b = eta + B * (eta + 1.0);
      const double den_a = eta + A * (eta + 1.0);
      ns.m_u = (B * A * (eta + 1.0) + eta * (A + cu * B) + eta * eta * (1.0 + B) * cu) /
               (den_b * den_a);
      ns.q_u = (A * A * (eta + 1.0) + 2.0 * eta * A * cu +
                eta * eta * cu * cu * (1.0 + B)) /
               (den_a * den_a);
      ns.Q_u = ns.q_u + A * eta / den_a;
    }
    // v side: generic integrals
    try {
      const VSideUpdate vu = v_side_update(prior_v, mhv, qhv, Qhv);
      ns.m_v = vu.m;
      ns.q_v = vu.q;
      ns.Q_v = vu.Q;
    } catch (const std::domain_error&) {
      traj.unphysical = true;
      traj.unphysical_iter = it;
      break;
    }
    if (prm.impose_nishimori) {
      ns.q_u = ns.m_u;
      ns.Q_u = q0u;
      ns.q_v = ns.m_v;
      ns.Q_v = q0v;
    }
    record(ns);
    if (ns.Q_v < 0) {
      traj.unphysical = true;
      traj.unphysical_iter = it;
      break;
    }
    const bool done = std::abs(ns.m_v - s.m_v) < prm.tol &&
                      std::abs(ns.q_v - s.q_v) < prm.tol &&
                      std::abs(ns.Q_v - s.Q_v) < prm.tol;
    s = ns;
    if (done) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

}  // namespace ampkit
