#include "ampkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampkit/quadrature.hpp"

namespace ampkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// shared g conversion used by all row updates
inline void z_to_g(const RowContext& row, const double* zhat, const double* zbar,
                   double* gh, double* gb) {
  for (int l = 0; l < row.P; ++l) {
    const double Zb = std::max(row.Zb[l], kMinWindowVar);
    gh[l] = (zhat[l] - row.Zh[l]) / Zb;
    gb[l] = (zbar[l] - Zb) / (Zb * Zb);
  }
}
}  // namespace

const std::vector<std::pair<double, double>>& CalibrationChannel::d_atoms() const {
  throw std::logic_error("calibration: d prior has no atoms");
}
std::pair<double, double> CalibrationChannel::d_support() const {
  throw std::logic_error("calibration: d prior has no continuous support");
}
double CalibrationChannel::d_log_density(double) const {
  throw std::logic_error("calibration: d prior has no density");
}

double CalibrationChannel::fkc_generic(const RowContext& row, int l, int k) const {
  if (l < 0 || l >= row.P) throw std::invalid_argument("fkc: signal index out of range");
  auto term = [&](double d) {
    // log of f_k(y_l|., d) prod_{l' != l} f0(y_l'|., d), with the k-moment
    // factor returned separately since it may be negative
    double lp = 0.0;
    for (int m = 0; m < row.P; ++m)
      lp += log_f0_given_d(row.y[m], row.Zh[m], row.Zb[m], d);
    double factor = 1.0;
    if (k > 0) {
      const ZPosterior zp = z_posterior_given_d(row.y[l], row.Zh[l], row.Zb[l], d);
      factor = (k == 1) ? zp.mean : zp.var + zp.mean * zp.mean;
    }
    return std::pair<double, double>(lp, factor);
  };
  if (d_is_discrete()) {
    const auto& atoms = d_atoms();
    double lmax = -kInf;
    std::vector<std::pair<double, double>> parts;  // (log weight, factor)
    for (auto& [d, w] : atoms) {
      if (w <= 0) continue;
      auto [lp, factor] = term(d);
      parts.emplace_back(std::log(w) + lp, factor);
      lmax = std::max(lmax, parts.back().first);
    }
    if (lmax == -kInf)
      throw std::runtime_error("fkc: total underflow of the d-integrand");
    double s = 0.0;
    for (auto& [lw, factor] : parts) s += std::exp(lw - lmax) * factor;
    return std::exp(lmax) * s;
  }
  auto [lo, hi] = d_support();
  // locate the log-scale of the integrand first
  double lmax = -kInf;
  const int kScan = 200;
  for (int i = 0; i <= kScan; ++i) {
    const double d = lo + (hi - lo) * i / kScan;
    lmax = std::max(lmax, d_log_density(d) + term(d).first);
  }
  if (lmax == -kInf)
    throw std::runtime_error("fkc: total underflow of the d-integrand");
  const double val = adaptive_quad(
      [&](double d) {
        auto [lp, factor] = term(d);
        return std::exp(d_log_density(d) + lp - lmax) * factor;
      },
      lo, hi, 1e-13);
  return std::exp(lmax) * val;
}

void CalibrationChannel::row_update_generic(const RowContext& row, double* zhat,
                                            double* zbar) const {
  for (int l = 0; l < row.P; ++l) {
    const double f0 = fkc_generic(row, l, 0);
    const double f1 = fkc_generic(row, l, 1);
    const double f2 = fkc_generic(row, l, 2);
    zhat[l] = f1 / f0;
    zbar[l] = std::max(0.0, f2 / f0 - zhat[l] * zhat[l]);
  }
}

// ---------------------------------------------------------------------------
// real gain
// ---------------------------------------------------------------------------

RealGainCalibration::RealGainCalibration(double gen_width, double delta, double widening)
    : gen_width_(gen_width), delta_(delta) {
  if (!(delta > 0))
    throw std::invalid_argument(
        "real-gain calibration needs delta > 0 (use delta = 1e-12 for the "
        "noiseless setting)");
  if (!(gen_width >= 0 && gen_width < 2))
    throw std::invalid_argument("real-gain: width must be in [0, 2)");
  solver_width_ = std::min(widening * gen_width, 1.999);
}

std::pair<double, double> RealGainCalibration::d_support() const {
  return {1.0 - solver_width_ / 2.0, 1.0 + solver_width_ / 2.0};
}

double RealGainCalibration::d_log_density(double) const {
  return -std::log(solver_width_);
}

double RealGainCalibration::log_f0_given_d(double y, double Zh, double Zb,
                                           double d) const {
  // f0 = |d| Normal(y d; Zh, delta + Zb)
  return std::log(std::abs(d)) + log_npdf(y * d, Zh, delta_ + Zb);
}

ZPosterior RealGainCalibration::z_posterior_given_d(double y, double Zh, double Zb,
                                                    double d) const {
  const double V = delta_ + Zb;
  return {(Zh * delta_ + y * d * Zb) / V, delta_ * Zb / V};
}

DPosterior RealGainCalibration::d_posterior(const RowContext& row) const {
  double prec = 0.0, lin = 0.0;
  for (int l = 0; l < row.P; ++l) {
    const double V = delta_ + row.Zb[l];
    prec += row.y[l] * row.y[l] / V;
    lin += row.Zh[l] * row.y[l] / V;
  }
  const double Db = 1.0 / prec;
  const double Dh = Db * lin;
  const auto [lo, hi] = d_support();
  DPosterior out;
  if (row.P + 2 <= 12) {
    // f_k^D = J(P + k, Dh, Db, lo, hi)
    const double j0 = j_integral(row.P, Dh, Db, lo, hi);
    const double j1 = j_integral(row.P + 1, Dh, Db, lo, hi);
    const double j2 = j_integral(row.P + 2, Dh, Db, lo, hi);
    if (j0 > 0) {
      out.dhat = j1 / j0;
      out.dbar = std::max(0.0, j2 / j0 - out.dhat * out.dhat);
      return out;
    }
  }
  // high P or underflowed J: integrate d^{P+k} Normal(d; Dh, Db) directly
  double m0 = 0, m1 = 0, m2 = 0;
  const double width = std::sqrt(Db);
  auto dens = [&](double d) {
    return std::exp(row.P * std::log(std::abs(d)) + log_npdf(d, Dh, Db) -
                    row.P * std::log(std::max(std::abs(Dh), 0.5 * (lo + hi))));
  };
  const double a = std::max(lo, Dh - 14 * width), b = std::min(hi, Dh + 14 * width);
  if (a < b) {
    m0 = adaptive_quad([&](double d) { return dens(d); }, a, b, 1e-14);
    m1 = adaptive_quad([&](double d) { return d * dens(d); }, a, b, 1e-14);
    m2 = adaptive_quad([&](double d) { return d * d * dens(d); }, a, b, 1e-14);
  }
  if (!(m0 > 0)) {  // posterior concentrated outside the clipped range
    out.dhat = std::clamp(Dh, lo, hi);
    out.dbar = 0.0;
    return out;
  }
  out.dhat = m1 / m0;
  out.dbar = std::max(0.0, m2 / m0 - out.dhat * out.dhat);
  return out;
}

void RealGainCalibration::row_update(const RowContext& row, double* zhat, double* zbar,
                                     DPosterior* dpost) const {
  const DPosterior d = d_posterior(row);
  if (dpost) *dpost = d;
  for (int l = 0; l < row.P; ++l) {
    const double Zb = row.Zb[l];
    const double V = delta_ + Zb;
    const double W = delta_ * Zb / V;
    zhat[l] = (delta_ * row.Zh[l] + Zb * row.y[l] * d.dhat) / V;
    zbar[l] = W + Zb * Zb * row.y[l] * row.y[l] * d.dbar / (V * V);
  }
}

void RealGainCalibration::row_g(const RowContext& row, double* gh, double* gb,
                                DPosterior* dpost) const {
  std::vector<double> zh(row.P), zb(row.P);
  row_update(row, zh.data(), zb.data(), dpost);
  z_to_g(row, zh.data(), zb.data(), gh, gb);
}

void RealGainCalibration::sample_row(const double* z, int P, Rng& rng, double* d_out,
                                     double* y_out) const {
  std::uniform_real_distribution<double> ud(1.0 - gen_width_ / 2.0,
                                            1.0 + gen_width_ / 2.0);
  std::normal_distribution<double> noise(0.0, std::sqrt(delta_));
  const double d = ud(rng);
  *d_out = d;
  for (int l = 0; l < P; ++l) y_out[l] = (z[l] + noise(rng)) / d;
}

// ---------------------------------------------------------------------------
// known gain (delta prior)
// ---------------------------------------------------------------------------

namespace {
// marginal channel of a known gain d0: p(y|z) = |d0| Normal(y d0; z, delta)
class ScaledAwgnChannel final : public Channel {
 public:
  ScaledAwgnChannel(double d0, double delta) : d0_(d0), base_(delta) {}
  GPair g(double y, double Zh, double Zb) const override {
    return base_.g(d0_ * y, Zh, Zb);
  }
  ZPosterior z_posterior(double y, double Zh, double Zb) const override {
    return base_.z_posterior(d0_ * y, Zh, Zb);
  }
  double log_f0(double y, double Zh, double Zb) const override {
    return std::log(std::abs(d0_)) + base_.log_f0(d0_ * y, Zh, Zb);
  }
  double sample(double z, Rng& rng) const override {
    return base_.sample(z, rng) / d0_;
  }
  bool gbar_can_be_positive() const override { return false; }

 private:
  double d0_;
  AwgnChannel base_;
};
}  // namespace

KnownGainCalibration::KnownGainCalibration(double d0, double delta)
    : d0_(d0), delta_(delta) {
  if (d0 == 0.0) throw std::invalid_argument("known gain: d0 must be nonzero");
  atoms_ = {{d0, 1.0}};
  marginal_ = std::make_unique<ScaledAwgnChannel>(d0, delta);
}

double KnownGainCalibration::log_f0_given_d(double y, double Zh, double Zb,
                                            double d) const {
  return std::log(std::abs(d)) + log_npdf(y * d, Zh, delta_ + Zb);
}

ZPosterior KnownGainCalibration::z_posterior_given_d(double y, double Zh, double Zb,
                                                     double d) const {
  const double V = delta_ + Zb;
  return {(Zh * delta_ + y * d * Zb) / V, delta_ * Zb / V};
}

void KnownGainCalibration::row_g(const RowContext& row, double* gh, double* gb,
                                 DPosterior* dpost) const {
  if (dpost) *dpost = {d0_, 0.0};
  for (int l = 0; l < row.P; ++l) {
    const GPair gp = marginal_->g(row.y[l], row.Zh[l], row.Zb[l]);
    gh[l] = gp.ghat;
    gb[l] = gp.gbar;
  }
}

void KnownGainCalibration::sample_row(const double* z, int P, Rng& rng, double* d_out,
                                      double* y_out) const {
  std::normal_distribution<double> noise(0.0, std::sqrt(delta_));
  *d_out = d0_;
  for (int l = 0; l < P; ++l)
    y_out[l] = (z[l] + (delta_ > 0 ? noise(rng) : 0.0)) / d0_;
}

// ---------------------------------------------------------------------------
// faulty sensors
// ---------------------------------------------------------------------------

FaultySensorCalibration::FaultySensorCalibration(double f_s, double m_f, double sigma_f)
    : fs_(f_s), mf_(m_f), sf_(sigma_f) {
  if (!(sigma_f > 0)) throw std::invalid_argument("faulty: sigma_f must be > 0");
  if (fs_ < 0 || fs_ > 1) throw std::invalid_argument("faulty: f not in [0,1]");
  atoms_ = {{0.0, fs_}, {1.0, 1.0 - fs_}};
}

double FaultySensorCalibration::log_f0_given_d(double y, double Zh, double Zb,
                                               double d) const {
  return (d == 0.0) ? log_npdf(y, mf_, sf_) : log_npdf(y, Zh, Zb);
}

ZPosterior FaultySensorCalibration::z_posterior_given_d(double y, double Zh, double Zb,
                                                        double d) const {
  // functional sensors are noiseless (y = z); faulty rows carry nothing
  return (d == 0.0) ? ZPosterior{Zh, Zb} : ZPosterior{y, 0.0};
}

void FaultySensorCalibration::row_update(const RowContext& row, double* zhat,
                                         double* zbar, DPosterior* dpost) const {
  double log_pf = (fs_ > 0) ? std::log(fs_) : -kInf;
  double log_pz = (fs_ < 1) ? std::log1p(-fs_) : -kInf;
  for (int m = 0; m < row.P; ++m) {
    log_pf += log_npdf(row.y[m], mf_, sf_);
    log_pz += log_npdf(row.y[m], row.Zh[m], std::max(row.Zb[m], kMinWindowVar));
  }
  const double norm = log_sum_exp(log_pf, log_pz);
  const double wf = std::exp(log_pf - norm);
  const double wz = std::exp(log_pz - norm);
  if (dpost) {
    dpost->dhat = wz;  // d = 1 on functional sensors
    dpost->dbar = std::max(0.0, wz - wz * wz);
  }
  for (int l = 0; l < row.P; ++l) {
    zhat[l] = wf * row.Zh[l] + wz * row.y[l];
    const double m2 = wf * (row.Zh[l] * row.Zh[l] + row.Zb[l]) + wz * row.y[l] * row.y[l];
    zbar[l] = std::max(0.0, m2 - zhat[l] * zhat[l]);
  }
}

void FaultySensorCalibration::row_g(const RowContext& row, double* gh, double* gb,
                                    DPosterior* dpost) const {
  std::vector<double> zh(row.P), zb(row.P);
  row_update(row, zh.data(), zb.data(), dpost);
  z_to_g(row, zh.data(), zb.data(), gh, gb);
}

void FaultySensorCalibration::sample_row(const double* z, int P, Rng& rng,
                                         double* d_out, double* y_out) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(mf_, std::sqrt(sf_));
  const bool faulty = u(rng) < fs_;
  *d_out = faulty ? 0.0 : 1.0;
  for (int l = 0; l < P; ++l) y_out[l] = faulty ? noise(rng) : z[l];
}

// ---------------------------------------------------------------------------
// 1-bit threshold calibration
// ---------------------------------------------------------------------------

Threshold1BitCalibration::Threshold1BitCalibration(
    std::vector<std::pair<double, double>> atoms, double delta)
    : atoms_(std::move(atoms)), delta_(delta) {
  if (atoms_.empty()) throw std::invalid_argument("threshold-1bit: no atoms");
}

double Threshold1BitCalibration::d_prior_mean() const {
  double m = 0.0;
  for (auto& [d, w] : atoms_) m += w * d;
  return m;
}

double Threshold1BitCalibration::log_f0_given_d(double y, double Zh, double Zb,
                                                double d) const {
  // y = sign(z - d + xi): f0 = (1/2) erfc(y (d - Zh)/sqrt(2 (delta + Zb)))
  if (y != 1.0 && y != -1.0)
    throw std::invalid_argument("threshold-1bit: y must be +-1");
  const double s = std::sqrt(delta_ + Zb);
  const double lo = (y > 0) ? (d - Zh) / s : -kInf;
  const double hi = (y > 0) ? kInf : (d - Zh) / s;
  return truncated_std_normal(lo, hi).log_mass;
}

ZPosterior Threshold1BitCalibration::z_posterior_given_d(double y, double Zh, double Zb,
                                                         double d) const {
  const double s2 = delta_ + Zb;
  const double s = std::sqrt(s2);
  const double lo = (y > 0) ? (d - Zh) / s : -kInf;
  const double hi = (y > 0) ? kInf : (d - Zh) / s;
  const TruncatedNormal t = truncated_std_normal(lo, hi);
  ZPosterior zp;
  zp.mean = Zh + Zb / s * t.mean;
  zp.var = Zb * delta_ / s2 + Zb * Zb / s2 * t.var;
  return zp;
}

void Threshold1BitCalibration::row_update(const RowContext& row, double* zhat,
                                          double* zbar, DPosterior* dpost) const {
  const int nd = static_cast<int>(atoms_.size());
  std::vector<double> lw(nd, -kInf);
  double lmax = -kInf;
  for (int i = 0; i < nd; ++i) {
    if (atoms_[i].second <= 0) continue;
    double lp = std::log(atoms_[i].second);
    for (int m = 0; m < row.P; ++m)
      lp += log_f0_given_d(row.y[m], row.Zh[m], row.Zb[m], atoms_[i].first);
    lw[i] = lp;
    lmax = std::max(lmax, lp);
  }
  if (lmax == -kInf)
    throw std::runtime_error("threshold-1bit: total underflow of the atom posterior");
  double norm = 0.0, d1 = 0.0, d2 = 0.0;
  std::vector<double> pi(nd);
  for (int i = 0; i < nd; ++i) {
    pi[i] = std::exp(lw[i] - lmax);
    norm += pi[i];
    d1 += pi[i] * atoms_[i].first;
    d2 += pi[i] * atoms_[i].first * atoms_[i].first;
  }
  if (dpost) {
    dpost->dhat = d1 / norm;
    dpost->dbar = std::max(0.0, d2 / norm - (d1 / norm) * (d1 / norm));
  }
  for (int l = 0; l < row.P; ++l) {
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < nd; ++i) {
      if (pi[i] == 0.0) continue;
      const ZPosterior zp =
          z_posterior_given_d(row.y[l], row.Zh[l], row.Zb[l], atoms_[i].first);
      m1 += pi[i] * zp.mean;
      m2 += pi[i] * (zp.var + zp.mean * zp.mean);
    }
    zhat[l] = m1 / norm;
    zbar[l] = std::max(0.0, m2 / norm - zhat[l] * zhat[l]);
  }
}

void Threshold1BitCalibration::row_g(const RowContext& row, double* gh, double* gb,
                                     DPosterior* dpost) const {
  std::vector<double> zh(row.P), zb(row.P);
  row_update(row, zh.data(), zb.data(), dpost);
  z_to_g(row, zh.data(), zb.data(), gh, gb);
}

void Threshold1BitCalibration::sample_row(const double* z, int P, Rng& rng,
                                          double* d_out, double* y_out) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double pick = u(rng), acc = 0.0;
  double d = atoms_.back().first;
  for (auto& [v, w] : atoms_) {
    acc += w;
    if (pick <= acc) {
      d = v;
      break;
    }
  }
  *d_out = d;
  std::normal_distribution<double> noise(0.0, std::sqrt(delta_));
  for (int l = 0; l < P; ++l) {
    const double w = z[l] - d + (delta_ > 0 ? noise(rng) : 0.0);
    y_out[l] = (w >= 0) ? 1.0 : -1.0;
  }
}

// ---------------------------------------------------------------------------
// complex gain
// ---------------------------------------------------------------------------

ComplexGainCalibration::ComplexGainCalibration(double d_var, double delta)
    : d_var_(d_var), delta_(delta) {
  if (!(delta > 0))
    throw std::invalid_argument("complex-gain calibration needs delta > 0");
}

void ComplexGainCalibration::row_update(const CRowContext& row, cplx* zhat,
                                        double* zbar, CDPosterior* dpost) const {
  double prec = 0.0;
  cplx lin(0.0, 0.0);
  for (int l = 0; l < row.P; ++l) {
    const double V = delta_ + row.Zb[l];
    prec += std::norm(row.y[l]) / V;
    lin += row.Zh[l] * std::conj(row.y[l]) / V;
  }
  const double Db = 1.0 / prec;
  const cplx Dh = Db * lin;
  const double r = std::abs(Dh);
  // the phase prior is flat: dhat takes the phase of Dh, the modulus comes
  // from the J-ratio on [0, inf)
  CDPosterior d;
  const int n0 = std::min(row.P, 10);
  const double j0 = j_integral(n0, r, Db, 0.0, kInf);
  const double j1 = j_integral(n0 + 1, r, Db, 0.0, kInf);
  d.dhat = (r > 0) ? Dh / r * (j1 / j0) : cplx(0.0, 0.0);
  d.dbar = Db;
  if (dpost) *dpost = d;
  for (int l = 0; l < row.P; ++l) {
    const double Zb = row.Zb[l];
    const double V = delta_ + Zb;
    zhat[l] = (delta_ * row.Zh[l] + Zb * row.y[l] * d.dhat) / V;
    zbar[l] = delta_ * Zb / V + Zb * Zb * std::norm(row.y[l]) * d.dbar / (V * V);
  }
}

void ComplexGainCalibration::row_g(const CRowContext& row, cplx* gh, double* gb,
                                   CDPosterior* dpost) const {
  std::vector<cplx> zh(row.P);
  std::vector<double> zb(row.P);
  row_update(row, zh.data(), zb.data(), dpost);
  for (int l = 0; l < row.P; ++l) {
    const double Zb = std::max(row.Zb[l], kMinWindowVar);
    gh[l] = (zh[l] - row.Zh[l]) / Zb;
    gb[l] = (zb[l] - Zb) / (Zb * Zb);
  }
}

void ComplexGainCalibration::sample_row(const cplx* z, int P, Rng& rng, cplx* d_out,
                                        cplx* y_out) const {
  std::normal_distribution<double> gd(0.0, std::sqrt(0.5 * d_var_));
  std::normal_distribution<double> gn(0.0, std::sqrt(0.5 * delta_));
  cplx d(gd(rng), gd(rng));
  while (std::abs(d) < 1e-6) d = cplx(gd(rng), gd(rng));  // 0 excluded from support
  *d_out = d;
  for (int l = 0; l < P; ++l) {
    const cplx xi = delta_ > 0 ? cplx(gn(rng), gn(rng)) : cplx(0.0, 0.0);
    y_out[l] = (z[l] + xi) / d;
  }
}

}  // namespace ampkit
