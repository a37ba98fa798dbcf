#include "ampkit/experiments.hpp"

#include "ampkit/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ampkit {

namespace {
double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

std::unique_ptr<Prior> make_prior(const ConfigTable& t) {
  const std::string kind = t.get_string("kind");
  if (kind == "gauss-bernoulli") {
    GaussBernoulliParams p;
    p.rho = t.get_double("rho");
    p.comp_mean = t.get_double("mean", 0.0);
    p.comp_var = t.get_double("var", 1.0);
    return std::make_unique<GaussBernoulliPrior>(p);
  }
  if (kind == "discrete") {
    DiscreteAtomsParams p;
    for (const auto& pair : t.at("atoms").as_array()) {
      const auto& a = pair.as_array();
      if (a.size() != 2) throw std::runtime_error("discrete prior: atoms must be [value, weight] pairs");
      p.atoms.emplace_back(a[0].as_double(), a[1].as_double());
    }
    return std::make_unique<DiscreteAtomsPrior>(p);
  }
  if (kind == "soft-threshold")
    return std::make_unique<SoftThresholdPrior>(t.get_double("q0", 1.0));
  throw std::runtime_error("unknown prior kind '" + kind + "'");
}

std::unique_ptr<ComplexPrior> make_complex_prior(const ConfigTable& t) {
  const std::string kind = t.get_string("kind");
  if (kind == "complex-gb")
    return std::make_unique<ComplexGaussBernoulliPrior>(t.get_double("rho"));
  if (kind == "soft-threshold")
    return std::make_unique<ComplexSoftThresholdPrior>(t.get_double("q0", 1.0));
  throw std::runtime_error("unknown complex prior kind '" + kind + "'");
}

std::unique_ptr<Channel> make_channel(const ConfigTable& t) {
  const std::string kind = t.get_string("kind");
  if (kind == "awgn") return std::make_unique<AwgnChannel>(t.get_double("delta"));
  if (kind == "one-bit")
    return std::make_unique<QuantizedChannel>(one_bit_spec(t.get_double("delta")));
  if (kind == "quantized") {
    QuantizerSpec spec;
    spec.thresholds = t.get_double_array("thresholds");
    spec.levels = t.get_double_array("levels");
    spec.delta = t.get_double("delta");
    return std::make_unique<QuantizedChannel>(spec);
  }
  throw std::runtime_error("unknown channel kind '" + kind + "'");
}

std::unique_ptr<ComplexChannel> make_complex_channel(const ConfigTable& t) {
  const std::string kind = t.get_string("kind");
  if (kind == "awgn") return std::make_unique<ComplexAwgnChannel>(t.get_double("delta"));
  if (kind == "phase-retrieval")
    return std::make_unique<PhaseRetrievalChannel>(t.get_double("delta"));
  throw std::runtime_error("unknown complex channel kind '" + kind + "'");
}

std::unique_ptr<CalibrationChannel> make_calibration(const ConfigTable& t,
                                                     double rho_hint) {
  const std::string kind = t.get_string("kind");
  if (kind == "real-gain")
    return std::make_unique<RealGainCalibration>(t.get_double("width"),
                                                 t.get_double("delta"),
                                                 t.get_double("widening", 1.1));
  if (kind == "known-gain")
    return std::make_unique<KnownGainCalibration>(t.get_double("d0", 1.0),
                                                  t.get_double("delta"));
  if (kind == "faulty") {
    double sf;
    if (t.has("sigma_f") && std::holds_alternative<std::string>(t.at("sigma_f").v)) {
      if (t.get_string("sigma_f") != "rho")
        throw std::runtime_error("faulty: sigma_f must be a number or \"rho\"");
      sf = rho_hint;
    } else {
      sf = t.get_double("sigma_f");
    }
    return std::make_unique<FaultySensorCalibration>(t.get_double("f"),
                                                     t.get_double("m_f", 0.0), sf);
  }
  if (kind == "threshold-1bit") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& pair : t.at("atoms").as_array()) {
      const auto& a = pair.as_array();
      atoms.emplace_back(a[0].as_double(), a[1].as_double());
    }
    return std::make_unique<Threshold1BitCalibration>(std::move(atoms),
                                                      t.get_double("delta"));
  }
  throw std::runtime_error("unknown calibration kind '" + kind + "'");
}

SolverOptions make_solver_options(const ConfigTable& t) {
  SolverOptions o;
  o.max_iters = static_cast<int>(t.get_int("max_iters", o.max_iters));
  o.tol = t.get_double("tol", o.tol);
  o.damping = t.get_double("damping", 1.0);
  const std::string dp = t.get_string("damping_policy", "none");
  if (dp == "none")
    o.damp_policy = DampPolicy::none;
  else if (dp == "single")
    o.damp_policy = DampPolicy::single_xhat;
  else if (dp == "pair")
    o.damp_policy = DampPolicy::mean_var_pair;
  else
    throw std::runtime_error("unknown damping_policy '" + dp + "'");
  o.variance_floor = t.get_double("variance_floor", o.variance_floor);
  o.clamp_policy = t.get_string("variance_clamp", "floor") == "abort"
                       ? ClampPolicy::abort
                       : ClampPolicy::floor;
  o.init = t.get_string("init", "prior-mean") == "random" ? InitPolicy::random
                                                          : InitPolicy::prior_mean;
  o.bayes_optimal = t.get_bool("bayes_optimal", true);
  o.restarts = static_cast<int>(t.get_int("restarts", 0));
  return o;
}

// ---------------------------------------------------------------------------
// single runs
// ---------------------------------------------------------------------------

namespace {

RunRecord dispatch(const Config& cfg, double rho, double alpha, std::uint64_t seed,
                   std::vector<TracePoint>* trace_out) {
  RunRecord rec;
  rec.seed = seed;
  const double t0 = now_ms();
  const ConfigTable& model = cfg.table("model");
  const std::string kind = cfg.table("solver").get_string("kind");
  SolverOptions opts = make_solver_options(cfg.table("solver"));
  opts.record_trace = trace_out != nullptr;
  opts.init_seed = seed;

  auto prior_table = [&] {
    ConfigTable t = cfg.table("prior");
    if (rho > 0) t.kv["rho"] = ConfigValue{rho};
    return t;
  };

  if (kind == "gamp" || kind == "ist") {
    const int n = static_cast<int>(model.get_int("n"));
    auto prior = make_prior(prior_table());
    auto channel = make_channel(cfg.table("channel"));
    GlmInstance inst = generate_glm(*prior, *channel, n, alpha, seed);
    SolverResult r;
    if (kind == "gamp") {
      r = gamp_run(inst, *prior, *channel, opts);
    } else {
      IstThreshold th;
      const std::string tk = cfg.table("solver").get_string("threshold", "soft");
      if (tk == "hard") {
        th.kind = IstThreshold::Kind::hard;
        long k = cfg.table("solver").get_int("k", -1);
        th.k = k > 0 ? static_cast<int>(k) : static_cast<int>(std::lround(rho * n));
      } else {
        th.kind = IstThreshold::Kind::soft;
        th.lambda = cfg.table("solver").get_double("lambda", 0.1);
      }
      r = ist_run(inst, th, cfg.table("solver").get_double("mu", 1.0), opts);
    }
    rec.converged = r.converged;
    rec.diverged = r.diverged;
    rec.iterations = r.iterations;
    rec.mse = r.final_mse;
    rec.nmse = r.final_nmse;
    if (trace_out) *trace_out = std::move(r.trace);
  } else if (kind == "cgamp") {
    const int n = static_cast<int>(model.get_int("n"));
    auto prior = make_complex_prior(prior_table());
    auto channel = make_complex_channel(cfg.table("channel"));
    CGlmInstance inst = generate_glm(*prior, *channel, n, alpha, seed);
    SolverResult r = cgamp_run(inst, *prior, *channel, opts);
    rec.converged = r.converged;
    rec.diverged = r.diverged;
    rec.iterations = r.iterations;
    rec.mse = r.final_mse;
    rec.nmse = r.final_nmse;
    if (trace_out) *trace_out = std::move(r.trace);
  } else if (kind == "calamp") {
    const int n = static_cast<int>(model.get_int("n"));
    const int p = static_cast<int>(model.get_int("p", 1));
    auto prior = make_prior(prior_table());
    auto calib = make_calibration(cfg.table("calibration"), rho);
    CalInstance inst = generate_calibration(*prior, *calib, n, alpha, p, seed);
    SolverResult r = calamp_run(inst, *prior, *calib, opts);
    rec.converged = r.converged;
    rec.diverged = r.diverged;
    rec.iterations = r.iterations;
    rec.mse = r.final_mse;
    rec.nmse = r.final_nmse;
    if (!r.dhat.empty()) rec.nmse_d = nmse(r.dhat, inst.d_truth);
    if (trace_out) *trace_out = std::move(r.trace);
  } else if (kind == "pbigamp" || kind == "pf") {
    const int m = static_cast<int>(model.get_int("m"));
    const int p = static_cast<int>(model.get_int("p"));
    const int r_rank = static_cast<int>(model.get_int("r", 1));
    const int l = static_cast<int>(std::lround(alpha * r_rank * (m + p)));
    ConfigTable ut = cfg.tables.count("prior_u") ? cfg.table("prior_u") : prior_table();
    ConfigTable vt = cfg.tables.count("prior_v") ? cfg.table("prior_v") : prior_table();
    if (rho > 0) {
      ut.kv["rho"] = ConfigValue{rho};
      vt.kv["rho"] = ConfigValue{rho};
    }
    auto pu = make_prior(ut);
    auto pv = make_prior(vt);
    auto channel = make_channel(cfg.table("channel"));
    McsInstance inst = generate_mcs(*pu, *pv, *channel, r_rank, m, p, l, seed);
    SolverResult r = (kind == "pbigamp") ? pbigamp_run(inst, *pu, *pv, *channel, opts)
                                         : power_factorization_run(inst, opts);
    rec.converged = r.converged;
    rec.diverged = r.diverged;
    rec.iterations = r.iterations;
    rec.mse = r.final_mse;
    rec.nmse = r.final_nmse;
    if (trace_out) *trace_out = std::move(r.trace);
  } else if (kind == "se-glm") {
    auto prior = make_prior(prior_table());
    auto channel = make_channel(cfg.table("channel"));
    const double m0 = cfg.table("solver").get_double("m0", se_uninformed_m0(*prior));
    auto traj = se_glm_bo(*prior, *channel, alpha, m0, 1e-12,
                          static_cast<int>(cfg.table("solver").get_int("max_iters", 2000)));
    rec.converged = traj.converged;
    rec.iterations = static_cast<int>(traj.steps.size()) - 1;
    rec.mse = traj.steps.back().mse_mean;
    rec.nmse = traj.steps.back().mse_mean / traj.q0;
  } else if (kind == "se-mcs-symmetric") {
    const double delta = cfg.table("channel").get_double("delta");
    const double m0 = cfg.table("solver").get_double("m0", rho * 1e-6);
    auto traj = se_mcs_symmetric(rho, alpha, delta, m0);
    rec.converged = traj.converged;
    rec.iterations = static_cast<int>(traj.m.size()) - 1;
    rec.nmse = mcs_nmse_of_m(traj.m.back(), rho);
    rec.mse = rec.nmse * rho;
  } else if (kind == "se-complex") {
    auto prior = make_complex_prior(prior_table());
    const double delta = cfg.table("channel").get_double("delta");
    const double E0 = cfg.table("solver").get_double("E0", prior->variance());
    auto traj = se_complex_cs(*prior, alpha, delta, E0);
    rec.converged = traj.converged;
    rec.iterations = static_cast<int>(traj.E.size()) - 1;
    rec.mse = traj.E.back();
    rec.nmse = traj.E.back() / prior->variance();
  } else {
    throw std::runtime_error("unknown solver kind '" + kind + "'");
  }
  rec.wall_ms = now_ms() - t0;
  return rec;
}

}  // namespace

RunRecord run_once(const Config& cfg, double rho, double alpha, std::uint64_t seed) {
  try {
    return dispatch(cfg, rho, alpha, seed, nullptr);
  } catch (const std::exception& e) {
    RunRecord rec;
    rec.ok = false;
    rec.error = e.what();
    rec.seed = seed;
    return rec;
  }
}

RunRecord run_once_traced(const Config& cfg, double rho, double alpha,
                          std::uint64_t seed, std::vector<TracePoint>* trace) {
  return dispatch(cfg, rho, alpha, seed, trace);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

std::vector<double> grid_axis(const ConfigTable& t, const std::string& name) {
  if (t.has(name)) return t.get_double_array(name);
  const double lo = t.get_double(name + "_min");
  const double hi = t.get_double(name + "_max");
  const double step = t.get_double(name + "_step");
  if (!(step > 0) || !(hi >= lo)) throw std::runtime_error("bad grid bounds for " + name);
  std::vector<double> out;
  for (double x = lo; x <= hi + 0.5 * step; x += step) out.push_back(x);
  return out;
}

SweepResult sweep(const Config& cfg) {
  const ConfigTable& grid = cfg.table("grid");
  const std::vector<double> rhos = grid_axis(grid, "rho");
  const std::vector<double> alphas = grid_axis(grid, "alpha");
  const int seeds = static_cast<int>(grid.get_int("seeds", 1));
  const std::uint64_t base = static_cast<std::uint64_t>(grid.get_int("base_seed", 1));
  if (rhos.empty() || alphas.empty() || seeds < 1)
    throw std::runtime_error("sweep: empty grid");

  const std::string kind = cfg.table("solver").get_string("kind");
  const bool is_se = kind.rfind("se-", 0) == 0;
  double thr = is_se ? 1e-10 : 1e-6;
  std::string metric = "nmse";
  if (cfg.has_table("output")) {
    thr = cfg.table("output").get_double("success_threshold", thr);
    metric = cfg.table("output").get_string("success_metric", metric);
  }

  SweepResult out;
  const size_t total = rhos.size() * alphas.size() * seeds;
  out.rows.resize(total);
#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    const int rep = static_cast<int>(idx % seeds);
    const size_t cell = static_cast<size_t>(idx) / seeds;
    const size_t ia = cell % alphas.size();
    const size_t ir = cell / alphas.size();
    SweepRow row;
    row.rho = rhos[ir];
    row.alpha = alphas[ia];
    row.replicate = rep;
    row.rec = run_once(cfg, row.rho, row.alpha, derive_seed(base, ir, ia, rep));
    const double val = (metric == "mse") ? row.rec.mse : row.rec.nmse;
    row.success = row.rec.ok && !row.rec.diverged && val >= 0 && val < thr;
    out.rows[idx] = std::move(row);
  }

  for (size_t ir = 0; ir < rhos.size(); ++ir)
    for (size_t ia = 0; ia < alphas.size(); ++ia) {
      SweepCell c;
      c.rho = rhos[ir];
      c.alpha = alphas[ia];
      std::vector<double> metrics;
      long iter_sum = 0;
      for (int rep = 0; rep < seeds; ++rep) {
        const SweepRow& row = out.rows[(ir * alphas.size() + ia) * seeds + rep];
        c.n++;
        c.success_fraction += row.success ? 1.0 : 0.0;
        metrics.push_back(metric == "mse" ? row.rec.mse : row.rec.nmse);
        iter_sum += row.rec.iterations;
        c.iter_max = std::max(c.iter_max, row.rec.iterations);
      }
      c.success_fraction /= c.n;
      c.iter_mean = double(iter_sum) / c.n;
      std::sort(metrics.begin(), metrics.end());
      c.median_metric = metrics[metrics.size() / 2];
      out.cells.push_back(c);
    }
  return out;
}

void write_sweep_csv(const SweepResult& s, const std::string& rows_path) {
  std::ofstream rows(rows_path);
  rows << "rho,alpha,replicate,seed,status,converged,iterations,mse,nmse,success\n";
  for (const auto& r : s.rows) {
    rows << r.rho << ',' << r.alpha << ',' << r.replicate << ',' << r.rec.seed << ','
         << (r.rec.ok ? (r.rec.diverged ? "diverged" : "ok") : "error") << ','
         << (r.rec.converged ? 1 : 0) << ',' << r.rec.iterations << ',' << r.rec.mse
         << ',' << r.rec.nmse << ',' << (r.success ? 1 : 0) << '\n';
  }
  std::ofstream cells(rows_path + ".cells.csv");
  cells << "rho,alpha,n,success_fraction,median_metric,iter_mean,iter_max\n";
  for (const auto& c : s.cells) {
    cells << c.rho << ',' << c.alpha << ',' << c.n << ',' << c.success_fraction << ','
          << c.median_metric << ',' << c.iter_mean << ',' << c.iter_max << '\n';
  }
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

std::vector<DynamicsRow> dynamics_compare(const Config& cfg) {
  const ConfigTable& dyn = cfg.table("dynamics");
  const int seeds = static_cast<int>(dyn.get_int("seeds", 5));
  const std::uint64_t base = static_cast<std::uint64_t>(dyn.get_int("base_seed", 7));
  const double rho = cfg.table("prior").get_double("rho");
  const double alpha = dyn.get_double("alpha");

  std::vector<std::vector<TracePoint>> traces(seeds);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < seeds; ++s) {
    RunRecord rec = run_once_traced(cfg, rho, alpha, derive_seed(base, s), &traces[s]);
    if (!rec.ok) traces[s].clear();
  }

  auto prior = make_prior(cfg.table("prior"));
  auto channel = make_channel(cfg.table("channel"));
  auto se = se_glm_bo(*prior, *channel, alpha, se_uninformed_m0(*prior), 1e-14, 400);

  size_t iters = 0;
  for (auto& t : traces) iters = std::max(iters, t.size());
  std::vector<DynamicsRow> rows;
  for (size_t k = 0; k < iters; ++k) {
    DynamicsRow row;
    row.iter = static_cast<int>(k + 1);
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (auto& t : traces)
      if (k < t.size()) {
        sum += t[k].mse;
        sum2 += t[k].mse * t[k].mse;
        ++n;
      }
    if (n == 0) break;
    row.algo_mse_mean = sum / n;
    row.algo_mse_std = std::sqrt(std::max(0.0, sum2 / n - row.algo_mse_mean * row.algo_mse_mean));
    // the trace point after iteration k+1 corresponds to SE step k+1
    const size_t se_idx = std::min(k + 1, se.steps.size() - 1);
    row.se_mse = se.steps[se_idx].mse_mean;
    rows.push_back(row);
  }
  return rows;
}

void write_dynamics_csv(const std::vector<DynamicsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "iter,algo_mse_mean,algo_mse_std,se_mse\n";
  for (const auto& r : rows)
    out << r.iter << ',' << r.algo_mse_mean << ',' << r.algo_mse_std << ',' << r.se_mse
        << '\n';
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path) {
  std::ofstream out(path);
  out << "iter,mse,nmse,var_norm\n";
  for (size_t i = 0; i < trace.size(); ++i)
    out << (i + 1) << ',' << trace[i].mse << ',' << trace[i].nmse << ','
        << trace[i].var_norm << '\n';
}

}  // namespace ampkit
