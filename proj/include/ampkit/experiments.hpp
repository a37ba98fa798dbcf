#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ampkit/config.hpp"
#include "ampkit/solver.hpp"
#include "ampkit/state_evolution.hpp"

namespace ampkit {

// config-table factories (External Interfaces of the prior/channel modules)
std::unique_ptr<Prior> make_prior(const ConfigTable& t);
std::unique_ptr<ComplexPrior> make_complex_prior(const ConfigTable& t);
std::unique_ptr<Channel> make_channel(const ConfigTable& t);
std::unique_ptr<ComplexChannel> make_complex_channel(const ConfigTable& t);
// rho_hint resolves sigma_f = "rho" in the faulty-sensor block
std::unique_ptr<CalibrationChannel> make_calibration(const ConfigTable& t,
                                                     double rho_hint);
SolverOptions make_solver_options(const ConfigTable& t);

struct RunRecord {
  bool ok = true;
  std::string error;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double mse = -1.0;
  double nmse = -1.0;
  double nmse_d = -1.0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

// one solver or SE run at the given (rho, alpha); seed replaces the config's
RunRecord run_once(const Config& cfg, double rho, double alpha, std::uint64_t seed);
// run with trace output (iter, mse, nmse, var_norm rows)
RunRecord run_once_traced(const Config& cfg, double rho, double alpha,
                          std::uint64_t seed, std::vector<TracePoint>* trace);

struct SweepRow {
  double rho = 0.0, alpha = 0.0;
  int replicate = 0;
  RunRecord rec;
  bool success = false;
};

struct SweepCell {
  double rho = 0.0, alpha = 0.0;
  int n = 0;
  double success_fraction = 0.0;
  double median_metric = 0.0;
  double iter_mean = 0.0;
  int iter_max = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;    // |rho| x |alpha| x seeds entries
  std::vector<SweepCell> cells;  // one per (rho, alpha)
};

SweepResult sweep(const Config& cfg);
void write_sweep_csv(const SweepResult& s, const std::string& rows_path);

struct DynamicsRow {
  int iter = 0;
  double algo_mse_mean = 0.0;
  double algo_mse_std = 0.0;
  double se_mse = 0.0;
};
std::vector<DynamicsRow> dynamics_compare(const Config& cfg);
void write_dynamics_csv(const std::vector<DynamicsRow>& rows, const std::string& path);

void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path);

// grid of (rho, alpha) pairs from the [grid] table (lists or min/max/step)
std::vector<double> grid_axis(const ConfigTable& t, const std::string& name);

}  // namespace ampkit
