// ampkit command line: synthetic GLM / bilinear inference runs, state
// evolution, fixed-point scans and phase-diagram sweeps driven by TOML
// configs. See README.md for the config schema.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ampkit/experiments.hpp"
#include "json.hpp"

using namespace ampkit;
using nlohmann::json;

namespace {

json record_json(const RunRecord& rec) {
  json j;
  j["converged"] = rec.converged;
  j["iterations"] = rec.iterations;
  j["mse"] = rec.mse;
  j["nmse"] = rec.nmse;
  j["seed"] = rec.seed;
  j["wall_ms"] = rec.wall_ms;
  if (rec.nmse_d >= 0) j["nmse_d"] = rec.nmse_d;
  if (rec.diverged) j["diverged"] = true;
  if (!rec.ok) j["error"] = rec.error;
  return j;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(path);
    out << j.dump(2) << std::endl;
  }
}

struct RunArgs {
  std::string config;
  std::string json_path;
  std::string trace_path;
  long seed = -1;
  double rho = -1.0;
  double alpha = -1.0;
};

void add_run_command(CLI::App& app, const std::string& name, const std::string& kind,
                     std::shared_ptr<RunArgs> args, int* rc) {
  auto* cmd = app.add_subcommand(name, "run the " + kind + " solver on a synthetic instance");
  cmd->add_option("--config", args->config, "TOML config file")->required();
  cmd->add_option("--seed", args->seed, "override the instance seed");
  cmd->add_option("--rho", args->rho, "override the prior sparsity");
  cmd->add_option("--alpha", args->alpha, "override the measurement rate");
  cmd->add_option("--json", args->json_path, "write the JSON summary here (default stdout)");
  cmd->add_option("--trace", args->trace_path, "write the per-iteration CSV trace here");
  cmd->callback([args, kind, rc]() {
    Config cfg = Config::parse_file(args->config);
    cfg.tables["solver"].kv["kind"] = ConfigValue{kind};
    const double rho = args->rho > 0 ? args->rho
                       : cfg.has_table("prior") ? cfg.table("prior").get_double("rho", -1.0)
                                                : -1.0;
    const double alpha =
        args->alpha > 0 ? args->alpha : cfg.table("model").get_double("alpha");
    const std::uint64_t seed =
        args->seed >= 0 ? args->seed
                        : static_cast<std::uint64_t>(cfg.table("model").get_int("seed", 1));
    RunRecord rec;
    if (args->trace_path.empty()) {
      rec = run_once(cfg, rho, alpha, seed);
    } else {
      std::vector<TracePoint> trace;
      rec = run_once_traced(cfg, rho, alpha, seed, &trace);
      write_trace_csv(trace, args->trace_path);
    }
    emit(record_json(rec), args->json_path);
    if (!rec.ok) *rc = 1;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ampkit: AMP-family solvers and state-evolution engines"};
  app.require_subcommand(1);
  int rc = 0;

  for (const auto& [name, kind] :
       std::vector<std::pair<std::string, std::string>>{{"run-gamp", "gamp"},
                                                        {"run-cgamp", "cgamp"},
                                                        {"run-calamp", "calamp"},
                                                        {"run-pbigamp", "pbigamp"},
                                                        {"run-ist", "ist"},
                                                        {"run-pf", "pf"}})
    add_run_command(app, name, kind, std::make_shared<RunArgs>(), &rc);

  // ---- sweep ----
  auto sweep_cfg = std::make_shared<std::string>();
  auto sweep_out = std::make_shared<std::string>();
  {
    auto* cmd = app.add_subcommand("sweep", "phase-diagram sweep over a (rho, alpha) grid");
    cmd->add_option("--config", *sweep_cfg, "TOML config file")->required();
    cmd->add_option("--out", *sweep_out, "per-run CSV output (cells go to <out>.cells.csv)")
        ->required();
    cmd->callback([sweep_cfg, sweep_out]() {
      Config cfg = Config::parse_file(*sweep_cfg);
      SweepResult res = sweep(cfg);
      write_sweep_csv(res, *sweep_out);
      std::cout << "wrote " << res.rows.size() << " runs over " << res.cells.size()
                << " cells to " << *sweep_out << std::endl;
    });
  }

  // ---- dynamics ----
  auto dyn_cfg = std::make_shared<std::string>();
  auto dyn_out = std::make_shared<std::string>();
  {
    auto* cmd = app.add_subcommand("dynamics",
                                   "per-iteration solver MSE vs the state-evolution trajectory");
    cmd->add_option("--config", *dyn_cfg, "TOML config file")->required();
    cmd->add_option("--out", *dyn_out, "CSV output")->required();
    cmd->callback([dyn_cfg, dyn_out]() {
      Config cfg = Config::parse_file(*dyn_cfg);
      write_dynamics_csv(dynamics_compare(cfg), *dyn_out);
      std::cout << "wrote " << *dyn_out << std::endl;
    });
  }

  // ---- se-run ----
  struct SeArgs {
    std::string model = "cs-glm";
    std::string config;
    std::string out;
    std::string json_path;
  };
  auto se_args = std::make_shared<SeArgs>();
  {
    auto* cmd = app.add_subcommand("se-run", "iterate a state-evolution map");
    cmd->add_option("--model", se_args->model, "cs-glm | complex-cs | mcs-symmetric");
    cmd->add_option("--config", se_args->config, "TOML config file")->required();
    cmd->add_option("--out", se_args->out, "trajectory CSV");
    cmd->add_option("--json", se_args->json_path, "JSON summary (default stdout)");
    cmd->callback([se_args]() {
      Config cfg = Config::parse_file(se_args->config);
      const ConfigTable& se = cfg.table("se");
      json j;
      std::ofstream csv;
      if (!se_args->out.empty()) csv.open(se_args->out);
      if (se_args->model == "cs-glm") {
        auto prior = make_prior(cfg.table("prior"));
        auto channel = make_channel(cfg.table("channel"));
        auto traj = se_glm_bo(*prior, *channel, se.get_double("alpha"),
                              se.get_double("m0", se_uninformed_m0(*prior)));
        if (csv.is_open()) {
          csv << "iter,m,mhat,mse_mean,mse_sample\n";
          for (size_t i = 0; i < traj.steps.size(); ++i)
            csv << i << ',' << traj.steps[i].m << ',' << traj.steps[i].mhat << ','
                << traj.steps[i].mse_mean << ',' << traj.steps[i].mse_sample << '\n';
        }
        j["converged"] = traj.converged;
        j["iterations"] = traj.steps.size() - 1;
        j["m"] = traj.steps.back().m;
        j["mse_mean"] = traj.steps.back().mse_mean;
        j["mse_sample"] = traj.steps.back().mse_sample;
      } else if (se_args->model == "complex-cs") {
        auto prior = make_complex_prior(cfg.table("prior"));
        auto traj = se_complex_cs(*prior, se.get_double("alpha"), se.get_double("delta"),
                                  se.get_double("E0", prior->variance()));
        if (csv.is_open()) {
          csv << "iter,E\n";
          for (size_t i = 0; i < traj.E.size(); ++i) csv << i << ',' << traj.E[i] << '\n';
        }
        j["converged"] = traj.converged;
        j["iterations"] = traj.E.size() - 1;
        j["E"] = traj.E.back();
      } else if (se_args->model == "mcs-symmetric") {
        const double rho = se.get_double("rho");
        auto traj = se_mcs_symmetric(rho, se.get_double("alpha"), se.get_double("delta"),
                                     se.get_double("m0", rho * 1e-6));
        if (csv.is_open()) {
          csv << "iter,m,nmse\n";
          for (size_t i = 0; i < traj.m.size(); ++i)
            csv << i << ',' << traj.m[i] << ',' << mcs_nmse_of_m(traj.m[i], rho) << '\n';
        }
        j["converged"] = traj.converged;
        j["iterations"] = traj.m.size() - 1;
        j["m"] = traj.m.back();
        j["nmse"] = mcs_nmse_of_m(traj.m.back(), rho);
      } else {
        throw CLI::ValidationError("unknown --model " + se_args->model);
      }
      emit(j, se_args->json_path);
    });
  }

  // ---- se-fixed-points ----
  auto fp_args = std::make_shared<SeArgs>();
  {
    auto* cmd = app.add_subcommand("se-fixed-points",
                                   "scan a state-evolution map for fixed points");
    cmd->add_option("--model", fp_args->model, "mcs-symmetric | cs-glm");
    cmd->add_option("--config", fp_args->config, "TOML config file")->required();
    cmd->add_option("--out", fp_args->out, "grid CSV (m,map_m,phi,stability)");
    cmd->add_option("--json", fp_args->json_path, "JSON summary (default stdout)");
    cmd->callback([fp_args]() {
      Config cfg = Config::parse_file(fp_args->config);
      const ConfigTable& se = cfg.table("se");
      const double alpha = se.get_double("alpha");
      const double delta = se.get_double("delta");
      const int n = static_cast<int>(se.get_int("grid_n", 400));
      std::function<double(double)> map;
      std::function<double(double)> phi;
      double m_min = 0.0, m_max = 0.0;
      std::unique_ptr<Prior> prior;
      std::unique_ptr<Channel> channel;
      if (fp_args->model == "mcs-symmetric") {
        const double rho = se.get_double("rho");
        map = se_mcs_symmetric_map(rho, alpha, delta);
        phi = [rho, alpha, delta](double m) {
          return free_entropy_mcs_symmetric(rho, alpha, delta, m);
        };
        m_max = rho * (1.0 - 1e-9);
      } else if (fp_args->model == "cs-glm") {
        prior = make_prior(cfg.table("prior"));
        channel = make_channel(cfg.table("channel"));
        const Prior* pp = prior.get();
        const Channel* pc = channel.get();
        static const QuadratureRule rule = gauss_hermite(kSeHermiteOrder);
        const double q0 = prior->variance();
        map = [pp, pc, alpha, q0](double m) {
          return se_overlap(*pp, alpha * pc->se_mhat_kernel(m, q0, rule));
        };
        phi = [pp, alpha, delta](double m) {
          return free_entropy_cs(*pp, alpha, delta, m);
        };
        m_min = 1e-9 * q0;
        m_max = q0 * (1.0 - 1e-9);
      } else {
        throw CLI::ValidationError("unknown --model " + fp_args->model);
      }
      auto fps = fixed_point_scan(map, m_min, m_max, n);
      if (!fp_args->out.empty()) {
        std::ofstream csv(fp_args->out);
        csv << "m,map_m,phi,stability\n";
        for (int i = 0; i <= n; ++i) {
          const double m = m_min + (m_max - m_min) * i / n;
          std::string label;
          for (const auto& fp : fps)
            if (std::abs(fp.location - m) <= 0.5 * (m_max - m_min) / n)
              label = fp.stability == Stability::stable
                          ? "stable"
                          : (fp.stability == Stability::unstable ? "unstable" : "marginal");
          double ph = 0.0;
          try {
            ph = phi(m);
          } catch (const std::exception&) {
            ph = std::numeric_limits<double>::quiet_NaN();
          }
          csv << m << ',' << map(m) << ',' << ph << ',' << label << '\n';
        }
      }
      json j;
      j["fixed_points"] = json::array();
      for (const auto& fp : fps) {
        json f;
        f["m"] = fp.location;
        f["slope"] = fp.slope;
        f["stability"] = fp.stability == Stability::stable
                             ? "stable"
                             : (fp.stability == Stability::unstable ? "unstable" : "marginal");
        j["fixed_points"].push_back(f);
      }
      emit(j, fp_args->json_path);
    });
  }

  // ---- free-entropy ----
  auto fe_args = std::make_shared<SeArgs>();
  {
    auto* cmd = app.add_subcommand("free-entropy", "tabulate the free entropy over m");
    cmd->add_option("--model", fe_args->model, "cs-glm | mcs-symmetric");
    cmd->add_option("--config", fe_args->config, "TOML config file")->required();
    cmd->add_option("--out", fe_args->out, "CSV output (m, phi)")->required();
    cmd->callback([fe_args]() {
      Config cfg = Config::parse_file(fe_args->config);
      const ConfigTable& se = cfg.table("se");
      const double alpha = se.get_double("alpha");
      const double delta = se.get_double("delta");
      const int n = static_cast<int>(se.get_int("grid_n", 200));
      std::ofstream csv(fe_args->out);
      csv << "m,phi\n";
      if (fe_args->model == "mcs-symmetric") {
        const double rho = se.get_double("rho");
        for (int i = 0; i <= n; ++i) {
          const double m = rho * (1.0 - 1e-9) * i / n;
          csv << m << ',' << free_entropy_mcs_symmetric(rho, alpha, delta, m) << '\n';
        }
      } else if (fe_args->model == "cs-glm") {
        auto prior = make_prior(cfg.table("prior"));
        const double q0 = prior->variance();
        for (int i = 0; i <= n; ++i) {
          const double m = q0 * (1.0 - 1e-9) * i / n;
          csv << m << ',' << free_entropy_cs(*prior, alpha, delta, m) << '\n';
        }
      } else {
        throw CLI::ValidationError("unknown --model " + fe_args->model);
      }
    });
  }

  CLI11_PARSE(app, argc, argv);
  return rc;
}
