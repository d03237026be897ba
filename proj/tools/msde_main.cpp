#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msde/common.hpp"
#include "msde/csv.hpp"
#include "msde/estimate.hpp"
#include "msde/mc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace msde;

struct Overrides {
  std::optional<double> epsilon, delta, gamma, theta_true, T, step, target_error, x0;
  std::optional<int> regime, M, stride, bins;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, kind;
  bool allow_coarse = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--epsilon", ov.epsilon, "override scale.epsilon");
  cmd->add_option("--delta", ov.delta, "override scale.delta");
  cmd->add_option("--gamma", ov.gamma, "override scale.gamma");
  cmd->add_option("--regime", ov.regime, "override scale.regime (1|2|3)");
  cmd->add_option("--theta-true", ov.theta_true, "override run.theta_true");
  cmd->add_option("--T", ov.T, "override run.T");
  cmd->add_option("--step", ov.step, "override run.step");
  cmd->add_option("--target-error", ov.target_error, "override run.target_error");
  cmd->add_option("--x0", ov.x0, "override run.x0");
  cmd->add_option("--seed", ov.seed, "override run.seed");
  cmd->add_option("--M", ov.M, "override run.M");
  cmd->add_option("--kind", ov.kind, "likelihood kind: exact|pseudo");
  cmd->add_option("--out-dir", ov.out_dir, "override output.directory");
  cmd->add_option("--stride", ov.stride, "override output.stride");
  cmd->add_option("--bins", ov.bins, "override output.bins");
  cmd->add_flag("--allow-coarse-step", ov.allow_coarse, "permit steps above the bound");
}

ExperimentConfig load_config(const std::string& file, const Overrides& ov) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(file);
  if (ov.epsilon) cfg.epsilon = *ov.epsilon;
  if (ov.delta) cfg.delta = *ov.delta;
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.regime) cfg.regime = regime_from_int(*ov.regime);
  if (ov.theta_true) cfg.theta_true = *ov.theta_true;
  if (ov.T) cfg.horizon = *ov.T;
  if (ov.step) cfg.step = *ov.step;
  if (ov.target_error) cfg.target_error = *ov.target_error;
  if (ov.x0) cfg.x0 = *ov.x0;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.M) cfg.replications = *ov.M;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.stride) cfg.store_stride = *ov.stride;
  if (ov.bins) cfg.bins = *ov.bins;
  if (ov.allow_coarse) cfg.allow_coarse_step = true;
  if (ov.kind) {
    if (*ov.kind == "exact") cfg.kind = LikelihoodKind::exact;
    else if (*ov.kind == "pseudo") cfg.kind = LikelihoodKind::pseudo;
    else throw config_error("--kind must be exact or pseudo");
  }
  cfg.validate();
  return cfg;
}

int resolve_workers(std::optional<int> flag) {
  if (flag && *flag >= 1) return *flag;
  if (const char* env = std::getenv("MSDE_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_simulate(const std::string& config_file, const Overrides& ov,
                 const std::string& out_file) {
  ExperimentConfig cfg = load_config(config_file, ov);
  const ModelSpec model = cfg.make_model();
  const ScaleParams scale = cfg.make_scale();
  SimConfig sim = cfg.make_sim_config();
  const double bound = step_bound(scale, cfg.target_error);
  std::cout << "model=" << model.name << " regime=" << regime_name(scale.regime)
            << " epsilon=" << format_double(scale.epsilon)
            << " delta=" << format_double(scale.delta) << "\n";
  std::cout << "step=" << format_double(sim.step) << " (bound " << format_double(bound)
            << " at target error " << format_double(cfg.target_error) << ")\n";
  const Path path = simulate_euler(model, scale, cfg.theta_true, sim);
  const std::string file = out_file.empty() ? out_path(cfg, "path.csv") : out_file;
  write_path_csv(path, file);
  std::cout << "wrote " << file << " (" << path.values.size() << " samples, stride "
            << sim.store_stride << ")\n";
  return 0;
}

int cmd_estimate(const std::string& config_file, const Overrides& ov,
                 const std::string& path_file) {
  ExperimentConfig cfg = load_config(config_file, ov);
  const ModelSpec model = cfg.make_model();
  const ScaleParams scale = cfg.make_scale();
  const Path path = read_path_csv(path_file);
  const double expected = cfg.effective_step() * cfg.store_stride;
  if (std::abs(path.step - expected) > 1e-12 * std::max(1.0, expected))
    throw config_error("path step " + format_double(path.step) +
                       " does not match the config step " + format_double(expected));
  const TorusGrid grid = TorusGrid::uniform(kDefaultGridSize, model.period_lambda);
  EstimateOptions opts;
  opts.kind = cfg.kind;
  opts.theta_true = cfg.theta_true;
  opts.have_theta_true = true;
  const EstimateReport rep = estimate_path(path, model, scale, grid, opts);
  std::cout << rep.to_record();
  const std::string file = out_path(cfg, "estimate.csv");
  std::ofstream out(file);
  out << "theta_hat,theta_tilde,factor,fisher_info,asymptotic_sd,residual,kind\n"
      << rep.to_csv_row() << "\n";
  std::cout << "wrote " << file << "\n";
  return 0;
}

int cmd_profile(const std::string& config_file, const Overrides& ov, int points,
                const std::string& path_file) {
  ExperimentConfig cfg = load_config(config_file, ov);
  const ModelSpec model = cfg.make_model();
  const ScaleParams scale = cfg.make_scale();
  const TorusGrid grid = TorusGrid::uniform(kDefaultGridSize, model.period_lambda);

  Path path;
  if (!path_file.empty()) {
    path = read_path_csv(path_file);
  } else {
    path = simulate_euler(model, scale, cfg.theta_true, cfg.make_sim_config());
  }
  const Path ode = solve_limiting_ode(model, scale, cfg.theta_true, cfg.x0, cfg.horizon,
                                      1e-3, grid);

  std::vector<ProfilePoint> rows;
  const bool b_zero = probe_b_zero(model);
  for (int i = 0; i < points; ++i) {
    const double theta = model.theta_lo + (model.theta_hi - model.theta_lo) * i / (points - 1);
    rows.push_back({theta, log_likelihood(path, model, scale, theta).value,
                    LikelihoodKind::exact});
    rows.push_back({theta, pseudo_log_likelihood(path, model, scale, theta).value,
                    LikelihoodKind::pseudo});
    if (scale.regime != Regime::one || b_zero) {
      const auto lim = limiting_log_likelihood(ode, model, theta, cfg.theta_true,
                                               scale.regime, scale.gamma, grid);
      rows.push_back({theta, lim.value, lim.kind});
    } else if (model.gradient) {
      const auto lim = limiting_pseudo_likelihood(ode, model, theta, cfg.theta_true, grid);
      rows.push_back({theta, lim.value, lim.kind});
    }
  }
  const std::string file = out_path(cfg, "profile.csv");
  write_profile_csv(rows, file);
  std::cout << "wrote " << file << " (" << points << " theta points)\n";
  return 0;
}

SummaryRow to_row(double theta0, double eps, double delta, int M, const MCSummary& s) {
  return SummaryRow{theta0, eps, delta, M, s.mean, s.sd, s.ci68.first, s.ci68.second,
                    s.ci95.first, s.ci95.second, s.failures};
}

int cmd_mc(const std::string& config_file, const Overrides& ov, std::optional<int> workers_flag) {
  ExperimentConfig cfg = load_config(config_file, ov);
  if (cfg.replications < 2) throw config_error("mc needs run.M >= 2 (or --M)");
  const int workers = resolve_workers(workers_flag);
  const MCSummary s = run_replications(cfg, cfg.replications, cfg.seed, workers);
  write_summary_csv({to_row(cfg.theta_true, cfg.epsilon, cfg.delta, cfg.replications, s)},
                    out_path(cfg, "summary.csv"));
  if (!s.histogram.counts.empty()) {
    write_hist_csv(s.histogram, out_path(cfg, "hist.csv"));
    write_theory_csv(s.theory, out_path(cfg, "theory.csv"));
  }
  std::cout << "theta0=" << format_double(cfg.theta_true) << " M=" << cfg.replications
            << " workers=" << workers << "\n"
            << "mean=" << format_double(s.mean) << " sd=" << format_double(s.sd)
            << " ci68=(" << format_double(s.ci68.first) << "," << format_double(s.ci68.second)
            << ") ci95=(" << format_double(s.ci95.first) << "," << format_double(s.ci95.second)
            << ") failures=" << s.failures << "\n";
  std::cout << "wrote " << out_path(cfg, "summary.csv") << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_file, const Overrides& ov,
              const std::vector<double>& epsilons, const std::string& coupling,
              std::optional<int> workers_flag) {
  ExperimentConfig cfg = load_config(config_file, ov);
  if (cfg.replications < 2) throw config_error("sweep needs run.M >= 2 (or --M)");
  DeltaCoupling c;
  if (coupling == "eps2") c = DeltaCoupling::eps_squared;
  else if (coupling == "sqrt-eps") c = DeltaCoupling::sqrt_eps;
  else throw config_error("--coupling must be eps2 or sqrt-eps");
  const int workers = resolve_workers(workers_flag);
  const auto rows = epsilon_sweep(cfg, epsilons, c, cfg.replications, cfg.seed, workers);
  std::vector<SummaryRow> out;
  for (const auto& r : rows)
    out.push_back(to_row(cfg.theta_true, r.epsilon, r.delta, cfg.replications, r.summary));
  write_summary_csv(out, out_path(cfg, "summary.csv"));
  for (const auto& r : out)
    std::cout << "eps=" << format_double(r.epsilon) << " delta=" << format_double(r.delta)
              << " mean=" << format_double(r.mean) << " sd=" << format_double(r.sd) << "\n";
  std::cout << "wrote " << out_path(cfg, "summary.csv") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"small-noise multiscale diffusion simulator and estimator"};
  app.require_subcommand(1);

  std::string config_file, out_file, path_file, coupling = "eps2";
  std::vector<double> epsilons;
  int points = 201;
  std::optional<int> workers;
  Overrides ov;

  auto* sim = app.add_subcommand("simulate", "Euler-Maruyama path to CSV");
  sim->add_option("-c,--config", config_file, "experiment config (JSON)")->required();
  sim->add_option("--out", out_file, "output path CSV (default <out_dir>/path.csv)");
  add_override_flags(sim, ov);

  auto* est = app.add_subcommand("estimate", "estimate theta from a path CSV");
  est->add_option("-c,--config", config_file, "experiment config (JSON)")->required();
  est->add_option("--path", path_file, "path CSV")->required();
  add_override_flags(est, ov);

  auto* prof = app.add_subcommand("profile", "likelihood profiles over a theta grid");
  prof->add_option("-c,--config", config_file, "experiment config (JSON)")->required();
  prof->add_option("--points", points, "theta grid size (default 201)");
  prof->add_option("--path", path_file, "path CSV (simulated from config when absent)");
  add_override_flags(prof, ov);

  auto* mc = app.add_subcommand("mc", "Monte Carlo replication study");
  mc->add_option("-c,--config", config_file, "experiment config (JSON)")->required();
  mc->add_option("--workers", workers, "worker threads (default MSDE_WORKERS or hardware)");
  add_override_flags(mc, ov);

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep with a delta coupling rule");
  sweep->add_option("-c,--config", config_file, "experiment config (JSON)")->required();
  sweep->add_option("--epsilons", epsilons, "epsilon list")->required()->delimiter(',');
  sweep->add_option("--coupling", coupling, "eps2 | sqrt-eps (default eps2)");
  sweep->add_option("--workers", workers, "worker threads");
  add_override_flags(sweep, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_file, ov, out_file);
    if (est->parsed()) return cmd_estimate(config_file, ov, path_file);
    if (prof->parsed()) return cmd_profile(config_file, ov, points, path_file);
    if (mc->parsed()) return cmd_mc(config_file, ov, workers);
    if (sweep->parsed()) return cmd_sweep(config_file, ov, epsilons, coupling, workers);
  } catch (const msde::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const msde::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
