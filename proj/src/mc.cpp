#include "msde/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "msde/common.hpp"
#include "msde/numerics.hpp"
#include "msde/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msde {

ReplicationSeeder default_seeder() {
  return [](std::uint64_t master, int rep) {
    return rng::substream_seed(master, static_cast<std::uint64_t>(rep));
  };
}

namespace {

struct RepOutcome {
  double tilde = 0.0;
  double hat = 0.0;
  bool ok = false;
};

RepOutcome run_one(const ExperimentConfig& config, const ModelSpec& model,
                   const ScaleParams& scale, const TorusGrid& grid,
                   const EstimateOptions& opts, std::uint64_t seed) {
  SimConfig sim = config.make_sim_config();
  sim.seed = seed;
  RepOutcome out;
  try {
    const Path path = simulate_euler(model, scale, config.theta_true, sim);
    const EstimateReport rep = estimate_path(path, model, scale, grid, opts);
    out.tilde = rep.theta_tilde;
    out.hat = rep.theta_hat;
    out.ok = true;
  } catch (const numeric_error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

MCSummary run_replications(const ExperimentConfig& config, int M, std::uint64_t master_seed,
                           int workers, const ReplicationSeeder& seeder) {
  if (M < 2) throw config_error("run_replications: M must be >= 2");
  const ModelSpec model = config.make_model();
  const ScaleParams scale = config.make_scale();
  const TorusGrid grid = TorusGrid::uniform(kDefaultGridSize, model.period_lambda);

  EstimateOptions opts;
  opts.kind = config.kind;
  opts.theta_true = config.theta_true;
  opts.have_theta_true = true;
  auto [variance, fisher] = clt_variance(model, scale, config.theta_true, config.x0,
                                         config.horizon, grid);
  opts.residual_variance = variance;
  opts.fisher_info = fisher;

  std::vector<RepOutcome> outcomes(M);
  std::exception_ptr fatal = nullptr;

  if (workers <= 1) {
    // serial reference path
    for (int r = 0; r < M; ++r) {
      try {
        outcomes[r] = run_one(config, model, scale, grid, opts, seeder(master_seed, r));
      } catch (...) {
        fatal = std::current_exception();
        break;
      }
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int r = 0; r < M; ++r) {
      try {
        outcomes[r] = run_one(config, model, scale, grid, opts, seeder(master_seed, r));
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!fatal) fatal = std::current_exception();
      }
    }
  }
  if (fatal) std::rethrow_exception(fatal);

  MCSummary out;
  out.requested = M;
  for (int r = 0; r < M; ++r) {
    if (outcomes[r].ok) {
      out.estimates.push_back(outcomes[r].tilde);
      out.estimates_raw.push_back(outcomes[r].hat);
    } else {
      out.failed_indices.push_back(r);
    }
  }
  out.failures = static_cast<int>(out.failed_indices.size());
  if (out.failures * 10 > M)
    throw numeric_error("Monte Carlo aborted: " + std::to_string(out.failures) + " of " +
                        std::to_string(M) + " replications blew up (> 10%)");
  const int n = static_cast<int>(out.estimates.size());
  if (n < 2) throw numeric_error("Monte Carlo: fewer than 2 successful replications");

  KahanSum sum;
  for (double v : out.estimates) sum.add(v);
  out.mean = sum.value() / n;
  KahanSum ss;
  for (double v : out.estimates) ss.add((v - out.mean) * (v - out.mean));
  out.sd = std::sqrt(ss.value() / (n - 1));
  out.ci68 = {out.mean - out.sd, out.mean + out.sd};
  out.ci95 = {out.mean - 1.96 * out.sd, out.mean + 1.96 * out.sd};

  if (n >= 20) {
    const double theory_var = variance ? *variance : out.sd * out.sd / scale.epsilon;
    auto [hist, curve] = histogram_with_theory(out.estimates, config.theta_true, theory_var,
                                               scale.epsilon, config.bins);
    out.histogram = std::move(hist);
    out.theory = std::move(curve);
  }
  return out;
}

std::pair<Histogram, TheoryCurve> histogram_with_theory(const std::vector<double>& estimates,
                                                        double /*theta0*/, double variance,
                                                        double epsilon, int bins) {
  if (estimates.size() < 20)
    throw config_error("histogram needs at least 20 estimates");
  if (bins < 1) throw config_error("histogram needs at least 1 bin");
  if (!(variance > 0.0)) throw config_error("histogram theory curve needs variance > 0");

  const auto [mn_it, mx_it] = std::minmax_element(estimates.begin(), estimates.end());
  double mn = *mn_it, mx = *mx_it;
  Histogram hist;
  if (mx == mn) {
    hist.degenerate = true;
    const double w = std::max(1e-9, std::abs(mn) * 1e-9);
    mn -= w;
    mx += w;
  } else {
    const double pad = 0.05 * (mx - mn);
    mn -= pad;
    mx += pad;
  }
  hist.edges.resize(bins + 1);
  hist.counts.assign(bins, 0);
  for (int i = 0; i <= bins; ++i)
    hist.edges[i] = mn + (mx - mn) * i / bins;
  for (double v : estimates) {
    int idx = static_cast<int>((v - mn) / (mx - mn) * bins);
    idx = std::clamp(idx, 0, bins - 1);
    ++hist.counts[idx];
  }

  KahanSum sum;
  for (double v : estimates) sum.add(v);
  const double center = sum.value() / static_cast<double>(estimates.size());
  const double var = epsilon * variance;

  TheoryCurve curve;
  constexpr int kCurvePoints = 200;
  curve.x.resize(kCurvePoints);
  curve.density.resize(kCurvePoints);
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
  for (int i = 0; i < kCurvePoints; ++i) {
    const double x = mn + (mx - mn) * i / (kCurvePoints - 1);
    curve.x[i] = x;
    curve.density[i] = norm * std::exp(-(x - center) * (x - center) / (2.0 * var));
  }
  return {std::move(hist), std::move(curve)};
}

std::vector<SweepRow> epsilon_sweep(const ExperimentConfig& config,
                                    const std::vector<double>& epsilons,
                                    DeltaCoupling coupling, int M, std::uint64_t master_seed,
                                    int workers) {
  if (epsilons.empty()) throw config_error("epsilon sweep: empty epsilon list");
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size());
  for (double eps : epsilons) {
    ExperimentConfig cell = config;
    cell.epsilon = eps;
    switch (coupling) {
      case DeltaCoupling::eps_squared:
        cell.delta = eps * eps;
        break;
      case DeltaCoupling::sqrt_eps:
        cell.delta = config.delta * std::sqrt(eps);
        break;
    }
    cell.step.reset();  // re-derive from the step rule for each cell
    cell.validate();
    // common master seed across cells couples the noise, which sharpens the
    // monotonicity diagnostics; a single-cell sweep equals run_replications
    SweepRow row;
    row.epsilon = cell.epsilon;
    row.delta = cell.delta;
    row.summary = run_replications(cell, M, master_seed, workers);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace msde
