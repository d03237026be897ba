#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "msde/config.hpp"

namespace msde {

struct Histogram {
  std::vector<double> edges;  // bins+1 edges
  std::vector<int> counts;
  bool degenerate = false;    // zero-width data range
};

struct TheoryCurve {
  std::vector<double> x;
  std::vector<double> density;
};

struct MCSummary {
  int requested = 0;                  // M
  std::vector<double> estimates;      // corrected theta_tilde, replication order
  std::vector<double> estimates_raw;  // theta_hat
  double mean = 0.0;
  double sd = 0.0;  // sample, divisor M-1
  std::pair<double, double> ci68{0.0, 0.0};
  std::pair<double, double> ci95{0.0, 0.0};
  int failures = 0;
  std::vector<int> failed_indices;
  Histogram histogram;
  TheoryCurve theory;
};

// Substream chooser, overridable by tests (e.g. to force identical streams).
using ReplicationSeeder = std::function<std::uint64_t(std::uint64_t master, int rep)>;
ReplicationSeeder default_seeder();

// Simulate + estimate + correct, M times, substream r derived from
// (master_seed, r). Results are collected by replication index, so the
// summary is identical for any worker count. Blown-up replications are
// excluded and counted; more than 10% failures aborts.
MCSummary run_replications(const ExperimentConfig& config, int M,
                           std::uint64_t master_seed, int workers = 1,
                           const ReplicationSeeder& seeder = default_seeder());

// Equal-width histogram over [min, max] padded 5%, plus a normal density with
// mean = empirical center and variance = eps * variance sampled at 200 points.
std::pair<Histogram, TheoryCurve> histogram_with_theory(const std::vector<double>& estimates,
                                                        double theta0, double variance,
                                                        double epsilon, int bins);

enum class DeltaCoupling {
  eps_squared,   // delta = eps^2 (Regime 1 study)
  sqrt_eps,      // delta = delta0 * sqrt(eps) (keeps eps/delta -> 0)
};

struct SweepRow {
  double epsilon = 0.0;
  double delta = 0.0;
  MCSummary summary;
};

std::vector<SweepRow> epsilon_sweep(const ExperimentConfig& config,
                                    const std::vector<double>& epsilons,
                                    DeltaCoupling coupling, int M,
                                    std::uint64_t master_seed, int workers = 1);

}  // namespace msde
