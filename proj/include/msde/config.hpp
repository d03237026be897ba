#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "msde/dynamics.hpp"
#include "msde/estimate.hpp"
#include "msde/model.hpp"

namespace msde {

// Experiment config: JSON document with model/scale/run/output blocks.
// CLI flags override file values.
struct ExperimentConfig {
  // model block
  std::string model_name;
  ModelOptions model_options;

  // scale block
  double epsilon = 0.0;
  double delta = 0.0;
  Regime regime = Regime::one;
  double gamma = 0.0;

  // run block
  double theta_true = 1.0;
  std::optional<double> theta_lo, theta_hi;  // default: model's domain
  double horizon = 1.0;
  std::optional<double> step;          // explicit Delta
  double target_error = kDefaultTargetError;  // used when step absent
  std::uint64_t seed = 0;
  int replications = 0;                // M, for mc/sweep
  double x0 = 1.0;
  bool allow_coarse_step = false;
  LikelihoodKind kind = LikelihoodKind::exact;

  // output block
  std::string out_dir = ".";
  int store_stride = 1;
  int bins = 20;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);

  ModelSpec make_model() const;
  ScaleParams make_scale() const;
  double effective_step() const;  // step if given, else step_bound(scale, target_error)
  SimConfig make_sim_config() const;
  void validate() const;
};

}  // namespace msde
