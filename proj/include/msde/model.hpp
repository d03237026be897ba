#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace msde {

enum class Regime { one = 1, two = 2, three = 3 };

const char* regime_name(Regime r);
Regime regime_from_int(int r);

// (epsilon, delta) with the declared limit of eps/delta.
struct ScaleParams {
  double epsilon = 0.0;
  double delta = 0.0;
  Regime regime = Regime::one;
  double gamma = 0.0;  // Regime 2 only: the limit of eps/delta

  double ratio() const { return epsilon / delta; }
  // |eps/delta - gamma|, meaningful for Regime 2. Reported, never enforced.
  double gamma_mismatch() const { return std::abs(ratio() - gamma); }
  void validate() const;
};

// Coefficients are (theta, x, y) -> value; the diffusion carries no theta.
using Coefficient = std::function<double(double theta, double x, double y)>;
using Diffusion = std::function<double(double x, double y)>;
using ScalarFn = std::function<double(double)>;

// Two-scale potential structure: b = -Q'(y), c_theta = -theta V'(x),
// sigma = sqrt(2 D). Enables the closed-form estimator and the analytic
// cell/Poisson routes.
struct GradientStructure {
  ScalarFn Q;
  ScalarFn dQ;
  ScalarFn V;
  ScalarFn dV;
  double D = 0.0;
};

struct ModelSpec {
  std::string name;
  Coefficient drift_b;
  Coefficient drift_c;
  Diffusion sigma;
  double period_lambda = 0.0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  bool linear_in_theta = false;
  int dimension = 1;
  std::optional<GradientStructure> gradient;

  double alpha(double x, double y) const {
    const double s = sigma(x, y);
    return s * s;
  }
  bool theta_in_domain(double theta) const { return theta >= theta_lo && theta <= theta_hi; }

  // Sampled periodicity + nondegeneracy + domain checks; throws config_error.
  void validate() const;
};

// max |b_theta(x,y)| over a fixed probe grid; used by ops whose formulas
// assume b = 0.
double probe_max_abs_b(const ModelSpec& model);
bool probe_b_zero(const ModelSpec& model, double tol = 1e-13);

// Advisory classification of eps/delta against a band (0 < band < 1):
// ratio >= 1/band -> Regime 1, ratio < band -> Regime 3, else Regime 2.
// The user's declared regime always wins.
Regime classify_regime(double epsilon, double delta, double tolerance_band);

using ModelOptions = std::map<std::string, double>;

// Registry of named built-ins ("langevin-cos-sin", "pure-ou",
// "regime3-positive-speed", plus anything registered at runtime).
ModelSpec builtin_model(const std::string& name, const ModelOptions& options = {});
void register_model(const std::string& name,
                    std::function<ModelSpec(const ModelOptions&)> factory);
std::vector<std::string> builtin_model_names();

// Uniformly sampled trajectory {x_k} with step Delta.
struct Path {
  double step = 0.0;
  std::vector<double> values;
  double horizon = 0.0;

  std::size_t size() const { return values.size(); }
  void validate() const;
};

}  // namespace msde
