#include "msde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "msde/common.hpp"
#include "msde/rng.hpp"

namespace msde {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::one: return "Regime1";
    case Regime::two: return "Regime2";
    case Regime::three: return "Regime3";
  }
  return "?";
}

Regime regime_from_int(int r) {
  switch (r) {
    case 1: return Regime::one;
    case 2: return Regime::two;
    case 3: return Regime::three;
  }
  throw config_error("regime must be 1, 2 or 3");
}

void ScaleParams::validate() const {
  if (!(epsilon > 0.0)) throw config_error("epsilon must be > 0");
  if (!(delta > 0.0)) throw config_error("delta must be > 0");
  if (regime == Regime::two && !(gamma > 0.0))
    throw config_error("Regime 2 requires gamma > 0");
}

namespace {

double opt_or(const ModelOptions& o, const std::string& key, double fallback) {
  auto it = o.find(key);
  return it == o.end() ? fallback : it->second;
}

// Fixed probe triples (theta, x, y) for the sampled invariants. Deterministic
// seed: these checks are part of the model contract, not a randomized test.
struct Probe {
  double theta, x, y;
};

std::vector<Probe> probe_triples(const ModelSpec& m, int count) {
  rng::NormalStream gen(0x5eedu, 7);
  std::vector<Probe> probes;
  probes.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = m.theta_lo + (m.theta_hi - m.theta_lo) * gen.uniform01();
    const double x = -2.0 + 4.0 * gen.uniform01();
    const double y = m.period_lambda * gen.uniform01();
    probes.push_back({t, x, y});
  }
  return probes;
}

}  // namespace

void ModelSpec::validate() const {
  if (!(period_lambda > 0.0)) throw config_error(name + ": period lambda must be > 0");
  if (!(theta_lo < theta_hi)) throw config_error(name + ": theta domain is empty");
  if (!drift_b || !drift_c || !sigma) throw config_error(name + ": missing coefficient");
  if (dimension < 1) throw config_error(name + ": dimension must be >= 1");

  const auto probes = probe_triples(*this, 64);
  const double lam = period_lambda;
  double min_alpha = std::numeric_limits<double>::infinity();
  for (const auto& p : probes) {
    const double db = std::abs(drift_b(p.theta, p.x, p.y + lam) - drift_b(p.theta, p.x, p.y));
    const double dc = std::abs(drift_c(p.theta, p.x, p.y + lam) - drift_c(p.theta, p.x, p.y));
    const double ds = std::abs(sigma(p.x, p.y + lam) - sigma(p.x, p.y));
    if (db > 1e-12 || dc > 1e-12 || ds > 1e-12)
      throw config_error(name + ": coefficients are not lambda-periodic in y");
    min_alpha = std::min(min_alpha, alpha(p.x, p.y));
    if (!std::isfinite(drift_b(p.theta, p.x, p.y)) || !std::isfinite(drift_c(p.theta, p.x, p.y)))
      throw config_error(name + ": non-finite coefficient value");
  }
  if (!(min_alpha >= 1e-12))
    throw config_error(name + ": diffusion is degenerate (min sigma^2 < 1e-12)");
}

double probe_max_abs_b(const ModelSpec& model) {
  double worst = 0.0;
  for (const auto& p : probe_triples(model, 64))
    worst = std::max(worst, std::abs(model.drift_b(p.theta, p.x, p.y)));
  return worst;
}

bool probe_b_zero(const ModelSpec& model, double tol) {
  return probe_max_abs_b(model) <= tol;
}

Regime classify_regime(double epsilon, double delta, double tolerance_band) {
  if (!(epsilon > 0.0) || !(delta > 0.0)) throw config_error("epsilon, delta must be > 0");
  if (!(tolerance_band > 0.0) || !(tolerance_band < 1.0))
    throw config_error("tolerance band must lie in (0, 1)");
  const double r = epsilon / delta;
  if (r >= 1.0 / tolerance_band) return Regime::one;
  if (r < tolerance_band) return Regime::three;
  return Regime::two;
}

namespace {

using Factory = std::function<ModelSpec(const ModelOptions&)>;

ModelSpec make_langevin_cos_sin(const ModelOptions& opts) {
  const double D = opt_or(opts, "D", 0.5);
  if (!(D > 0.0)) throw config_error("langevin-cos-sin: D must be > 0 (sigma = sqrt(2D))");
  ModelSpec m;
  m.name = "langevin-cos-sin";
  m.period_lambda = 2.0 * M_PI;
  m.theta_lo = opt_or(opts, "theta_lo", 0.01);
  m.theta_hi = opt_or(opts, "theta_hi", 5.0);
  m.linear_in_theta = true;
  GradientStructure g;
  g.Q = [](double y) { return std::cos(y) + std::sin(y); };
  g.dQ = [](double y) { return std::cos(y) - std::sin(y); };
  g.V = [](double x) { return 0.5 * x * x; };
  g.dV = [](double x) { return x; };
  g.D = D;
  m.gradient = g;
  const double s = std::sqrt(2.0 * D);
  m.drift_b = [](double, double, double y) { return std::sin(y) - std::cos(y); };
  m.drift_c = [](double theta, double x, double) { return -theta * x; };
  m.sigma = [s](double, double) { return s; };
  return m;
}

ModelSpec make_pure_ou(const ModelOptions& opts) {
  const double D = opt_or(opts, "D", 0.5);
  if (!(D > 0.0)) throw config_error("pure-ou: D must be > 0 (sigma = sqrt(2D))");
  ModelSpec m;
  m.name = "pure-ou";
  m.period_lambda = 2.0 * M_PI;
  m.theta_lo = opt_or(opts, "theta_lo", 0.01);
  m.theta_hi = opt_or(opts, "theta_hi", 5.0);
  m.linear_in_theta = true;
  GradientStructure g;
  g.Q = [](double) { return 0.0; };
  g.dQ = [](double) { return 0.0; };
  g.V = [](double x) { return 0.5 * x * x; };
  g.dV = [](double x) { return x; };
  g.D = D;
  m.gradient = g;
  const double s = std::sqrt(2.0 * D);
  m.drift_b = [](double, double, double) { return 0.0; };
  m.drift_c = [](double theta, double x, double) { return -theta * x; };
  m.sigma = [s](double, double) { return s; };
  return m;
}

ModelSpec make_regime3_positive_speed(const ModelOptions& opts) {
  const double D = opt_or(opts, "D", 0.5);
  if (!(D > 0.0)) throw config_error("regime3-positive-speed: D must be > 0");
  ModelSpec m;
  m.name = "regime3-positive-speed";
  m.period_lambda = opt_or(opts, "lambda", 2.0 * M_PI);
  m.theta_lo = opt_or(opts, "theta_lo", 0.05);
  m.theta_hi = opt_or(opts, "theta_hi", 5.0);
  m.linear_in_theta = true;
  const double lam = m.period_lambda;
  const double s = std::sqrt(2.0 * D);
  m.drift_b = [](double, double, double) { return 0.0; };
  m.drift_c = [lam](double theta, double, double y) {
    return theta * (2.0 + std::sin(2.0 * M_PI * y / lam));
  };
  m.sigma = [s](double, double) { return s; };
  return m;
}

std::map<std::string, Factory>& registry() {
  static std::map<std::string, Factory> reg = {
      {"langevin-cos-sin", make_langevin_cos_sin},
      {"pure-ou", make_pure_ou},
      {"regime3-positive-speed", make_regime3_positive_speed},
  };
  return reg;
}

std::mutex& registry_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

ModelSpec builtin_model(const std::string& name, const ModelOptions& options) {
  Factory f;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) throw config_error("unknown model: " + name);
    f = it->second;
  }
  ModelSpec m = f(options);
  m.validate();
  return m;
}

void register_model(const std::string& name, std::function<ModelSpec(const ModelOptions&)> factory) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::vector<std::string> builtin_model_names() {
  std::lock_guard<std::mutex> lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

void Path::validate() const {
  if (values.size() < 2) throw config_error("path needs at least 2 samples");
  if (!(step > 0.0)) throw config_error("path step must be > 0");
  for (double v : values)
    if (!std::isfinite(v)) throw numeric_error("path contains non-finite values");
  const double expected = step * static_cast<double>(values.size() - 1);
  if (horizon != expected)
    throw config_error("path horizon does not equal step * (length - 1)");
}

}  // namespace msde
