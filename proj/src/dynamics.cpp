#include "msde/dynamics.hpp"

#include <cmath>
#include <string>

#include "msde/common.hpp"
#include "msde/numerics.hpp"
#include "msde/rng.hpp"

namespace msde {

double step_bound(const ScaleParams& scale, double target_error) {
  if (!(target_error > 0.0)) throw config_error("step_bound: target error must be > 0");
  return target_error * scale.delta * scale.delta / scale.epsilon;
}

namespace {

long long resolve_step_count(double T, double dt) {
  const double ratio = T / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw config_error("horizon T must be an integer multiple of the step");
  return n;
}

}  // namespace

Path simulate_euler(const ModelSpec& model, const ScaleParams& scale, double theta0,
                    const SimConfig& cfg) {
  scale.validate();
  if (!(cfg.step > 0.0)) throw config_error("simulate_euler: step must be > 0");
  if (cfg.store_stride < 1) throw config_error("simulate_euler: stride must be >= 1");
  const double bound = step_bound(scale);
  if (!cfg.allow_coarse_step && cfg.step > bound * (1.0 + 1e-12))
    throw config_error("step " + std::to_string(cfg.step) + " exceeds the bound " +
                       std::to_string(bound) + " = 0.001 delta^2/eps (use the override to force)");

  const long long n = resolve_step_count(cfg.horizon, cfg.step);
  if (n % cfg.store_stride != 0)
    throw config_error("store stride must divide the step count");

  const double eod = scale.epsilon / scale.delta;
  const double sqeps = std::sqrt(scale.epsilon) * cfg.noise_scale;
  const double sqdt = std::sqrt(cfg.step);
  const double dt = cfg.step;
  const double inv_delta = 1.0 / scale.delta;

  rng::NormalStream noise(cfg.seed, 0);

  Path out;
  out.values.reserve(static_cast<std::size_t>(n / cfg.store_stride) + 1);
  double x = cfg.x0;
  out.values.push_back(x);
  for (long long k = 0; k < n; ++k) {
    const double y = x * inv_delta;
    const double drift = eod * model.drift_b(theta0, x, y) + model.drift_c(theta0, x, y);
    const double diff = sqeps * model.sigma(x, y);
    x += drift * dt + diff * sqdt * noise.normal();
    if (!std::isfinite(x))
      throw numeric_error("blow-up at step " + std::to_string(k + 1));
    if ((k + 1) % cfg.store_stride == 0) out.values.push_back(x);
  }
  out.step = dt * cfg.store_stride;
  out.horizon = out.step * static_cast<double>(out.values.size() - 1);
  return out;
}

double averaged_drift(const ModelSpec& model, const ScaleParams& scale, double theta,
                      double x, const TorusGrid& grid) {
  switch (scale.regime) {
    case Regime::one: {
      const auto mu = stationary_density_regime1(model, theta, x, grid);
      if (model.gradient) {
        // (1 + dchi/dy) c against the Gibbs law; int (1+chi') dmu collapses to
        // lambda^2/(Z Zhat), and for y-free c the product factorizes
        const auto& g = *model.gradient;
        auto [Z, Zhat] = partition_constants(g.Q, g.D, grid);
        KahanSum acc;
        for (int j = 0; j < grid.n; ++j) {
          const double y = grid.node(j);
          const double corr = grid.lambda * std::exp(g.Q(y) / g.D) / Zhat;  // 1 + chi'
          acc.add(corr * model.drift_c(theta, x, y) * mu.values[j]);
        }
        return acc.value() * grid.h();
      }
      const auto cell = solve_cell_problem(model, theta, x, grid);
      KahanSum acc;
      for (int j = 0; j < grid.n; ++j)
        acc.add((1.0 + cell.dchi_dy[j]) * model.drift_c(theta, x, grid.node(j)) * mu.values[j]);
      return acc.value() * grid.h();
    }
    case Regime::two: {
      const auto mu = stationary_density(model, scale, theta, x, grid);
      KahanSum acc;
      for (int j = 0; j < grid.n; ++j) {
        const double y = grid.node(j);
        acc.add((scale.gamma * model.drift_b(theta, x, y) + model.drift_c(theta, x, y)) *
                mu.values[j]);
      }
      return acc.value() * grid.h();
    }
    case Regime::three: {
      const auto mu = stationary_density(model, scale, theta, x, grid);
      KahanSum acc;
      for (int j = 0; j < grid.n; ++j)
        acc.add(model.drift_c(theta, x, grid.node(j)) * mu.values[j]);
      return acc.value() * grid.h();
    }
  }
  throw config_error("bad regime");
}

Path solve_limiting_ode(const ModelSpec& model, const ScaleParams& scale, double theta,
                        double x0, double T, double ode_step, const TorusGrid& grid) {
  if (!(ode_step > 0.0)) throw config_error("ode step must be > 0");
  const long long n = resolve_step_count(T, ode_step);
  auto f = [&](double x) { return averaged_drift(model, scale, theta, x, grid); };
  Path out;
  out.values.reserve(static_cast<std::size_t>(n) + 1);
  double x = x0;
  out.values.push_back(x);
  const double h = ode_step;
  for (long long k = 0; k < n; ++k) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(x)) throw numeric_error("limiting ODE blow-up at step " + std::to_string(k + 1));
    out.values.push_back(x);
  }
  out.step = h;
  out.horizon = h * static_cast<double>(out.values.size() - 1);
  return out;
}

}  // namespace msde
