#include "msde/likelihood.hpp"

#include <cmath>
#include <string>

#include "msde/common.hpp"
#include "msde/numerics.hpp"

namespace msde {

const char* likelihood_kind_name(LikelihoodKind k) {
  switch (k) {
    case LikelihoodKind::exact: return "exact";
    case LikelihoodKind::pseudo: return "pseudo";
    case LikelihoodKind::limiting_regime1: return "limiting-regime1";
    case LikelihoodKind::limiting_regime2: return "limiting-regime2";
    case LikelihoodKind::limiting_regime3: return "limiting-regime3";
  }
  return "?";
}

namespace {

// Z = sum_k f(x_k)(x_{k+1}-x_k) - (Delta/2) sum_k g(x_k), left-point rule on
// the increments (the Brownian path is unobserved, so no Ito simplification).
double z_functional(const Path& path, const ModelSpec& model, const ScaleParams& scale,
                    double theta, bool include_b) {
  const auto& x = path.values;
  const std::size_t nterms = x.size() - 1;
  const double eod = scale.epsilon / scale.delta;
  const double invd = 1.0 / scale.delta;

  const double stoch = blocked_sum(nterms, [&](std::size_t k) {
    const double xk = x[k];
    const double y = xk * invd;
    const double drift = (include_b ? eod * model.drift_b(theta, xk, y) : 0.0) +
                         model.drift_c(theta, xk, y);
    return drift / model.alpha(xk, y) * (x[k + 1] - xk);
  });
  const double riemann = blocked_sum(nterms, [&](std::size_t k) {
    const double xk = x[k];
    const double y = xk * invd;
    const double drift = (include_b ? eod * model.drift_b(theta, xk, y) : 0.0) +
                         model.drift_c(theta, xk, y);
    return drift * drift / model.alpha(xk, y);
  });
  const double value = stoch - 0.5 * riemann * path.step;
  if (!std::isfinite(value)) throw numeric_error("log-likelihood accumulation is non-finite");
  return value;
}

void require_theta(const ModelSpec& model, double theta) {
  if (!model.theta_in_domain(theta))
    throw config_error("theta = " + std::to_string(theta) + " outside the domain [" +
                       std::to_string(model.theta_lo) + ", " + std::to_string(model.theta_hi) + "]");
}

}  // namespace

LikelihoodValue log_likelihood(const Path& path, const ModelSpec& model,
                               const ScaleParams& scale, double theta) {
  require_theta(model, theta);
  return {z_functional(path, model, scale, theta, true), LikelihoodKind::exact, theta};
}

LikelihoodValue log_likelihood_b_zero(const Path& path, const ModelSpec& model,
                                      const ScaleParams& scale, double theta) {
  require_theta(model, theta);
  return {z_functional(path, model, scale, theta, false), LikelihoodKind::exact, theta};
}

LikelihoodValue pseudo_log_likelihood(const Path& path, const ModelSpec& model,
                                      const ScaleParams& scale, double theta) {
  require_theta(model, theta);
  const double r = scale.delta / scale.epsilon;
  const double z = z_functional(path, model, scale, theta, true);
  const double z0 = z_functional(path, model, scale, theta, false);
  return {r * r * z + z0, LikelihoodKind::pseudo, theta};
}

namespace {

TorusDensity density_for_regime(const ModelSpec& model, Regime regime, double gamma,
                                double theta, double x, const TorusGrid& grid) {
  ScaleParams s;
  s.epsilon = 1.0;
  s.delta = 1.0;
  s.regime = regime;
  s.gamma = gamma;
  return stationary_density(model, s, theta, x, grid);
}

LikelihoodKind limiting_kind(Regime regime) {
  switch (regime) {
    case Regime::one: return LikelihoodKind::limiting_regime1;
    case Regime::two: return LikelihoodKind::limiting_regime2;
    case Regime::three: return LikelihoodKind::limiting_regime3;
  }
  return LikelihoodKind::limiting_regime3;
}

}  // namespace

LikelihoodValue limiting_log_likelihood(const Path& ode_path, const ModelSpec& model,
                                        double theta, double theta0, Regime regime,
                                        double gamma, const TorusGrid& grid) {
  require_theta(model, theta);
  if (regime == Regime::one && !probe_b_zero(model))
    throw config_error("Regime 1 limiting likelihood assumes b = 0: use pseudo-likelihood path");
  if (regime == Regime::two && !(gamma > 0.0))
    throw config_error("Regime 2 limiting likelihood requires gamma > 0");

  const auto& xs = ode_path.values;
  std::vector<double> integrand(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double x = xs[s];
    const auto mu = density_for_regime(model, regime, gamma, theta0, x, grid);
    KahanSum acc;
    for (int j = 0; j < grid.n; ++j) {
      const double y = grid.node(j);
      double lt, lt0;
      if (regime == Regime::two) {
        lt = gamma * model.drift_b(theta, x, y) + model.drift_c(theta, x, y);
        lt0 = gamma * model.drift_b(theta0, x, y) + model.drift_c(theta0, x, y);
      } else {
        lt = model.drift_c(theta, x, y);
        lt0 = model.drift_c(theta0, x, y);
      }
      acc.add((lt * lt0 - 0.5 * lt * lt) / model.alpha(x, y) * mu.values[j]);
    }
    integrand[s] = acc.value() * grid.h();
  }
  return {trapezoid_uniform(integrand, ode_path.step), limiting_kind(regime), theta};
}

double j1_main_term(const Path& ode_path, const ModelSpec& model, double theta,
                    double theta0, const TorusGrid& grid) {
  require_theta(model, theta);
  const auto& xs = ode_path.values;
  std::vector<double> integrand(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double x = xs[s];
    const auto mu = stationary_density_regime1(model, theta0, x, grid);
    KahanSum acc;
    for (int j = 0; j < grid.n; ++j) {
      const double y = grid.node(j);
      const double a = model.alpha(x, y);
      const double bt = model.drift_b(theta, x, y);
      const double bt0 = model.drift_b(theta0, x, y);
      const double ct = model.drift_c(theta, x, y);
      const double ct0 = model.drift_c(theta0, x, y);
      acc.add(((bt * bt0 - 0.5 * bt * bt) + (ct * ct0 - 0.5 * ct * ct)) / a * mu.values[j]);
    }
    integrand[s] = acc.value() * grid.h();
  }
  return trapezoid_uniform(integrand, ode_path.step);
}

double bias_term_H_quadrature(const Path& ode_path, const ModelSpec& model, double theta,
                              double theta0, const TorusGrid& grid) {
  const auto& xs = ode_path.values;
  std::vector<double> integrand(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double x = xs[s];
    const auto mu = stationary_density_regime1(model, theta0, x, grid);
    const auto dphi = poisson_dphi(model, theta, theta0, x, grid);
    KahanSum acc;
    for (int j = 0; j < grid.n; ++j)
      acc.add(model.drift_c(theta0, x, grid.node(j)) * dphi[j] * mu.values[j]);
    integrand[s] = acc.value() * grid.h();
  }
  return trapezoid_uniform(integrand, ode_path.step);
}

double bias_term_H(const Path& ode_path, const ModelSpec& model, double theta,
                   double theta0, const TorusGrid& grid) {
  if (!model.gradient) return bias_term_H_quadrature(ode_path, model, theta, theta0, grid);

  // separable closed form (theta theta0 / 2D)(-1 + lambda^2/(Z Zhat))
  // int V'(xbar_s)^2 ds, cross-checked against the quadrature route
  const auto& g = *model.gradient;
  auto [Z, Zhat] = partition_constants(g.Q, g.D, grid);
  const double lam = grid.lambda;
  std::vector<double> v2(ode_path.values.size());
  for (std::size_t s = 0; s < v2.size(); ++s) {
    const double dv = g.dV(ode_path.values[s]);
    v2[s] = dv * dv;
  }
  const double time_int = trapezoid_uniform(v2, ode_path.step);
  const double closed =
      theta * theta0 / (2.0 * g.D) * (-1.0 + lam * lam / (Z * Zhat)) * time_int;

  const double quad = bias_term_H_quadrature(ode_path, model, theta, theta0, grid);
  const double tol = 1e-6 * std::max({1.0, std::abs(closed), std::abs(quad)});
  if (std::abs(closed - quad) > tol)
    throw numeric_error("bias H cross-check failed: closed form " + std::to_string(closed) +
                        " vs quadrature " + std::to_string(quad));
  return closed;
}

LikelihoodValue limiting_pseudo_likelihood(const Path& ode_path, const ModelSpec& model,
                                           double theta, double theta0,
                                           const TorusGrid& grid) {
  require_theta(model, theta);
  // centering (Condition 2.2) at the initial node; Condition 4.2 is enforced
  // inside the Poisson solve node by node
  {
    const double x = ode_path.values.front();
    const auto mu = stationary_density_regime1(model, theta0, x, grid);
    KahanSum acc;
    for (int j = 0; j < grid.n; ++j)
      acc.add(model.drift_b(theta0, x, grid.node(j)) * mu.values[j]);
    if (std::abs(acc.value() * grid.h()) > 1e-8)
      throw numeric_error("centering violated: int b dmu = " +
                          std::to_string(acc.value() * grid.h()));
  }
  const double j1 = j1_main_term(ode_path, model, theta, theta0, grid);
  const double h = bias_term_H(ode_path, model, theta, theta0, grid);
  return {j1 + h, LikelihoodKind::limiting_regime1, theta};
}

FisherReport fisher_information(const Path& ode_path, const ModelSpec& model, double theta,
                                Regime regime, double gamma, const TorusGrid& grid,
                                double c0) {
  require_theta(model, theta);
  if (!probe_b_zero(model))
    throw config_error("Fisher information is defined under b = 0");
  const double h_theta = 1e-6 * std::max(1.0, std::abs(theta));

  const auto& xs = ode_path.values;
  FisherReport rep;
  rep.q_values.resize(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double x = xs[s];
    const auto mu = density_for_regime(model, regime, gamma, theta, x, grid);
    KahanSum acc;
    for (int j = 0; j < grid.n; ++j) {
      const double y = grid.node(j);
      const double dc = (model.drift_c(theta + h_theta, x, y) -
                         model.drift_c(theta - h_theta, x, y)) /
                        (2.0 * h_theta);
      const double S = dc / model.sigma(x, y);
      acc.add(S * S * mu.values[j]);
    }
    rep.q_values[s] = acc.value() * grid.h();
  }
  rep.info = trapezoid_uniform(rep.q_values, ode_path.step);
  if (!(rep.info >= c0))
    throw numeric_error("Fisher information degenerate: I(theta) = " + std::to_string(rep.info) +
                        " < c0 = " + std::to_string(c0));
  return rep;
}

double normed_likelihood_ratio(const Path& path, const ModelSpec& model,
                               const ScaleParams& scale, double theta, double u) {
  const double shifted = theta + std::sqrt(scale.epsilon) * u;
  if (!model.theta_in_domain(theta) || !model.theta_in_domain(shifted))
    throw config_error("normed likelihood ratio: parameter leaves Theta");
  const double z1 = z_functional(path, model, scale, shifted, false);
  const double z0 = z_functional(path, model, scale, theta, false);
  return (z1 - z0) / scale.epsilon;
}

}  // namespace msde
