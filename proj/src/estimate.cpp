#include "msde/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "msde/common.hpp"
#include "msde/csv.hpp"
#include "msde/numerics.hpp"

namespace msde {

std::string EstimateReport::to_record() const {
  std::ostringstream os;
  os << "theta_hat=" << format_double(theta_hat) << "\n";
  os << "theta_tilde=" << format_double(theta_tilde) << "\n";
  os << "correction_factor=" << format_double(correction_factor) << "\n";
  if (fisher_info) os << "fisher_info=" << format_double(*fisher_info) << "\n";
  if (asymptotic_sd) os << "asymptotic_sd=" << format_double(*asymptotic_sd) << "\n";
  if (standardized_residual)
    os << "standardized_residual=" << format_double(*standardized_residual) << "\n";
  os << "kind=" << likelihood_kind_name(kind_used) << "\n";
  if (boundary_maximizer) os << "warning=boundary_maximizer\n";
  return os.str();
}

std::string EstimateReport::to_csv_row() const {
  std::ostringstream os;
  os << format_double(theta_hat) << "," << format_double(theta_tilde) << ","
     << format_double(correction_factor) << ","
     << (fisher_info ? format_double(*fisher_info) : "") << ","
     << (asymptotic_sd ? format_double(*asymptotic_sd) : "") << ","
     << (standardized_residual ? format_double(*standardized_residual) : "") << ","
     << likelihood_kind_name(kind_used);
  return os.str();
}

namespace {

struct GradientSums {
  double s_dx;  // sum V'(x_k)(x_{k+1} - x_k)
  double s_qv;  // sum Q'(x_k/delta) V'(x_k)
  double s_vv;  // sum V'(x_k)^2
};

GradientSums gradient_sums(const Path& path, const GradientStructure& g,
                           const ScaleParams& scale) {
  const auto& x = path.values;
  const std::size_t nterms = x.size() - 1;
  const double invd = 1.0 / scale.delta;
  GradientSums s;
  s.s_dx = blocked_sum(nterms, [&](std::size_t k) { return g.dV(x[k]) * (x[k + 1] - x[k]); });
  s.s_qv = blocked_sum(nterms, [&](std::size_t k) { return g.dQ(x[k] * invd) * g.dV(x[k]); });
  s.s_vv = blocked_sum(nterms, [&](std::size_t k) {
    const double dv = g.dV(x[k]);
    return dv * dv;
  });
  return s;
}

}  // namespace

double mle_closed_form(const Path& path, const ModelSpec& model, const ScaleParams& scale) {
  if (!model.linear_in_theta || !model.gradient)
    throw config_error("closed-form MLE needs a linear-in-theta gradient model");
  const auto s = gradient_sums(path, *model.gradient, scale);
  const double r = scale.delta / scale.epsilon;
  const double dt = path.step;
  const double denom = -s.s_vv * dt * (r * r + 1.0);
  if (denom == 0.0)
    throw numeric_error("closed-form MLE: int ||grad V||^2 vanishes along the path");
  const double numer = s.s_dx * (1.0 + r * r) + r * s.s_qv * dt;
  return numer / denom;
}

double path_bias_ratio(const Path& path, const ModelSpec& model, const ScaleParams& scale) {
  if (!model.gradient) throw config_error("path bias ratio needs gradient structure");
  const auto s = gradient_sums(path, *model.gradient, scale);
  const double r = scale.delta / scale.epsilon;
  if (s.s_vv == 0.0)
    throw numeric_error("path bias ratio: int ||grad V||^2 vanishes along the path");
  return (scale.epsilon / scale.delta) * s.s_qv / ((r * r + 1.0) * s.s_vv);
}

std::pair<double, double> correct_estimator(double theta_hat, const ModelSpec& model,
                                            const TorusGrid& grid) {
  if (!model.gradient)
    throw config_error("corrected estimator needs the separable gradient structure");
  const auto& g = *model.gradient;
  auto [Z, Zhat] = partition_constants(g.Q, g.D, grid);
  const double factor = grid.lambda * grid.lambda / (Z * Zhat);
  if (!(factor > 0.0)) throw numeric_error("correction factor not positive");
  return {theta_hat / factor, factor};
}

namespace {

double likelihood_of_kind(const Path& path, const ModelSpec& model, const ScaleParams& scale,
                          LikelihoodKind kind, double theta) {
  switch (kind) {
    case LikelihoodKind::exact: return log_likelihood(path, model, scale, theta).value;
    case LikelihoodKind::pseudo: return pseudo_log_likelihood(path, model, scale, theta).value;
    default:
      throw config_error("argmax supports the exact and pseudo likelihoods");
  }
}

}  // namespace

double mle_argmax(const Path& path, const ModelSpec& model, const ScaleParams& scale,
                  LikelihoodKind kind, double theta_lo, double theta_hi, bool* boundary) {
  if (!(theta_lo < theta_hi)) throw config_error("argmax: empty theta interval");
  auto f = [&](double t) { return likelihood_of_kind(path, model, scale, kind, t); };

  // 33-point pre-scan guards against multimodality
  constexpr int kScan = 33;
  std::vector<double> ts(kScan), vs(kScan);
  for (int i = 0; i < kScan; ++i) {
    ts[i] = theta_lo + (theta_hi - theta_lo) * i / (kScan - 1);
    vs[i] = f(ts[i]);
  }
  int best = 0;
  for (int i = 1; i < kScan; ++i)
    if (vs[i] > vs[best]) best = i;
  int interior_maxima = 0;
  for (int i = 1; i + 1 < kScan; ++i)
    if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1]) ++interior_maxima;

  double theta_star;
  const double tol = 1e-8;
  const bool unimodal = interior_maxima <= 1;
  if (unimodal) {
    const double lo = ts[std::max(0, best - 1)];
    const double hi = ts[std::min(kScan - 1, best + 1)];
    theta_star = golden_section_maximize(f, lo, hi, tol);
  } else {
    // grid refinement fallback
    double lo = ts[std::max(0, best - 1)];
    double hi = ts[std::min(kScan - 1, best + 1)];
    theta_star = ts[best];
    while (hi - lo > tol) {
      double vbest = -std::numeric_limits<double>::infinity();
      double tbest = theta_star;
      for (int i = 0; i < kScan; ++i) {
        const double t = lo + (hi - lo) * i / (kScan - 1);
        const double v = f(t);
        if (v > vbest) {
          vbest = v;
          tbest = t;
        }
      }
      const double w = (hi - lo) / (kScan - 1);
      theta_star = tbest;
      lo = std::max(theta_lo, tbest - w);
      hi = std::min(theta_hi, tbest + w);
    }
  }
  if (boundary)
    *boundary = (theta_star - theta_lo < 1e-6) || (theta_hi - theta_star < 1e-6);
  return theta_star;
}

double standardize(double theta_hat, double center, double variance, double epsilon) {
  if (!(variance > 0.0)) throw config_error("standardize: variance must be > 0");
  return (theta_hat - center) / std::sqrt(epsilon * variance);
}

EstimateReport estimate_path(const Path& path, const ModelSpec& model,
                             const ScaleParams& scale, const TorusGrid& grid,
                             const EstimateOptions& opts) {
  path.validate();
  EstimateReport rep;

  if (model.linear_in_theta && model.gradient) {
    rep.theta_hat = mle_closed_form(path, model, scale);
    rep.kind_used = LikelihoodKind::pseudo;  // the closed form maximizes the pseudo likelihood
  } else {
    rep.theta_hat = mle_argmax(path, model, scale, opts.kind, model.theta_lo, model.theta_hi,
                               &rep.boundary_maximizer);
    rep.kind_used = opts.kind;
  }

  if (model.gradient) {
    auto [tilde, factor] = correct_estimator(rep.theta_hat, model, grid);
    rep.theta_tilde = tilde;
    rep.correction_factor = factor;
  } else {
    rep.theta_tilde = rep.theta_hat;
    rep.correction_factor = 1.0;
  }

  if (!opts.have_theta_true) return rep;
  const double theta0 = opts.theta_true;
  const bool b_zero = probe_b_zero(model);

  try {
    std::optional<double> variance = opts.residual_variance;
    std::optional<double> fisher = opts.fisher_info;
    if (!variance) {
      auto [v, f] = clt_variance(model, scale, theta0, path.values.front(), path.horizon,
                                 grid, opts.ode_step);
      variance = v;
      fisher = f;
    }
    if (!variance) return rep;
    if (b_zero) {
      rep.fisher_info = fisher;
      rep.asymptotic_sd = std::sqrt(scale.epsilon * *variance);
      rep.standardized_residual = standardize(rep.theta_hat, theta0, *variance, scale.epsilon);
    } else if (model.gradient) {
      const double center = theta0 + path_bias_ratio(path, model, scale);
      rep.asymptotic_sd = std::sqrt(scale.epsilon * *variance);
      rep.standardized_residual = standardize(rep.theta_hat, center, *variance, scale.epsilon);
    }
  } catch (const numeric_error&) {
    // report the point estimates even when the CLT decoration fails
  }
  return rep;
}

std::pair<std::optional<double>, std::optional<double>> clt_variance(
    const ModelSpec& model, const ScaleParams& scale, double theta0, double x0, double T,
    const TorusGrid& grid, double ode_step) {
  if (probe_b_zero(model)) {
    const auto ode = solve_limiting_ode(model, scale, theta0, x0, T, ode_step, grid);
    const auto fisher = fisher_information(ode, model, theta0, scale.regime, scale.gamma, grid);
    return {1.0 / fisher.info, fisher.info};
  }
  if (model.gradient) {
    ScaleParams s = scale;
    s.regime = Regime::one;
    const auto ode = solve_limiting_ode(model, s, theta0, x0, T, ode_step, grid);
    std::vector<double> v2(ode.values.size());
    for (std::size_t i = 0; i < v2.size(); ++i) {
      const double dv = model.gradient->dV(ode.values[i]);
      v2[i] = dv * dv;
    }
    const double denom = trapezoid_uniform(v2, ode.step);
    if (!(denom > 0.0)) return {std::nullopt, std::nullopt};
    return {2.0 * model.gradient->D / denom, std::nullopt};
  }
  return {std::nullopt, std::nullopt};
}

}  // namespace msde
