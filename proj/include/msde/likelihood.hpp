#pragma once

#include <vector>

#include "msde/dynamics.hpp"
#include "msde/model.hpp"
#include "msde/torus.hpp"

namespace msde {

enum class LikelihoodKind {
  exact,
  pseudo,
  limiting_regime1,
  limiting_regime2,
  limiting_regime3,
};

const char* likelihood_kind_name(LikelihoodKind k);

struct LikelihoodValue {
  double value = 0.0;
  LikelihoodKind kind = LikelihoodKind::exact;
  double theta = 0.0;
};

// Z^eps_theta of the observed path: Ito (left-point) stochastic sum plus
// Riemann term,
//   sum_k f(x_k)(x_{k+1}-x_k) - (1/2) sum_k g(x_k) Delta
// with f = alpha^{-1}((eps/delta) b + c), g = ||(eps/delta) b + c||^2_alpha.
LikelihoodValue log_likelihood(const Path& path, const ModelSpec& model,
                               const ScaleParams& scale, double theta);

// Same with b forced to zero (the Z(.;0) of the pseudo-likelihood).
LikelihoodValue log_likelihood_b_zero(const Path& path, const ModelSpec& model,
                                      const ScaleParams& scale, double theta);

// (delta/eps)^2 Z + Z(.;0) — finite in the Regime-1 limit when b != 0.
LikelihoodValue pseudo_log_likelihood(const Path& path, const ModelSpec& model,
                                      const ScaleParams& scale, double theta);

// Limiting likelihood Zbar^i along the limiting ODE path (time-quadrature of
// the y-averaged drift products against mu^i_theta0). Regime 1 requires b = 0.
LikelihoodValue limiting_log_likelihood(const Path& ode_path, const ModelSpec& model,
                                        double theta, double theta0, Regime regime,
                                        double gamma, const TorusGrid& grid);

// J^1: the four-integral main term of the Regime-1 pseudo limit (b-block plus
// c-block against mu^1_theta0).
double j1_main_term(const Path& ode_path, const ModelSpec& model, double theta,
                    double theta0, const TorusGrid& grid);

// Bias H = int_0^T int <c_theta0, grad_y Phi_{theta,theta0}> dmu^1 ds.
// For separable gradient models the closed form
//   (theta theta0 / 2D)(-1 + lambda^2/(Z Zhat)) int ||V'(xbar)||^2 ds
// is used and cross-checked against the quadrature route.
double bias_term_H(const Path& ode_path, const ModelSpec& model, double theta,
                   double theta0, const TorusGrid& grid);

// Quadrature-only route for H (always goes through solve_poisson_phi).
double bias_term_H_quadrature(const Path& ode_path, const ModelSpec& model, double theta,
                              double theta0, const TorusGrid& grid);

// Zhat^1 = J^1 + H (Regime 1 pseudo limit).
LikelihoodValue limiting_pseudo_likelihood(const Path& ode_path, const ModelSpec& model,
                                           double theta, double theta0,
                                           const TorusGrid& grid);

struct FisherReport {
  double info = 0.0;               // I_i(theta)
  std::vector<double> q_values;    // q_i(xbar_s, theta) along the path
};

// I_i(theta) = int_0^T q_i(xbar_s, theta) ds with q_i = int S^2 dmu^i_theta,
// S = sigma^{-1} d/dtheta c_theta (central differences). Requires b = 0.
FisherReport fisher_information(const Path& ode_path, const ModelSpec& model,
                                double theta, Regime regime, double gamma,
                                const TorusGrid& grid, double c0 = 1e-10);

// Normed log-likelihood ratio M_eps(theta, u) = (1/eps)[Z_{theta+sqrt(eps) u}
// - Z_theta], with b = 0 enforced in both evaluations.
double normed_likelihood_ratio(const Path& path, const ModelSpec& model,
                               const ScaleParams& scale, double theta, double u);

}  // namespace msde
