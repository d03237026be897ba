#pragma once

#include <cstdint>

#include "msde/model.hpp"
#include "msde/torus.hpp"

namespace msde {

inline constexpr double kDefaultTargetError = 0.001;

struct SimConfig {
  double x0 = 1.0;
  double horizon = 1.0;  // T
  double step = 0.0;     // Delta
  std::uint64_t seed = 0;
  int store_stride = 1;
  double noise_scale = 1.0;  // test hook: scales the diffusion term
  bool allow_coarse_step = false;
};

// Largest Delta with Euler error ~ target: target * delta^2 / epsilon.
double step_bound(const ScaleParams& scale, double target_error = kDefaultTargetError);

// Euler-Maruyama for
//   x_{k+1} = x_k + [(eps/delta) b(x_k, x_k/delta) + c(x_k, x_k/delta)] Delta
//           + sqrt(eps) sigma(x_k, x_k/delta) sqrt(Delta) xi_k
// with xi_k from the (seed)-pinned substream. Same seed => bit-identical path.
Path simulate_euler(const ModelSpec& model, const ScaleParams& scale, double theta0,
                    const SimConfig& cfg);

// Averaged drift of the limiting ODE: int lambda_{i,theta}(x, y) mu^i(dy; x).
// Regime 1: (1 + dchi/dy) c, Regime 2: gamma b + c, Regime 3: c.
double averaged_drift(const ModelSpec& model, const ScaleParams& scale, double theta,
                      double x, const TorusGrid& grid);

// Classical RK4 on xbar' = averaged_drift(xbar).
Path solve_limiting_ode(const ModelSpec& model, const ScaleParams& scale, double theta,
                        double x0, double T, double ode_step, const TorusGrid& grid);

}  // namespace msde
