#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "msde/model.hpp"

namespace msde {

// Uniform periodic grid y_j = j*lambda/n, j = 0..n-1. Rectangle weights
// lambda/n (trapezoid == rectangle on a periodic function).
struct TorusGrid {
  int n = 0;
  double lambda = 0.0;

  static TorusGrid uniform(int n, double lambda);
  double h() const { return lambda / n; }
  double node(int j) const { return lambda * j / n; }
  std::vector<double> nodes() const;
};

inline constexpr int kDefaultGridSize = 512;

struct TorusDensity {
  TorusGrid grid;
  std::vector<double> values;

  // integral of f against the density: sum f(y_j) m_j h
  double average(const std::function<double(double)>& f) const;
  double average_values(const std::vector<double>& f) const;
  void validate() const;
};

struct CellSolution {
  TorusGrid grid;
  std::vector<double> chi;
  std::vector<double> dchi_dy;
};

struct PoissonSolution {
  TorusGrid grid;
  std::vector<double> phi;
  std::vector<double> dphi_dy;
};

// Spectral helpers on periodic nodal data (naive DFT; n is small).
std::vector<double> spectral_derivative(const std::vector<double>& f, double lambda);
// antiderivative with zero mean; the k=0 mode of f must vanish (grid sum == 0)
std::vector<double> spectral_antiderivative(const std::vector<double>& f, double lambda);

// m_j = e^{-Q(y_j)/D} / Z with Z by grid quadrature.
TorusDensity gibbs_density(const ScalarFn& Q, double D, const TorusGrid& grid);

// Z = int e^{-Q/D} dy, Zhat = int e^{+Q/D} dy, both by grid quadrature.
std::pair<double, double> partition_constants(const ScalarFn& Q, double D,
                                              const TorusGrid& grid);

// Invariant density of the regime's fast operator at (theta, x).
// Regime 1: stationary law of b.grad + (1/2)sigma^2 d^2 (Gibbs exactly for
// gradient drift). Regime 2: drift gamma*b + c, diffusion gamma*sigma^2/2.
// Regime 3: m ∝ 1/|c| (time-average density of zdot = c), requires
// min |c| > 0.
TorusDensity stationary_density(const ModelSpec& model, const ScaleParams& scale,
                                double theta, double x, const TorusGrid& grid);

// Regime-1 invariant density without a full ScaleParams (cell/Poisson always
// live in the Regime-1 operator).
TorusDensity stationary_density_regime1(const ModelSpec& model, double theta, double x,
                                        const TorusGrid& grid);

enum class CellRoute { automatic, finite_difference, analytic };

// Solve L^1 chi = -b, periodic, int chi dmu = 0. The analytic route needs the
// gradient structure (dchi = -1 + lambda e^{Q/D}/Zhat); the FD route is a
// conservative second-order scheme with flux-recovered dchi. Checks the
// centering condition first.
CellSolution solve_cell_problem(const ModelSpec& model, double theta, double x,
                                const TorusGrid& grid,
                                CellRoute route = CellRoute::automatic);

enum class PoissonRoute { automatic, finite_difference, cell_relation };

// Solve L^1 Phi = -<b_theta0, c_theta>_alpha, periodic, int Phi dmu = 0.
// Checks the Condition-4.2 centering first. For gradient models the
// cell_relation route uses Phi = -(theta/2D) chi(y) V'(x).
PoissonSolution solve_poisson_phi(const ModelSpec& model, double theta, double theta0,
                                  double x, const TorusGrid& grid,
                                  PoissonRoute route = PoissonRoute::automatic);

// grad_y Phi only (skips materializing Phi itself); same checks and routes.
// The bias quadrature calls this once per path node.
std::vector<double> poisson_dphi(const ModelSpec& model, double theta, double theta0,
                                 double x, const TorusGrid& grid,
                                 PoissonRoute route = PoissonRoute::automatic);

}  // namespace msde
