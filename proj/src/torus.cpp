#include "msde/torus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "msde/common.hpp"
#include "msde/numerics.hpp"

namespace msde {

TorusGrid TorusGrid::uniform(int n, double lambda) {
  if (n < 16 || n % 2 != 0) throw config_error("torus grid needs n >= 16 and even");
  if (!(lambda > 0.0)) throw config_error("torus period must be > 0");
  return TorusGrid{n, lambda};
}

std::vector<double> TorusGrid::nodes() const {
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) y[j] = node(j);
  return y;
}

double TorusDensity::average(const std::function<double(double)>& f) const {
  KahanSum acc;
  for (int j = 0; j < grid.n; ++j) acc.add(f(grid.node(j)) * values[j]);
  return acc.value() * grid.h();
}

double TorusDensity::average_values(const std::vector<double>& f) const {
  KahanSum acc;
  for (int j = 0; j < grid.n; ++j) acc.add(f[j] * values[j]);
  return acc.value() * grid.h();
}

void TorusDensity::validate() const {
  double mass = 0.0;
  for (double m : values) {
    if (!(m > 0.0)) throw numeric_error("density not strictly positive");
    mass += m;
  }
  mass *= grid.h();
  if (std::abs(mass - 1.0) > 1e-10) throw numeric_error("density not normalized");
}

namespace {

constexpr double kOverflowGuard = 700.0;

// 4-point Gauss-Legendre on [y0, y1].
double edge_integral(const std::function<double(double)>& f, double y0, double y1) {
  static const double xg[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double wg[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};
  const double mid = 0.5 * (y0 + y1), half = 0.5 * (y1 - y0);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += wg[i] * f(mid + half * xg[i]);
  return s * half;
}

std::vector<std::complex<double>> dft(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<std::complex<double>> F(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const double ang = -2.0 * M_PI * k * j / n;
      acc += f[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    F[k] = acc;
  }
  return F;
}

std::vector<double> idft_real(const std::vector<std::complex<double>>& F) {
  const int n = static_cast<int>(F.size());
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      const double ang = 2.0 * M_PI * k * j / n;
      acc += F[k] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    f[j] = acc.real() / n;
  }
  return f;
}

}  // namespace

std::vector<double> spectral_derivative(const std::vector<double>& f, double lambda) {
  const int n = static_cast<int>(f.size());
  auto F = dft(f);
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    const int kk = k <= n / 2 ? k : k - n;  // signed wavenumber
    if (kk == n / 2 || kk == -n / 2) {
      F[k] = 0.0;  // Nyquist mode has no odd-derivative representation
    } else {
      F[k] *= I * (2.0 * M_PI * kk / lambda);
    }
  }
  return idft_real(F);
}

std::vector<double> spectral_antiderivative(const std::vector<double>& f, double lambda) {
  const int n = static_cast<int>(f.size());
  auto F = dft(f);
  const std::complex<double> I(0.0, 1.0);
  F[0] = 0.0;
  for (int k = 1; k < n; ++k) {
    const int kk = k <= n / 2 ? k : k - n;
    if (kk == n / 2 || kk == -n / 2) {
      F[k] = 0.0;
    } else {
      F[k] /= I * (2.0 * M_PI * kk / lambda);
    }
  }
  return idft_real(F);
}

TorusDensity gibbs_density(const ScalarFn& Q, double D, const TorusGrid& grid) {
  if (!(D > 0.0)) throw config_error("gibbs_density: D must be > 0");
  std::vector<double> w(grid.n);
  double zsum = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double e = -Q(grid.node(j)) / D;
    if (std::abs(e) > kOverflowGuard) throw numeric_error("gibbs_density: |Q/D| > 700");
    w[j] = std::exp(e);
    zsum += w[j];
  }
  const double Z = zsum * grid.h();
  TorusDensity out{grid, std::move(w)};
  for (double& m : out.values) m /= Z;
  return out;
}

std::pair<double, double> partition_constants(const ScalarFn& Q, double D,
                                              const TorusGrid& grid) {
  if (!(D > 0.0)) throw config_error("partition_constants: D must be > 0");
  KahanSum z, zhat;
  for (int j = 0; j < grid.n; ++j) {
    const double e = Q(grid.node(j)) / D;
    if (std::abs(e) > kOverflowGuard) throw numeric_error("partition_constants: |Q/D| > 700");
    z.add(std::exp(-e));
    zhat.add(std::exp(e));
  }
  return {z.value() * grid.h(), zhat.value() * grid.h()};
}

namespace {

// Stationary density of the 1-d periodic operator with drift u(y) and
// diffusion a(y) (operator u d/dy + a d^2/dy^2): Scharfetter-Gummel march of
// the constant-flux system (a m)' - u m = G, edge drift integrals by Gauss
// quadrature. Exact for gradient drift (zero flux), second order otherwise.
TorusDensity stationary_sg(const std::function<double(double)>& u,
                           const std::function<double(double)>& a,
                           const TorusGrid& grid) {
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> alpha(n), beta(n);
  for (int j = 0; j < n; ++j) {
    const double y0 = grid.node(j);
    const double aj = a(y0 + 0.5 * h);
    if (!(aj > 0.0)) throw numeric_error("stationary solve failed: nonpositive diffusion");
    const double w = edge_integral([&](double t) { return u(t) / a(t); }, y0, y0 + h);
    if (std::abs(w) > kOverflowGuard) throw numeric_error("stationary solve failed: drift overflow");
    alpha[j] = std::exp(w);
    beta[j] = (std::abs(w) > 1e-12 ? h * std::expm1(w) / w : h) / aj;
  }
  // m_{j+1} = alpha_j m_j + beta_j G, periodic wrap fixes G/m_0.
  std::vector<double> P(n + 1);
  P[0] = 1.0;
  for (int j = 0; j < n; ++j) {
    P[j + 1] = P[j] * alpha[j];
    if (!std::isfinite(P[j + 1])) throw numeric_error("stationary solve failed: overflow");
  }
  KahanSum s;
  for (int j = 0; j < n; ++j) s.add(beta[j] * (P[n] / P[j + 1]));
  const double S = s.value();
  const double G = S != 0.0 ? (1.0 - P[n]) / S : 0.0;
  std::vector<double> m(n);
  m[0] = 1.0;
  for (int j = 0; j + 1 < n; ++j) m[j + 1] = alpha[j] * m[j] + beta[j] * G;
  KahanSum mass;
  for (double v : m) mass.add(v);
  const double total = mass.value() * h;
  if (!(total > 0.0) || !std::isfinite(total))
    throw numeric_error("stationary solve failed: nonpositive mass");
  for (double& v : m) v /= total;
  TorusDensity out{grid, std::move(m)};
  out.validate();
  return out;
}

}  // namespace

TorusDensity stationary_density_regime1(const ModelSpec& model, double theta, double x,
                                        const TorusGrid& grid) {
  if (model.gradient) {
    // gradient drift with constant sigma: the invariant law is the Gibbs
    // density, which the flux march reproduces exactly; return it directly
    return gibbs_density(model.gradient->Q, model.gradient->D, grid);
  }
  auto u = [&](double y) { return model.drift_b(theta, x, y); };
  auto a = [&](double y) { return 0.5 * model.alpha(x, y); };
  return stationary_sg(u, a, grid);
}

TorusDensity stationary_density(const ModelSpec& model, const ScaleParams& scale,
                                double theta, double x, const TorusGrid& grid) {
  switch (scale.regime) {
    case Regime::one:
      return stationary_density_regime1(model, theta, x, grid);
    case Regime::two: {
      const double g = scale.gamma;
      if (!(g > 0.0)) throw config_error("Regime 2 stationary density requires gamma > 0");
      auto u = [&](double y) { return g * model.drift_b(theta, x, y) + model.drift_c(theta, x, y); };
      auto a = [&](double y) { return 0.5 * g * model.alpha(x, y); };
      return stationary_sg(u, a, grid);
    }
    case Regime::three: {
      std::vector<double> m(grid.n);
      double minc = std::numeric_limits<double>::infinity();
      for (int j = 0; j < grid.n; ++j) {
        const double c = model.drift_c(theta, x, grid.node(j));
        minc = std::min(minc, std::abs(c));
        m[j] = 1.0 / std::abs(c);
      }
      if (!(minc > 1e-12)) throw numeric_error("degenerate fast flow: c has a zero on the torus");
      KahanSum mass;
      for (double v : m) mass.add(v);
      for (double& v : m) v /= mass.value() * grid.h();
      TorusDensity out{grid, std::move(m)};
      out.validate();
      return out;
    }
  }
  throw config_error("bad regime");
}

namespace {

// Thomas solve for a tridiagonal system (no wrap terms).
std::vector<double> thomas(std::vector<double> lo, std::vector<double> di,
                           std::vector<double> up, std::vector<double> rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (di[i - 1] == 0.0) throw numeric_error("tridiagonal solve: zero pivot");
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  if (di[n - 1] == 0.0) throw numeric_error("tridiagonal solve: zero pivot");
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

struct CenteringCheck {
  double value;
  bool ok;
};

CenteringCheck centering_integral(const TorusDensity& mu, const std::vector<double>& f,
                                  double tol) {
  const double v = mu.average_values(f);
  return {v, std::abs(v) <= tol};
}

// Conservative (Gibbs-weighted) second-order FD solve of L^1 u = f for
// gradient models: (D/m) (m u')' = f discretized in flux form, rank
// deficiency handled by projecting f onto the discrete range (left null
// vector is the nodal Gibbs weight), pinning u_0 = 0 and a Thomas solve.
std::vector<double> solve_l1_fd_gradient(const GradientStructure& g, const TorusGrid& grid,
                                         std::vector<double> f) {
  const int n = grid.n;
  const double h = grid.h();
  const double D = g.D;
  std::vector<double> mnode(n), medge(n);  // medge[j] = m at y_j + h/2
  for (int j = 0; j < n; ++j) {
    mnode[j] = std::exp(-g.Q(grid.node(j)) / D);
    medge[j] = std::exp(-g.Q(grid.node(j) + 0.5 * h) / D);
  }
  // project rhs onto the range: weights m_j kill the nullspace direction
  KahanSum fm, msum;
  for (int j = 0; j < n; ++j) {
    fm.add(f[j] * mnode[j]);
    msum.add(mnode[j]);
  }
  const double shift = fm.value() / msum.value();
  for (double& v : f) v -= shift;
  // rows 1..n-1 after pinning u_0 = 0: A_j = D/(m_j h^2) [medge_j u_{j+1}
  // - (medge_j + medge_{j-1}) u_j + medge_{j-1} u_{j-1}]
  std::vector<double> lo(n - 1), di(n - 1), up(n - 1), rhs(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const int j = i + 1;
    const double cj = D / (mnode[j] * h * h);
    const double em = medge[j - 1], ep = medge[j];
    lo[i] = cj * em;
    di[i] = -cj * (em + ep);
    up[i] = cj * ep;
    rhs[i] = f[j];
  }
  // u_0 = 0 contributions drop; the wrap entry of row n-1 (column 0) drops too
  auto u = thomas(lo, di, up, rhs);
  std::vector<double> full(n, 0.0);
  for (int i = 0; i < n - 1; ++i) full[i + 1] = u[i];
  return full;
}

// Generic dense route: second-order central FD matrix of L^1 with the
// normalization row sum(u_j m_j h) = 0 replacing the redundant equation.
std::vector<double> solve_l1_fd_generic(const ModelSpec& model, double theta, double x,
                                        const TorusGrid& grid, const TorusDensity& mu,
                                        const std::vector<double>& f) {
  const int n = grid.n;
  const double h = grid.h();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j) {
    const double y = grid.node(j);
    const double b = model.drift_b(theta, x, y);
    const double a = 0.5 * model.alpha(x, y);
    const int jm = (j - 1 + n) % n, jp = (j + 1) % n;
    A(j, jp) += b / (2.0 * h) + a / (h * h);
    A(j, jm) += -b / (2.0 * h) + a / (h * h);
    A(j, j) += -2.0 * a / (h * h);
    rhs(j) = f[j];
  }
  // replace the first row by the centering constraint
  for (int j = 0; j < n; ++j) A(0, j) = mu.values[j] * h;
  rhs(0) = 0.0;
  Eigen::VectorXd u = A.partialPivLu().solve(rhs);
  if (!u.allFinite()) throw numeric_error("cell/Poisson FD solve failed (singular system)");
  return std::vector<double>(u.data(), u.data() + n);
}

void recenter(std::vector<double>& u, const TorusDensity& mu) {
  KahanSum acc;
  for (int j = 0; j < mu.grid.n; ++j) acc.add(u[j] * mu.values[j]);
  const double mean = acc.value() * mu.grid.h();
  for (double& v : u) v -= mean;
}

}  // namespace

CellSolution solve_cell_problem(const ModelSpec& model, double theta, double x,
                                const TorusGrid& grid, CellRoute route) {
  auto mu = stationary_density_regime1(model, theta, x, grid);
  std::vector<double> bvals(grid.n);
  for (int j = 0; j < grid.n; ++j) bvals[j] = model.drift_b(theta, x, grid.node(j));
  const auto cc = centering_integral(mu, bvals, 1e-8);
  if (!cc.ok)
    throw numeric_error("centering violated: int b dmu = " + std::to_string(cc.value));

  if (route == CellRoute::automatic)
    route = model.gradient ? CellRoute::analytic : CellRoute::finite_difference;

  CellSolution out;
  out.grid = grid;

  if (route == CellRoute::analytic) {
    if (!model.gradient) throw config_error("analytic cell route needs gradient structure");
    const auto& g = *model.gradient;
    auto [Z, Zhat] = partition_constants(g.Q, g.D, grid);
    out.dchi_dy.resize(grid.n);
    for (int j = 0; j < grid.n; ++j)
      out.dchi_dy[j] = -1.0 + grid.lambda * std::exp(g.Q(grid.node(j)) / g.D) / Zhat;
    out.chi = spectral_antiderivative(out.dchi_dy, grid.lambda);
    recenter(out.chi, mu);
    return out;
  }

  // FD route
  if (model.gradient) {
    const auto& g = *model.gradient;
    const double h = grid.h();
    // flux-form rhs: -b = (D/m)(m chi')' with (m chi')' matched to -m'
    std::vector<double> f(grid.n);
    std::vector<double> medge(grid.n), mnode(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      medge[j] = std::exp(-g.Q(grid.node(j) + 0.5 * h) / g.D);
      mnode[j] = std::exp(-g.Q(grid.node(j)) / g.D);
    }
    for (int j = 0; j < grid.n; ++j) {
      const int jm = (j - 1 + grid.n) % grid.n;
      f[j] = -g.D * (medge[j] - medge[jm]) / (h * mnode[j]);
    }
    out.chi = solve_l1_fd_gradient(g, grid, std::move(f));
    recenter(out.chi, mu);
    // derivative recovery from the discrete flux constant:
    // m_{j+1/2} ((chi_{j+1}-chi_j)/h + 1) = F for all j, so
    // dchi(y) = -1 + F e^{Q(y)/D} with F read off the solved chi.
    KahanSum facc;
    for (int j = 0; j < grid.n; ++j) {
      const int jp = (j + 1) % grid.n;
      facc.add(medge[j] * ((out.chi[jp] - out.chi[j]) / h + 1.0));
    }
    const double F = facc.value() / grid.n;
    out.dchi_dy.resize(grid.n);
    for (int j = 0; j < grid.n; ++j) out.dchi_dy[j] = -1.0 + F / mnode[j];
  } else {
    out.chi = solve_l1_fd_generic(model, theta, x, grid, mu, [&] {
      std::vector<double> f(grid.n);
      for (int j = 0; j < grid.n; ++j) f[j] = -bvals[j];
      return f;
    }());
    recenter(out.chi, mu);
    out.dchi_dy = spectral_derivative(out.chi, grid.lambda);
  }
  return out;
}

namespace {

void poisson_centering_check(const ModelSpec& model, double theta, double theta0, double x,
                             const TorusGrid& grid, const TorusDensity& mu,
                             std::vector<double>& rhs) {
  rhs.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double y = grid.node(j);
    rhs[j] = model.drift_b(theta0, x, y) * model.drift_c(theta, x, y) / model.alpha(x, y);
  }
  const auto cc = centering_integral(mu, rhs, 1e-8);
  if (!cc.ok)
    throw numeric_error("Condition 4.2 violated: int <b,c>_alpha dmu = " +
                        std::to_string(cc.value));
}

}  // namespace

PoissonSolution solve_poisson_phi(const ModelSpec& model, double theta, double theta0,
                                  double x, const TorusGrid& grid, PoissonRoute route) {
  auto mu = stationary_density_regime1(model, theta0, x, grid);
  std::vector<double> rhs;
  poisson_centering_check(model, theta, theta0, x, grid, mu, rhs);

  if (route == PoissonRoute::automatic)
    route = model.gradient ? PoissonRoute::cell_relation : PoissonRoute::finite_difference;

  PoissonSolution out;
  out.grid = grid;

  if (route == PoissonRoute::cell_relation) {
    if (!model.gradient) throw config_error("cell-relation Poisson route needs gradient structure");
    const auto& g = *model.gradient;
    auto cell = solve_cell_problem(model, theta0, x, grid, CellRoute::analytic);
    const double factor = -theta / (2.0 * g.D) * g.dV(x);
    out.phi.resize(grid.n);
    out.dphi_dy.resize(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      out.phi[j] = factor * cell.chi[j];
      out.dphi_dy[j] = factor * cell.dchi_dy[j];
    }
    return out;
  }

  // FD route: L^1 Phi = -rhs
  std::vector<double> f(grid.n);
  for (int j = 0; j < grid.n; ++j) f[j] = -rhs[j];
  if (model.gradient) {
    out.phi = solve_l1_fd_gradient(*model.gradient, grid, std::move(f));
  } else {
    out.phi = solve_l1_fd_generic(model, theta0, x, grid, mu, f);
  }
  recenter(out.phi, mu);
  out.dphi_dy = spectral_derivative(out.phi, grid.lambda);
  return out;
}

std::vector<double> poisson_dphi(const ModelSpec& model, double theta, double theta0,
                                 double x, const TorusGrid& grid, PoissonRoute route) {
  if (route == PoissonRoute::automatic)
    route = model.gradient ? PoissonRoute::cell_relation : PoissonRoute::finite_difference;
  if (route == PoissonRoute::cell_relation && model.gradient) {
    auto mu = stationary_density_regime1(model, theta0, x, grid);
    std::vector<double> rhs;
    poisson_centering_check(model, theta, theta0, x, grid, mu, rhs);
    const auto& g = *model.gradient;
    auto [Z, Zhat] = partition_constants(g.Q, g.D, grid);
    const double factor = -theta / (2.0 * g.D) * g.dV(x);
    std::vector<double> dphi(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      const double dchi = -1.0 + grid.lambda * std::exp(g.Q(grid.node(j)) / g.D) / Zhat;
      dphi[j] = factor * dchi;
    }
    return dphi;
  }
  return solve_poisson_phi(model, theta, theta0, x, grid, route).dphi_dy;
}

}  // namespace msde
