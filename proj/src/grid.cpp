#include "gelfand/grid.hpp"

#include <algorithm>
#include <cmath>

#include "gelfand/errors.hpp"

namespace gelfand {

namespace {

// Solve for the sinh stretching strength beta such that the first interval
// of n intervals over [0, L] has length h0.  beta = 0 means uniform.
double solve_beta(double L, int n, double h0) {
  if (h0 * n >= L) return 0.0; // uniform grid is already fine enough
  auto first_interval = [&](double beta) {
    return L * std::sinh(beta / n) / std::sinh(beta);
  };
  double lo = 1e-8, hi = 60.0;
  if (first_interval(hi) > h0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (first_interval(mid) > h0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double logmean(double x, double y) { return (y - x) / std::log(y / x); }

} // namespace

std::vector<double> sinh_nodes_left(double length, int n, double h0) {
  const double beta = solve_beta(length, n, h0);
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double xi = static_cast<double>(i) / n;
    x[i] = beta == 0.0 ? length * xi : length * std::sinh(beta * xi) / std::sinh(beta);
  }
  x[0] = 0.0;
  x[n] = length;
  return x;
}

std::vector<double> sinh_nodes_interior(double lo, double hi, double center, int n,
                                        double h0) {
  if (!(center > lo && center < hi))
    throw ConfigError("sinh_nodes_interior: center outside interval");
  // r(xi) = center + c sinh(beta (xi - xi0)) on xi in [0,1]; xi0 and c are
  // fixed by the endpoints, beta by the requested spacing at the center.
  auto build = [&](double beta, std::vector<double>* out) -> double {
    double xl = 0.0, xh = 1.0; // locate xi0 by bisection
    for (int it = 0; it < 200; ++it) {
      const double xi0 = 0.5 * (xl + xh);
      const double ratio = std::sinh(beta * xi0) / std::sinh(beta * (1.0 - xi0));
      (ratio < (center - lo) / (hi - center) ? xl : xh) = xi0;
    }
    const double xi0 = 0.5 * (xl + xh);
    const double c = (hi - center) / std::sinh(beta * (1.0 - xi0));
    if (out) {
      out->resize(n + 1);
      for (int i = 0; i <= n; ++i) {
        const double xi = static_cast<double>(i) / n;
        (*out)[i] = center + c * std::sinh(beta * (xi - xi0));
      }
      (*out)[0] = lo;
      (*out)[n] = hi;
    }
    return c * beta / n; // spacing at the cluster point
  };

  if (build(1e-6, nullptr) <= h0) {
    // effectively uniform already
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = lo + (hi - lo) * i / n;
    return x;
  }
  double bl = 1e-6, bh = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (bl + bh);
    (build(mid, nullptr) > h0 ? bl : bh) = mid;
  }
  std::vector<double> x;
  build(0.5 * (bl + bh), &x);
  return x;
}

double RadialGrid::spacing_at(int i) const {
  const int n_ = n();
  if (i <= 0) return r[1] - r[0];
  if (i >= n_) return r[n_] - r[n_ - 1];
  return 0.5 * (r[i + 1] - r[i - 1]);
}

RadialGrid RadialGrid::disk(double rho, int n_r, double h0) {
  if (n_r < 64) throw ConfigError("RadialGrid: need at least 64 radial cells");
  return from_nodes(rho, sinh_nodes_left(rho, n_r, h0));
}

RadialGrid RadialGrid::from_nodes(double rho, std::vector<double> nodes) {
  RadialGrid g;
  g.rho = rho;
  g.r = std::move(nodes);
  const int n = g.n();
  g.face.resize(n);
  g.flux_coef.resize(n);
  g.volume.resize(n);
  g.inv_r_w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) g.face[i] = 0.5 * (g.r[i] + g.r[i + 1]);
  for (int i = 0; i < n; ++i) {
    const double h = g.r[i + 1] - g.r[i];
    // Midpoint face coefficient near the axis (exact for regular even
    // profiles), log-mean in the far field where the solution carries the
    // log r Green tail.  Both are second order; the switch region has
    // relative difference (h/r)^2/12 < 1e-3.
    const bool log_regime = i > 0 && g.face[i] > 9.0 * h;
    g.flux_coef[i] = (log_regime ? logmean(g.r[i], g.r[i + 1]) : g.face[i]) / h;
  }
  for (int i = 0; i < n; ++i) {
    const double fl = i == 0 ? 0.0 : g.face[i - 1];
    g.volume[i] = 0.5 * (g.face[i] * g.face[i] - fl * fl);
    if (i >= 1) g.inv_r_w[i] = std::log(g.face[i] / g.face[i - 1]);
  }
  return g;
}

double SectorGrid::dtheta_link(int j) const {
  const int n = nt();
  if (j < n - 1) return theta[j + 1] - theta[j];
  return (theta[0] + 2.0 * M_PI / m) - theta[n - 1];
}

double SectorGrid::radial_spacing_at(int i) const {
  const int n = nr();
  if (i <= 0) return r[1] - r[0];
  if (i >= n) return r[n] - r[n - 1];
  return 0.5 * (r[i + 1] - r[i - 1]);
}

double SectorGrid::volume(int i, int j) const {
  return 0.5 * (rface[i] * rface[i] - rface[i - 1] * rface[i - 1]) * dtheta_cell(j);
}

double SectorGrid::inv_r_cell(int i) const {
  return std::log(rface[i] / rface[i - 1]);
}

SectorGrid SectorGrid::make(double a, int m, int n_r, int n_t, double r_peak,
                            double hr0, double ht0) {
  if (n_r < 64) throw ConfigError("SectorGrid: need at least 64 radial cells");
  if (n_t < 8) throw ConfigError("SectorGrid: need at least 8 angular cells");
  if (n_t % 2 == 0) ++n_t; // odd cell count puts a node at theta = 0
  const double span = M_PI / m;
  // Faces from a symmetric interior-clustered set on [-pi/m, pi/m]; cell
  // centers then include theta = 0 exactly.
  return from_nodes(a, m, sinh_nodes_interior(a, 1.0, r_peak, n_r, hr0),
                    sinh_nodes_interior(-span, span, 0.0, n_t, ht0));
}

SectorGrid SectorGrid::from_nodes(double a, int m, std::vector<double> nodes,
                                  std::vector<double> faces) {
  SectorGrid g;
  g.a = a;
  g.m = m;
  g.r = std::move(nodes);
  g.theta_face = std::move(faces);
  const int n_t = static_cast<int>(g.theta_face.size()) - 1;
  g.theta.resize(n_t);
  for (int j = 0; j < n_t; ++j)
    g.theta[j] = 0.5 * (g.theta_face[j] + g.theta_face[j + 1]);
  if (n_t % 2 == 1) g.theta[(n_t - 1) / 2] = 0.0;

  const int n = g.nr();
  g.rface.resize(n);
  g.rflux_coef.resize(n);
  for (int i = 0; i < n; ++i) {
    g.rface[i] = 0.5 * (g.r[i] + g.r[i + 1]);
    g.rflux_coef[i] = logmean(g.r[i], g.r[i + 1]) / (g.r[i + 1] - g.r[i]);
  }
  return g;
}

double interp_quadratic(const std::vector<double>& x, const Eigen::VectorXd& f,
                        double xq) {
  const int n = static_cast<int>(x.size());
  int i = static_cast<int>(std::lower_bound(x.begin(), x.end(), xq) - x.begin());
  i = std::clamp(i, 1, n - 2);
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double l0 = (xq - x1) * (xq - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (xq - x0) * (xq - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (xq - x0) * (xq - x1) / ((x2 - x0) * (x2 - x1));
  return l0 * f(i - 1) + l1 * f(i) + l2 * f(i + 1);
}

} // namespace gelfand
