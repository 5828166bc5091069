#include "gelfand/hamiltonian.hpp"

#include <cmath>

namespace gelfand {

Configuration Configuration::polygonal(int m, double r0) {
  Configuration c;
  c.symmetry = Symmetry::Polygonal;
  c.polygon_radius = r0;
  c.points.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * M_PI * j / m;
    c.points.emplace_back(r0 * std::cos(t), r0 * std::sin(t));
  }
  return c;
}

void Configuration::validate(const DomainSpec& dom) const {
  if (points.empty()) throw DegenerateConfiguration("empty configuration");
  const double min_sep = 1e-12 * dom.diameter();
  for (size_t j = 0; j < points.size(); ++j) {
    dom.require_interior(points[j], "configuration");
    for (size_t h = j + 1; h < points.size(); ++h)
      if ((points[j] - points[h]).norm() < min_sep)
        throw DegenerateConfiguration("coincident points in configuration");
  }
}

double hamiltonian_value(const DomainSpec& dom, const Configuration& config) {
  config.validate(dom);
  const auto& p = config.points;
  double H = 0.0;
  for (size_t j = 0; j < p.size(); ++j) H += 0.5 * robin(dom, p[j]).value;
  for (size_t j = 0; j < p.size(); ++j)
    for (size_t h = j + 1; h < p.size(); ++h)
      H += green(dom, p[j], p[h]).value;
  return H;
}

Eigen::VectorXd hamiltonian_grad(const DomainSpec& dom, const Configuration& config) {
  config.validate(dom);
  const auto& p = config.points;
  const int m = config.m();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * m);
  for (int j = 0; j < m; ++j) {
    Eigen::Vector2d gj = 0.5 * robin(dom, p[j]).grad;
    for (int h = 0; h < m; ++h)
      if (h != j) gj += green(dom, p[j], p[h]).grad_x;
    g.segment<2>(2 * j) = gj;
  }
  return g;
}

Eigen::MatrixXd hamiltonian_hess(const DomainSpec& dom, const Configuration& config) {
  config.validate(dom);
  const auto& p = config.points;
  const int m = config.m();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    Eigen::Matrix2d D = 0.5 * robin(dom, p[j]).hess;
    for (int h = 0; h < m; ++h)
      if (h != j) D += *green(dom, p[j], p[h], true).hess_x;
    H.block<2, 2>(2 * j, 2 * j) = D;
    for (int h = j + 1; h < m; ++h) {
      const Eigen::Matrix2d M = green_cross_hessian(dom, p[j], p[h]);
      H.block<2, 2>(2 * j, 2 * h) = M;
      H.block<2, 2>(2 * h, 2 * j) = M.transpose();
    }
  }
  return H;
}

double polygonal_radial_derivative(const DomainSpec& dom, int m, double r0) {
  const Configuration c = Configuration::polygonal(m, r0);
  const Eigen::VectorXd g = hamiltonian_grad(dom, c);
  // By symmetry every vertex contributes the same radial component.
  const Eigen::Vector2d e1 = c.points[0].normalized();
  return m * g.segment<2>(0).dot(e1);
}

namespace {

CriticalPointReport report_for(const DomainSpec& dom, const Configuration& c,
                               bool converged, int iters) {
  CriticalPointReport rep;
  rep.config = c;
  rep.grad_norm = hamiltonian_grad(dom, c).norm();
  Eigen::MatrixXd H = hamiltonian_hess(dom, c);
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  rep.hess_eigenvalues = es.eigenvalues();
  rep.converged = converged;
  rep.iterations = iters;
  return rep;
}

// Scalar Newton on dH/dr0 = 0 over the polygonal family, safeguarded by a
// bisection bracket located by a sign scan over (a + 0.05, 0.95).
CriticalPointReport polygonal_search(const DomainSpec& dom, int m,
                                     const NewtonOptions& opts) {
  const double a = dom.inner_radius;
  const double lo = a + 0.05, hi = 0.95;
  const int n_scan = 64;
  double bl = 0, bh = 0, gl = 0;
  bool found = false;
  double prev_r = lo, prev_g = polygonal_radial_derivative(dom, m, lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double r = lo + (hi - lo) * i / n_scan;
    const double g = polygonal_radial_derivative(dom, m, r);
    if (prev_g == 0.0) { bl = bh = prev_r; gl = 0; found = true; break; }
    if (g == 0.0) { bl = bh = r; gl = 0; found = true; break; }
    if (prev_g * g < 0) { bl = prev_r; bh = r; gl = prev_g; found = true; break; }
    prev_r = r; prev_g = g;
  }
  if (!found)
    throw NewtonDiverged("polygonal_search: no sign change of dH/dr0 in scan");

  double r = 0.5 * (bl + bh);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double g = polygonal_radial_derivative(dom, m, r);
    if (std::abs(g) <= opts.grad_tol) break;
    // dg/dr0 from the full Hessian restricted to the radial polygon direction.
    const Configuration c = Configuration::polygonal(m, r);
    const Eigen::MatrixXd H = hamiltonian_hess(dom, c);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(2 * m);
    for (int j = 0; j < m; ++j) dir.segment<2>(2 * j) = c.points[j].normalized();
    const double gp = dir.dot(H * dir);
    double rn = r - g / gp;
    if (!(gp != 0.0) || rn <= bl || rn >= bh) rn = 0.5 * (bl + bh); // bisect
    if (g * gl > 0) bl = r; else bh = r;
    r = rn;
  }
  if (std::abs(polygonal_radial_derivative(dom, m, r)) > opts.grad_tol)
    throw NewtonDiverged("polygonal_search: iteration cap reached");
  return report_for(dom, Configuration::polygonal(m, r), true, it);
}

} // namespace

CriticalPointReport find_critical_point(const DomainSpec& dom,
                                        const Configuration& initial,
                                        const NewtonOptions& opts) {
  initial.validate(dom);
  if (initial.symmetry == Symmetry::Polygonal) {
    if (dom.kind != DomainKind::Annulus)
      throw ConfigError("polygonal ansatz is an annulus reduction");
    return polygonal_search(dom, initial.m(), opts);
  }

  const int m = initial.m();
  Configuration c = initial;
  Eigen::VectorXd g = hamiltonian_grad(dom, c);
  int it = 0;
  for (; it < opts.max_iterations && g.norm() > opts.grad_tol; ++it) {
    Eigen::MatrixXd H = hamiltonian_hess(dom, c);
    H = 0.5 * (H + H.transpose()).eval();
    // Pseudoinverse step: rotationally symmetric domains carry a zero
    // Hessian direction along the orbit of the critical set.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const double cut = 1e-11 * es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = es.eigenvalues();
    for (int i = 0; i < inv.size(); ++i)
      inv(i) = std::abs(inv(i)) > cut ? 1.0 / inv(i) : 0.0;
    const Eigen::VectorXd step =
        -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose()) * g;
    double damp = 1.0;
    while (true) {
      Configuration trial = c;
      bool inside = true;
      for (int j = 0; j < m; ++j) {
        trial.points[j] += damp * step.segment<2>(2 * j);
        if (!dom.contains(trial.points[j], 1e-9)) inside = false;
      }
      double gn = std::numeric_limits<double>::infinity();
      if (inside) gn = hamiltonian_grad(dom, trial).norm();
      if (inside && (gn < g.norm() || gn <= opts.grad_tol)) {
        c = trial;
        g = hamiltonian_grad(dom, c);
        break;
      }
      damp *= 0.5;
      if (damp < opts.damping_floor) {
        if (!inside)
          throw EscapedDomain("find_critical_point: iterate left the domain");
        throw NewtonDiverged("find_critical_point: damping floor reached");
      }
    }
  }
  if (g.norm() > opts.grad_tol)
    throw NewtonDiverged("find_critical_point: iteration cap reached");
  return report_for(dom, c, true, it);
}

} // namespace gelfand
