#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gelfand/green.hpp"

namespace gelfand {

enum class Symmetry { None, Polygonal };

/// An ordered set of m distinct interior points, optionally tagged as the
/// vertices of a regular m-gon of radius r0 (the annulus ansatz).
struct Configuration {
  std::vector<Point> points;
  Symmetry symmetry = Symmetry::None;
  double polygon_radius = 0.0; // meaningful for Symmetry::Polygonal

  int m() const { return static_cast<int>(points.size()); }

  static Configuration polygonal(int m, double r0);
  void validate(const DomainSpec& dom) const;
};

struct NewtonOptions {
  double grad_tol = 1e-12;
  int max_iterations = 100;
  double damping_floor = std::pow(2.0, -20);
};

struct CriticalPointReport {
  Configuration config;
  double grad_norm = 0.0;
  Eigen::VectorXd hess_eigenvalues; // of the full 2m x 2m Hessian
  bool converged = false;
  int iterations = 0;
};

// H^m(x_1..x_m) = 1/2 sum R(x_j) + 1/2 sum_{j != h} G(x_j, x_h).
double hamiltonian_value(const DomainSpec& dom, const Configuration& config);

// Analytic gradient (2m) and Hessian (2m x 2m) assembled from the kernel
// derivatives.
Eigen::VectorXd hamiltonian_grad(const DomainSpec& dom, const Configuration& config);
Eigen::MatrixXd hamiltonian_hess(const DomainSpec& dom, const Configuration& config);

// Damped Newton search for a critical point of H^m.  A Polygonal initial
// configuration triggers the symmetry-reduced scalar solve in r0 with a
// bisection-safeguarded bracket.
CriticalPointReport find_critical_point(const DomainSpec& dom,
                                        const Configuration& initial,
                                        const NewtonOptions& opts = {});

// Scalar reduction dH/dr0 along the polygonal family (annulus).
double polygonal_radial_derivative(const DomainSpec& dom, int m, double r0);

} // namespace gelfand
