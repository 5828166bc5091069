#pragma once

#include <optional>

#include <Eigen/Dense>

#include "gelfand/domain.hpp"

namespace gelfand {

/// Value and x-derivatives of the Green function G(x,y) or of its
/// regular part K(x,y).  The Hessian is filled on request only.
struct GreenEval {
  double value = 0.0;
  Eigen::Vector2d grad_x = Eigen::Vector2d::Zero();
  std::optional<Eigen::Matrix2d> hess_x;
};

/// Robin function R(x) = K(x,x) with gradient and Hessian.
struct RobinEval {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

// Dirichlet Green function of -Laplace, G(x,y) = (1/2pi) log(1/|x-y|) + K(x,y).
// Throws PointOutsideDomain / CoincidentPoints.
GreenEval green(const DomainSpec& dom, const Point& x, const Point& y,
                bool with_hessian = false);

// Regular part K; smooth up to the diagonal (x == y allowed).
GreenEval regular_part(const DomainSpec& dom, const Point& x, const Point& y,
                       bool with_hessian = false);

RobinEval robin(const DomainSpec& dom, const Point& x);

// Mixed second derivative  d^2 G / dx_a dy_b,  needed for Hessians of the
// vortex Hamiltonian.  Same preconditions as green().
Eigen::Matrix2d green_cross_hessian(const DomainSpec& dom, const Point& x,
                                    const Point& y);

// Geometric tail bound for the truncated annulus kernel series: an upper
// bound on the modulus of the dropped modes of K(x,y).  Zero for the disk
// (closed form).
double series_tail_bound(const DomainSpec& dom, const Point& x, const Point& y);

} // namespace gelfand
