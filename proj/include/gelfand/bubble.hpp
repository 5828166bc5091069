#pragma once

namespace gelfand {

// The entire Liouville profile U(x) = log 1/(1 + |x|^2/8)^2, radial form.
double bubble_profile(double r);

struct BubbleConstants {
  double mass = 0.0;       // integral of e^U over the plane
  double mass_u = 0.0;     // integral of e^U U
  double log_moment = 0.0; // (1/2pi) integral of log|y|^{-1} e^U
};

// Adaptive radial quadrature with analytic treatment of the r^{-4} tail.
// Throws QuadratureNotConverged if the requested tolerance is unreachable.
BubbleConstants bubble_constants(double rel_tol = 1e-10);

} // namespace gelfand
