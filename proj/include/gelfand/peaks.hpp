#pragma once

#include <optional>
#include <vector>

#include "gelfand/eigensolve.hpp"
#include "gelfand/spectral.hpp"

namespace gelfand {

/// Pointwise evaluator of a computed solution state.
class SolutionField {
public:
  SolutionField(const Discretization& disc, const Eigen::VectorXd& u_unknowns);
  double operator()(const Point& x) const;

private:
  const Discretization* disc_;
  Eigen::VectorXd radial_full_;
  Eigen::MatrixXd sector_full_; // (Nr+1) x Nt
};

struct PeakData {
  std::vector<Point> peaks;
  std::vector<double> heights;
  std::vector<double> delta; // lambda e^{u(x_j)} delta_j^2 = 1
  std::vector<double> sigma; // local masses, filled by local_mass
  double ball_radius = 0.0;
  double lambda = 0.0;
};

// Grid scan plus quadratic sub-grid fit; throws WrongPeakCount unless exactly
// m distinct maxima above half the global height are found.
PeakData locate_peaks(const Discretization& disc, const Eigen::VectorXd& u,
                      double lambda, int m_expected);

// Quadrature of lambda e^u over the balls B_R(x_j); boundary cells are cut
// against the circle exactly (straight-edge cell geometry).
std::vector<double> local_mass(const Discretization& disc, const Eigen::VectorXd& u,
                               double lambda, PeakData& peaks,
                               std::optional<double> ball_radius = {});

// c_j := v^k(x_j), raw values at the peaks.
std::vector<double> extract_c(const Discretization& disc, const EigenPair& vk,
                              const PeakData& peaks);

// sup over |x~| <= window of |v~(x~) - v(x_j) - mu c_j U(x~)| / mu.  Dropping
// the bubble term (first_order_only) gives the first-order comparison model.
double rescaled_profile_error(const Discretization& disc, const EigenPair& vk,
                              const PeakData& peaks, int j, double c_j, double mu,
                              double window, bool first_order_only = false);

// Far-field agreement of the solution with 8 pi sum_j G(., kappa_j), measured
// on sample points at least `min_dist` from every peak; returns the sup error.
double far_field_error_u(const Discretization& disc, const Eigen::VectorXd& u,
                         const DomainSpec& dom, const std::vector<Point>& kappa,
                         double min_dist);

// Same for v^k/mu against 8 pi sum_j c_j G(., kappa_j), relative to the sup of
// the model on the sample set.
double far_field_error_v(const Discretization& disc, const EigenPair& vk,
                         const DomainSpec& dom, const std::vector<Point>& kappa,
                         const std::vector<double>& c, double min_dist);

// Exact area of the intersection of a convex polygon with a disk.
double polygon_circle_area(const std::vector<Point>& poly, const Point& center,
                           double radius);

} // namespace gelfand
