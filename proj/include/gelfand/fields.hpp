#pragma once

#include <Eigen/Dense>

#include "gelfand/grid.hpp"

namespace gelfand {

/// Pointwise evaluator of a computed solution state (quadratic interpolation
/// on the grid, even extension at the disk center, periodic in the sector
/// angle).
class SolutionField {
public:
  SolutionField(const Discretization& disc, const Eigen::VectorXd& u_unknowns);
  double operator()(const Point& x) const;

private:
  const Discretization* disc_;
  Eigen::VectorXd radial_full_;
  Eigen::MatrixXd sector_full_; // (Nr+1) x Nt
};

} // namespace gelfand
