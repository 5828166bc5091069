#pragma once

#include <complex>

#include <Eigen/Sparse>

#include "gelfand/grid.hpp"

namespace gelfand {

// Symmetric finite-volume stiffness of -Laplace on the disk radial grid for
// angular mode ell; unknowns are nodes 0..N-1 for ell = 0 and 1..N-1
// otherwise (regularity pins the center for ell >= 1).
Eigen::SparseMatrix<double> radial_stiffness(const RadialGrid& g, int ell);

// Per-radian cell volumes matching the unknown layout of radial_stiffness.
Eigen::VectorXd radial_volumes(const RadialGrid& g, int ell);

// Stiffness on the annulus sector with Bloch phase omega applied across the
// angular wrap; omega = 1 gives the plain periodic (real) operator.
// Unknowns: (i-1)*Nt + j for radial i = 1..Nr-1, angular j = 0..Nt-1.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> sector_stiffness(const SectorGrid& g,
                                             std::complex<double> omega);

Eigen::VectorXd sector_volumes(const SectorGrid& g);

} // namespace gelfand
