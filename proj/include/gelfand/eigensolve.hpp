#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gelfand/pde.hpp"

namespace gelfand {

struct EigenOptions {
  double tol = 1e-12;        // iterative eigensolve tolerance
  int max_iterations = 500;
  double degenerate_tol = 1e-8; // relative grouping of equal eigenvalues
};

/// One eigenpair of the weighted problem -Lap v = mu lambda e^u v, with the
/// eigenfunction sup-normalized (largest-magnitude value +1).
struct EigenPair {
  double mu = 0.0;
  int k = 0;           // 1-based rank in the merged ascending list
  int wave_number = 0; // angular mode: l (disk) or Bloch class q (annulus)
  int partner = 0;     // 0 = cos-like, 1 = sin-like member of a rotational pair
  bool degenerate = false;
  double residual = 0.0; // scaled discrete eigen-residual

  // Disk payload: radial profile on all nodes including boundary.
  Eigen::VectorXd radial;
  // Annulus payload: complex Bloch block on (Nr+1) x Nt sector nodes plus the
  // phase/scale prefactor of this real partner.
  Eigen::MatrixXcd sector;
  std::complex<double> prefactor{1.0, 0.0};
};

// The `count` smallest eigenpairs, assembled from independent angular
// wave-number sub-problems and merged deterministically.  `u` uses the
// unknown layout of PdeSolver on the same discretization.
std::vector<EigenPair> weighted_spectrum(const Discretization& disc,
                                         const Eigen::VectorXd& u, double lambda,
                                         int count, const EigenOptions& opts = {});

// Pointwise evaluation of a computed eigenfunction.
double eigenfunction_value(const Discretization& disc, const EigenPair& pair,
                           const Point& x);

// Weighted inner product  integral lambda e^u v_a v_b  over the full domain,
// computed in factored form so cross-wave-number products vanish to round-off.
double weighted_inner(const Discretization& disc, const Eigen::VectorXd& u,
                      double lambda, const EigenPair& a, const EigenPair& b);

struct BandGapReport {
  bool complete = false;   // at least 3m+1 pairs were available
  bool gap_ok = false;     // mu^{3m+1} > 1
  double mu_after_band = 0.0;
  double second_band_max_dev = 0.0;        // max |mu^k - 1|, k = m+1..3m
  double second_band_dev_over_lambda = 0.0;
};

BandGapReport check_band_gap(const std::vector<EigenPair>& pairs, int m,
                             double lambda);

} // namespace gelfand
