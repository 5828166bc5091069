#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gelfand/hamiltonian.hpp"

namespace gelfand {

/// The m x m symmetric interaction matrix built from Robin and Green values
/// at a candidate blow-up configuration.  Its spectrum drives every
/// second-order prediction.
struct HMatrix {
  Eigen::MatrixXd entries;
  Configuration source_config;
};

struct SpectralPrediction {
  Eigen::VectorXd Lambda; // ascending eigenvalues of the h-matrix
  Eigen::MatrixXd C;      // orthonormal eigenvectors (columns), sign-fixed
  Eigen::VectorXd d;      // per-peak scaling constants d_j
  Eigen::VectorXd eta;    // ascending eigenvalues of D (Hess H^m) D, 2m entries
  Configuration config;
};

struct CirculantGroup {
  double value = 0.0;
  std::vector<int> ks; // 1-based eigenvalue indices in the group
};

struct CirculantReport {
  std::vector<CirculantGroup> groups;
  bool has_alternating = false; // simple alternating eigenvector (m even)
  int alternating_k = -1;
  Eigen::VectorXd dft_eigenvalues; // sorted symbol values of the first row
};

// h_ii = R(k_i) + 2 sum_{h != i} G(k_h, k_i),  h_ij = -G(k_i, k_j).
// Warns (returns normally) when the configuration is not critical; callers
// can check the gradient themselves.
HMatrix assemble_h(const DomainSpec& dom, const Configuration& config);

// Full symmetric eigendecomposition; eigenvectors unit length with the
// largest-magnitude entry made positive.
SpectralPrediction eigen_h(const HMatrix& h);

// d_j = (1/8) exp{4 pi R(k_j) + 4 pi sum_{i != j} G(k_j, k_i)}.
Eigen::VectorXd predict_d(const DomainSpec& dom, const Configuration& config);

// Two-term eigenvalue expansion for the first band, 1 <= k <= m.
double predict_mu(const SpectralPrediction& pred, int k, double lambda);

// Predicted height of the j-th peak: -2 log(lambda) - 2 log(d_j).
double predict_peak_height(const SpectralPrediction& pred, int j, double lambda);

// Eigenvalues of D (Hess H^m) D with D = diag[d_1,d_1,...,d_m,d_m], ascending.
Eigen::VectorXd eta_spectrum(const Eigen::MatrixXd& hess, const Eigen::VectorXd& d);

// Second-band expansion, m+1 <= k <= 3m:  1 - 48 pi eta^{2m-(k-m)+1} lambda.
double predict_mu_second_band(const SpectralPrediction& pred, int k, double lambda);

// Indices j with |c_j^k| > tol * max_i |c_i^k| (1-based j).
std::vector<int> concentration_set(const SpectralPrediction& pred, int k, double tol);

// Multiplicity table for a circulant h (polygonal annulus configurations).
CirculantReport circulant_report(const HMatrix& h, double circulant_tol = 1e-10,
                                 double group_tol = 1e-9);

// Convenience: assemble + decompose + d (+ eta when with_hessian).
SpectralPrediction make_prediction(const DomainSpec& dom, const Configuration& config,
                                   bool with_hessian = true);

} // namespace gelfand
