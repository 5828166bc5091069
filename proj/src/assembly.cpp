#include "gelfand/assembly.hpp"

#include <vector>

namespace gelfand {

Eigen::SparseMatrix<double> radial_stiffness(const RadialGrid& g, int ell) {
  const int N = g.n();
  const int lo = ell == 0 ? 0 : 1; // first unknown node
  const int n = N - lo;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  auto idx = [&](int node) { return node - lo; };
  for (int i = lo; i < N; ++i) {
    double diag = g.flux_coef[i]; // outer face (node N is Dirichlet zero)
    if (i + 1 < N) {
      trip.emplace_back(idx(i), idx(i + 1), -g.flux_coef[i]);
      trip.emplace_back(idx(i + 1), idx(i), -g.flux_coef[i]);
    }
    // Face below: for ell >= 1 the center node is pinned to zero, so the
    // coupling is dropped and only the diagonal survives.
    if (i > 0) diag += g.flux_coef[i - 1];
    if (ell > 0) diag += static_cast<double>(ell) * ell * g.inv_r_w[i];
    trip.emplace_back(idx(i), idx(i), diag);
  }
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

Eigen::VectorXd radial_volumes(const RadialGrid& g, int ell) {
  const int N = g.n();
  const int lo = ell == 0 ? 0 : 1;
  Eigen::VectorXd V(N - lo);
  for (int i = lo; i < N; ++i) V(i - lo) = g.volume[i];
  return V;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sector_stiffness(const SectorGrid& g,
                                             std::complex<double> omega) {
  const int Nr = g.nr(), Nt = g.nt();
  const int n = (Nr - 1) * Nt;
  auto idx = [&](int i, int j) { return (i - 1) * Nt + j; };
  auto cast = [](std::complex<double> z) {
    if constexpr (std::is_same_v<Scalar, double>)
      return z.real();
    else
      return static_cast<Scalar>(z);
  };

  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(5 * n);
  std::vector<double> diag(n, 0.0);

  // Radial links (faces i = 1..Nr-2 connect interior nodes; faces 0 and
  // Nr-1 touch the Dirichlet circles and only add to the diagonal).
  for (int j = 0; j < Nt; ++j) {
    const double dth = g.dtheta_cell(j);
    for (int i = 0; i < Nr; ++i) {
      const double c = g.rflux_coef[i] * dth;
      if (i >= 1) diag[idx(i, j)] += c;
      if (i + 1 <= Nr - 1) diag[idx(i + 1, j)] += c;
      if (i >= 1 && i + 1 <= Nr - 1) {
        trip.emplace_back(idx(i, j), idx(i + 1, j), cast(-c));
        trip.emplace_back(idx(i + 1, j), idx(i, j), cast(-c));
      }
    }
  }
  // Angular links with the Bloch phase across the wrap face.
  for (int i = 1; i <= Nr - 1; ++i) {
    const double w = g.inv_r_cell(i);
    for (int j = 0; j < Nt; ++j) {
      const int jn = (j + 1) % Nt;
      const double c = w / g.dtheta_link(j);
      diag[idx(i, j)] += c;
      diag[idx(i, jn)] += c;
      const std::complex<double> ph = (jn == 0) ? omega : 1.0;
      trip.emplace_back(idx(i, j), idx(i, jn), cast(-c * ph));
      trip.emplace_back(idx(i, jn), idx(i, j), cast(-c * std::conj(ph)));
    }
  }
  for (int k = 0; k < n; ++k)
    trip.emplace_back(k, k, cast(std::complex<double>(diag[k])));

  Eigen::SparseMatrix<Scalar> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

template Eigen::SparseMatrix<double> sector_stiffness<double>(
    const SectorGrid&, std::complex<double>);
template Eigen::SparseMatrix<std::complex<double>> sector_stiffness<
    std::complex<double>>(const SectorGrid&, std::complex<double>);

Eigen::VectorXd sector_volumes(const SectorGrid& g) {
  const int Nr = g.nr(), Nt = g.nt();
  Eigen::VectorXd V((Nr - 1) * Nt);
  for (int i = 1; i <= Nr - 1; ++i)
    for (int j = 0; j < Nt; ++j) V((i - 1) * Nt + j) = g.volume(i, j);
  return V;
}

} // namespace gelfand
