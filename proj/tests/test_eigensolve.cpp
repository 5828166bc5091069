#include <doctest.h>

#include <cmath>

#include "gelfand/eigensolve.hpp"

using namespace gelfand;

namespace {

// Dirichlet spectrum of -Lap on the unit disk: squares of Bessel zeros.
constexpr double j01 = 2.404825557695773;
constexpr double j11 = 3.831705970207512;
constexpr double j21 = 5.135622301840683;
constexpr double j02 = 5.520078110286311;

Discretization disk_disc(int n) {
  return Discretization::disk(RadialGrid::disk(1.0, n, 1.0 / n));
}

} // namespace

TEST_SUITE("eigensolve") {

TEST_CASE("unit weight reproduces the Bessel spectrum of the disk") {
  const Discretization disc = disk_disc(768);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(767);
  const auto pairs = weighted_spectrum(disc, u, 1.0, 6);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0].mu == doctest::Approx(j01 * j01).epsilon(5e-5));
  CHECK(pairs[1].mu == doctest::Approx(j11 * j11).epsilon(5e-5));
  CHECK(pairs[2].mu == doctest::Approx(j11 * j11).epsilon(5e-5));
  CHECK(pairs[3].mu == doctest::Approx(j21 * j21).epsilon(5e-5));
  CHECK(pairs[4].mu == doctest::Approx(j21 * j21).epsilon(5e-5));
  CHECK(pairs[5].mu == doctest::Approx(j02 * j02).epsilon(5e-5));

  CHECK(pairs[0].wave_number == 0);
  CHECK(pairs[1].wave_number == 1);
  CHECK(pairs[2].wave_number == 1);
  CHECK(pairs[1].mu == pairs[2].mu); // rotational pair carries equal mu
  CHECK(pairs[1].degenerate);
  CHECK(pairs[5].wave_number == 0);

  for (const auto& p : pairs) {
    CHECK(p.residual <= 1e-9);
    CHECK(p.radial.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.radial(p.radial.size() - 1) == doctest::Approx(0.0));
  }
  // ground mode one-signed with value +1 at its maximum
  CHECK(pairs[0].radial.maxCoeff() == doctest::Approx(1.0));
  CHECK(pairs[0].radial.minCoeff() >= 0.0);
}

TEST_CASE("weighted problem on a computed state") {
  const Discretization disc = disk_disc(512);
  PdeSolver solver(disc);
  const double lam = 0.5;
  const Eigen::VectorXd u =
      solver.newton_solve(lam, Eigen::VectorXd::Zero(solver.unknowns()));
  const auto pairs = weighted_spectrum(disc, u, lam, 5);
  REQUIRE(pairs.size() == 5);
  for (size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].mu >= pairs[i - 1].mu);
  CHECK(pairs[0].mu > 0.0);

  // weighted orthogonality, normalized by the diagonal
  for (size_t a = 0; a < pairs.size(); ++a)
    for (size_t b = a + 1; b < pairs.size(); ++b) {
      if (std::abs(pairs[a].mu - pairs[b].mu) < 1e-10) continue; // pair span
      const double iab = weighted_inner(disc, u, lam, pairs[a], pairs[b]);
      const double iaa = weighted_inner(disc, u, lam, pairs[a], pairs[a]);
      const double ibb = weighted_inner(disc, u, lam, pairs[b], pairs[b]);
      CHECK(std::abs(iab) / std::sqrt(iaa * ibb) <= 1e-9);
    }
}

TEST_CASE("grid refinement converges at second order") {
  double mu[3];
  int idx = 0;
  for (int n : {192, 384, 768}) {
    const Discretization disc = disk_disc(n);
    mu[idx++] = weighted_spectrum(disc, Eigen::VectorXd::Zero(n - 1), 1.0, 1)[0].mu;
  }
  const double ratio = (mu[0] - mu[1]) / (mu[1] - mu[2]);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("sector Bloch blocks reproduce the full-annulus spectrum") {
  // Same continuum problem discretized as one full annulus (m=1) and as a
  // three-fold sector with Bloch classes; unit weight.
  const int nr = 256;
  SectorGrid full = SectorGrid::make(0.5, 1, nr, 297, 0.75, 0.5 / nr, 2 * M_PI / 297);
  SectorGrid sect = SectorGrid::make(0.5, 3, nr, 99, 0.75, 0.5 / nr, 2 * M_PI / 297);
  const Discretization dfull = Discretization::annulus(full);
  const Discretization dsect = Discretization::annulus(sect);
  const auto pf = weighted_spectrum(
      dfull, Eigen::VectorXd::Zero((full.nr() - 1) * full.nt()), 1.0, 6);
  const auto ps = weighted_spectrum(
      dsect, Eigen::VectorXd::Zero((sect.nr() - 1) * sect.nt()), 1.0, 6);
  for (int k = 0; k < 6; ++k)
    CHECK(pf[k].mu == doctest::Approx(ps[k].mu).epsilon(2e-3));
}

TEST_CASE("sector eigenfunction evaluation is periodic across copies") {
  SectorGrid g = SectorGrid::make(0.5, 3, 128, 65, 0.72, 0.5 / 128, 0.01);
  const Discretization disc = Discretization::annulus(g);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero((g.nr() - 1) * g.nt());
  const auto pairs = weighted_spectrum(disc, u, 1.0, 3);
  const EigenPair& p = pairs[0]; // q = 0 ground state, fully symmetric
  CHECK(p.wave_number == 0);
  const Point x(0.71, 0.05);
  const double v0 = eigenfunction_value(disc, p, x);
  const double c = std::cos(2 * M_PI / 3), s = std::sin(2 * M_PI / 3);
  const Point xr(c * x.x() - s * x.y(), s * x.x() + c * x.y());
  CHECK(eigenfunction_value(disc, p, xr) == doctest::Approx(v0).epsilon(1e-10));
}

TEST_CASE("band-gap report guards") {
  const Discretization disc = disk_disc(128);
  const auto pairs =
      weighted_spectrum(disc, Eigen::VectorXd::Zero(127), 1.0, 2);
  const BandGapReport rep = check_band_gap(pairs, 1, 1.0);
  CHECK(!rep.complete);
}

TEST_CASE("bad weight rejected") {
  const Discretization disc = disk_disc(128);
  CHECK_THROWS_AS(
      (void)weighted_spectrum(disc, Eigen::VectorXd::Zero(127), -1.0, 2),
      WeightNotPositive);
}

} // TEST_SUITE
