#include <doctest.h>

#include <cmath>
#include <random>

#include "gelfand/bubble.hpp"
#include "gelfand/peaks.hpp"

using namespace gelfand;

namespace {

double lam_of_eps(double eps) {
  const double e2 = eps * eps;
  return 8.0 * e2 / ((1.0 + e2) * (1.0 + e2));
}

} // namespace

TEST_SUITE("peaks") {

TEST_CASE("polygon-circle intersection area") {
  const std::vector<Point> big = {Point(-2, -2), Point(2, -2), Point(2, 2),
                                  Point(-2, 2)};
  CHECK(polygon_circle_area(big, Point(0, 0), 1.0) ==
        doctest::Approx(M_PI).epsilon(1e-12));
  const std::vector<Point> quadrant = {Point(0, 0), Point(2, 0), Point(2, 2),
                                       Point(0, 2)};
  CHECK(polygon_circle_area(quadrant, Point(0, 0), 1.0) ==
        doctest::Approx(M_PI / 4).epsilon(1e-12));
  const std::vector<Point> small = {Point(-0.1, -0.1), Point(0.1, -0.1),
                                    Point(0.1, 0.1), Point(-0.1, 0.1)};
  CHECK(polygon_circle_area(small, Point(0, 0), 1.0) ==
        doctest::Approx(0.04).epsilon(1e-12));
  // generic offset case against Monte Carlo
  const std::vector<Point> cell = {Point(0.4, 0.2), Point(0.9, 0.25),
                                   Point(0.95, 0.8), Point(0.35, 0.7)};
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> Ux(0.35, 0.95), Uy(0.2, 0.8);
  // point-in-quad via two triangles
  auto inside_tri = [](const Point& p, const Point& a, const Point& b,
                       const Point& c) {
    auto cr = [](const Point& u, const Point& v) {
      return u.x() * v.y() - u.y() * v.x();
    };
    const double d1 = cr(b - a, p - a), d2 = cr(c - b, p - b), d3 = cr(a - c, p - c);
    return (d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0);
  };
  const Point ctr(0.55, 0.5);
  const double R = 0.28;
  int hits = 0;
  const int n_mc = 2000000;
  for (int t = 0; t < n_mc; ++t) {
    const Point p(Ux(rng), Uy(rng));
    const bool in_quad = inside_tri(p, cell[0], cell[1], cell[2]) ||
                         inside_tri(p, cell[0], cell[2], cell[3]);
    if (in_quad && (p - ctr).norm() <= R) ++hits;
  }
  const double mc = 0.6 * 0.6 * hits / n_mc;
  CHECK(polygon_circle_area(cell, ctr, R) == doctest::Approx(mc).epsilon(5e-3));
}

TEST_CASE("disk state: peak location, scaling identity, local mass") {
  const Discretization disc = Discretization::disk(RadialGrid::disk(1.0, 2048, 2e-5));
  PdeSolver solver(disc);
  const double lam0 = 0.05;
  BranchState s = solver.make_state(
      lam0, solver.newton_solve(lam0, Eigen::VectorXd::Zero(solver.unknowns())));
  BranchTarget t;
  t.u_max = 18.0;
  s = solver.continue_branch(s, t).states.back();
  s = solver.state_at_umax(s, 18.0);
  const double lam = s.lambda;

  PeakData pk = locate_peaks(disc, s.u, lam, 1);
  REQUIRE(pk.peaks.size() == 1);
  CHECK(pk.peaks[0].norm() <= 1e-12);
  CHECK(pk.heights[0] == doctest::Approx(s.u_max));
  CHECK(lam * std::exp(pk.heights[0]) * pk.delta[0] * pk.delta[0] ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(pk.ball_radius == doctest::Approx(1.0));

  local_mass(disc, s.u, lam, pk, 0.5);
  const double eps = 1.0 / std::sqrt(std::exp(9.0) - 1.0); // umax = 18
  const double sigma_exact = 8.0 * M_PI * 0.25 / (0.25 + eps * eps);
  CHECK(pk.sigma[0] == doctest::Approx(sigma_exact).epsilon(1e-5));
  CHECK(pk.sigma[0] <= solver.mass(s.u, lam));

  CHECK_THROWS_AS((void)locate_peaks(disc, s.u, lam, 2), WrongPeakCount);

  // far field of u matches the Green superposition as lambda shrinks
  const double err18 = far_field_error_u(disc, s.u, DomainSpec::disk(1.0),
                                         pk.peaks, 0.3);
  BranchState s2 = solver.state_at_umax(s, 24.0);
  PeakData pk2 = locate_peaks(disc, s2.u, s2.lambda, 1);
  const double err24 = far_field_error_u(disc, s2.u, DomainSpec::disk(1.0),
                                         pk2.peaks, 0.3);
  CHECK(err24 < err18);
  CHECK(err24 < 0.05);
  (void)lam_of_eps;
}

TEST_CASE("rescaled profile of the ground eigenfunction") {
  const Discretization disc = Discretization::disk(RadialGrid::disk(1.0, 2048, 1e-5));
  PdeSolver solver(disc);
  BranchState s = solver.make_state(
      0.05, solver.newton_solve(0.05, Eigen::VectorXd::Zero(solver.unknowns())));
  BranchTarget t;
  t.u_max = 20.0;
  s = solver.continue_branch(s, t).states.back();

  PeakData pk = locate_peaks(disc, s.u, s.lambda, 1);
  const auto pairs = weighted_spectrum(disc, s.u, s.lambda, 1);
  const double c1 = extract_c(disc, pairs[0], pk)[0];
  CHECK(c1 > 0.5); // sign-definite ground mode concentrates at the peak

  const double e2 = rescaled_profile_error(disc, pairs[0], pk, 1, c1,
                                           pairs[0].mu, 10.0, false);
  const double e1 = rescaled_profile_error(disc, pairs[0], pk, 1, c1,
                                           pairs[0].mu, 10.0, true);
  CHECK(e2 < e1); // the bubble correction is active
  CHECK_THROWS_AS((void)rescaled_profile_error(disc, pairs[0], pk, 1, c1,
                                               pairs[0].mu, 1e9, false),
                  WindowExceedsGrid);
}

TEST_CASE("bubble profile endpoints") {
  CHECK(bubble_profile(0.0) == doctest::Approx(0.0));
  CHECK(bubble_profile(10.0) < bubble_profile(5.0));
}

} // TEST_SUITE
