#include <doctest.h>

#include <cmath>

#include <Eigen/SparseLU>

#include "gelfand/pde.hpp"

using namespace gelfand;

namespace {

// Closed-form radial family on the unit disk, kept local so the oracle is
// independent of the library: u = log(8 e^2 / (lambda (e^2 + r^2)^2)) solves
// -Lap u = lambda e^u when 8 e^2 = lambda (1 + e^2)^2.
double lam_of_eps(double eps) {
  const double e2 = eps * eps;
  return 8.0 * e2 / ((1.0 + e2) * (1.0 + e2));
}

double eps_root(double lambda, bool upper) {
  double lo = upper ? 1e-10 : 1.0, hi = upper ? 1.0 : 1e10;
  for (int i = 0; i < 300; ++i) {
    const double mid = std::sqrt(lo * hi);
    const bool below = lam_of_eps(mid) < lambda;
    if (upper)
      (below ? lo : hi) = mid;
    else
      (below ? hi : lo) = mid;
  }
  return std::sqrt(lo * hi);
}

double u_exact(double eps, double lambda, double r) {
  const double e2 = eps * eps;
  return std::log(8.0 * e2 / (lambda * (e2 + r * r) * (e2 + r * r)));
}

Discretization disk_disc(int n, double h0) {
  return Discretization::disk(RadialGrid::disk(1.0, n, h0));
}

Eigen::VectorXd inject_exact(const RadialGrid& g, double eps, double lambda) {
  Eigen::VectorXd u(g.n());
  for (int i = 0; i < g.n(); ++i) u(i) = u_exact(eps, lambda, g.r[i]);
  return u;
}

} // namespace

TEST_SUITE("pde") {

TEST_CASE("the closed-form family satisfies the equation") {
  const double eps = 0.7, lam = lam_of_eps(eps);
  const double h = 1e-5;
  for (double r : {0.05, 0.3, 0.6, 0.9}) {
    const double lap = (u_exact(eps, lam, r + h) - 2 * u_exact(eps, lam, r) +
                        u_exact(eps, lam, r - h)) /
                           (h * h) +
                       (u_exact(eps, lam, r + h) - u_exact(eps, lam, r - h)) /
                           (2 * h * r);
    const double rhs = lam * std::exp(u_exact(eps, lam, r));
    CHECK(-lap == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("lambda zero gives the zero solution") {
  const Discretization disc = disk_disc(128, 1.0 / 128);
  PdeSolver solver(disc);
  const Eigen::VectorXd u =
      solver.newton_solve(0.0, Eigen::VectorXd::Zero(solver.unknowns()));
  CHECK(u.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("lower branch at lambda = 0.5 matches the family") {
  const Discretization disc = disk_disc(2048, 1.0 / 2048);
  PdeSolver solver(disc);
  NewtonHistory hist;
  const Eigen::VectorXd u =
      solver.newton_solve(0.5, Eigen::VectorXd::Zero(solver.unknowns()), &hist);
  CHECK(solver.residual_norm(u, 0.5) <= 1e-10);
  const double eps = eps_root(0.5, /*upper=*/false);
  double sup = 0.0;
  for (int i = 0; i < u.size(); ++i)
    sup = std::max(sup, std::abs(u(i) - u_exact(eps, 0.5, disc.radial.r[i])));
  CHECK(sup <= 1e-8);
  // positivity in the interior
  CHECK(u.minCoeff() > 0.0);
  // quadratic tail of the Newton iteration
  CHECK(hist.iterations() <= 12);
}

TEST_CASE("residual norms") {
  const Discretization disc = disk_disc(256, 1.0 / 256);
  PdeSolver solver(disc);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(solver.unknowns());
  CHECK(solver.residual_norm(zero, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("injected exact solution leaves an O(h^2) residual") {
  const double lam = 0.5;
  const double eps = eps_root(lam, false);
  double prev = 0.0;
  std::vector<double> res;
  for (int n : {256, 512, 1024}) {
    const Discretization disc = disk_disc(n, 1.0 / n);
    PdeSolver solver(disc);
    res.push_back(solver.residual_norm(inject_exact(disc.radial, eps, lam), lam));
  }
  (void)prev;
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("continuation finds the classical fold") {
  const Discretization disc = disk_disc(1024, 2e-4);
  PdeSolver solver(disc);
  const double lam0 = 0.05;
  BranchState start = solver.make_state(
      lam0, solver.newton_solve(lam0, Eigen::VectorXd::Zero(solver.unknowns())));
  BranchTarget target;
  target.lambda_min = 5e-3;
  SolutionBranch br = solver.continue_branch(start, target);
  REQUIRE(br.fold.has_value());
  CHECK(br.fold->lambda == doctest::Approx(2.0).epsilon(5e-6));

  // d(lambda)/ds changes sign exactly once along the branch
  int sign_changes = 0;
  for (size_t i = 2; i < br.states.size(); ++i) {
    const double d1 = br.states[i - 1].lambda - br.states[i - 2].lambda;
    const double d2 = br.states[i].lambda - br.states[i - 1].lambda;
    if (d1 > 0 && d2 < 0) ++sign_changes;
  }
  CHECK(sign_changes == 1);

  // u_max strictly increasing along the whole trace here
  for (size_t i = 1; i < br.states.size(); ++i)
    CHECK(br.states[i].u_max > br.states[i - 1].u_max);

  // upper-branch states: mass approaches 8 pi, matching the family value
  const BranchState last = br.states.back();
  const double eps = eps_root(last.lambda, true);
  CHECK(solver.mass(last.u, last.lambda) ==
        doctest::Approx(8.0 * M_PI / (1.0 + eps * eps)).epsilon(1e-5));
}

TEST_CASE("pinning a state by lambda and by peak height") {
  const Discretization disc = disk_disc(2048, 1e-4);
  PdeSolver solver(disc);
  const double lam0 = 0.05;
  BranchState start = solver.make_state(
      lam0, solver.newton_solve(lam0, Eigen::VectorXd::Zero(solver.unknowns())));
  BranchTarget target;
  target.u_max = 12.0;
  SolutionBranch br = solver.continue_branch(start, target);
  CHECK(br.states.back().u_max >= 12.0);

  BranchState s16 = solver.state_at_umax(br.states.back(), 16.0);
  CHECK(s16.u_max == doctest::Approx(16.0).epsilon(1e-12));
  const double eps16 = 1.0 / std::sqrt(std::exp(8.0) - 1.0);
  CHECK(s16.lambda == doctest::Approx(lam_of_eps(eps16)).epsilon(1e-4));

  BranchState sl = solver.state_at_lambda(s16, 2e-4);
  CHECK(sl.lambda == doctest::Approx(2e-4).epsilon(1e-15));
  const double eps = eps_root(2e-4, true);
  double sup = 0.0;
  for (int i = 0; i < sl.u.size(); ++i)
    sup = std::max(sup, std::abs(sl.u(i) - u_exact(eps, 2e-4, disc.radial.r[i])));
  CHECK(sup <= 1e-5);
}

TEST_CASE("under-resolved mesh is reported") {
  const Discretization disc = disk_disc(64, 1.0 / 64);
  PdeSolver solver(disc);
  const double lam0 = 0.05;
  BranchState start = solver.make_state(
      lam0, solver.newton_solve(lam0, Eigen::VectorXd::Zero(solver.unknowns())));
  BranchTarget target;
  target.lambda_min = 1e-4;
  CHECK_THROWS_AS((void)solver.continue_branch(start, target), MeshUnderResolved);
}

TEST_CASE("negative lambda rejected") {
  const Discretization disc = disk_disc(128, 1.0 / 128);
  PdeSolver solver(disc);
  CHECK_THROWS_AS(
      (void)solver.newton_solve(-1.0, Eigen::VectorXd::Zero(solver.unknowns())),
      LambdaOutOfRange);
}

TEST_CASE("sector operator is second order on a manufactured solution") {
  // Solve S v_h = V f with f = -Lap v and compare against v on the nodes
  // (the graded finite-volume scheme is supraconvergent: the solution is
  // second order even where the pointwise truncation is not).
  auto solution_error = [](int nr, int nt) {
    SectorGrid g = SectorGrid::make(0.5, 3, nr, nt, 0.75, 0.1 / nr, 0.2 / nt);
    Discretization disc = Discretization::annulus(g);
    PdeSolver solver(disc);
    const int Nt = g.nt();
    Eigen::VectorXd v((g.nr() - 1) * Nt);
    Eigen::VectorXd f(v.size());
    for (int i = 1; i <= g.nr() - 1; ++i)
      for (int j = 0; j < Nt; ++j) {
        const double r = g.r[i], th = g.theta[j];
        const double s = std::sin(M_PI * (r - 0.5) / 0.5);
        const double c = std::cos(M_PI * (r - 0.5) / 0.5);
        v((i - 1) * Nt + j) = s * std::cos(3 * th);
        const double vrr = -M_PI * M_PI / 0.25 * s;
        const double vr = M_PI / 0.5 * c;
        f((i - 1) * Nt + j) =
            -(vrr + vr / r - 9.0 / (r * r) * s) * std::cos(3 * th);
      }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(solver.stiffness());
    REQUIRE(lu.info() == Eigen::Success);
    const Eigen::VectorXd vh = lu.solve(solver.volumes().cwiseProduct(f));
    return (vh - v).cwiseAbs().maxCoeff();
  };
  const double e1 = solution_error(64, 33);
  const double e2 = solution_error(128, 67);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.5);
}

} // TEST_SUITE
