#include "gelfand/pde.hpp"

#include <cmath>

#include <Eigen/SparseLU>

#include "gelfand/green.hpp"

namespace gelfand {

namespace {

Eigen::VectorXd exp_clamped(const Eigen::VectorXd& u) {
  return u.unaryExpr([](double x) { return std::exp(std::min(x, 500.0)); });
}

} // namespace

PdeSolver::PdeSolver(Discretization disc, double residual_tol)
    : disc_(std::move(disc)), tol_(residual_tol) {
  if (disc_.kind == Discretization::Kind::Radial) {
    const RadialGrid& g = disc_.radial;
    S_ = radial_stiffness(g, 0);
    V_ = radial_volumes(g, 0);
    measure_factor_ = 2.0 * M_PI;
    bdry_coef_ = Eigen::VectorXd::Zero(V_.size());
    const int N = g.n();
    for (int i = 0; i + 1 < N; ++i) links_.push_back({i, i + 1, g.flux_coef[i]});
    bdry_coef_(N - 1) += g.flux_coef[N - 1];
  } else {
    const SectorGrid& g = disc_.sector;
    S_ = sector_stiffness<double>(g, 1.0);
    V_ = sector_volumes(g);
    measure_factor_ = g.m;
    bdry_coef_ = Eigen::VectorXd::Zero(V_.size());
    const int Nr = g.nr(), Nt = g.nt();
    auto idx = [&](int i, int j) { return (i - 1) * Nt + j; };
    for (int j = 0; j < Nt; ++j) {
      const double dth = g.dtheta_cell(j);
      bdry_coef_(idx(1, j)) += g.rflux_coef[0] * dth;
      bdry_coef_(idx(Nr - 1, j)) += g.rflux_coef[Nr - 1] * dth;
      for (int i = 1; i + 1 <= Nr - 1; ++i)
        links_.push_back({idx(i, j), idx(i + 1, j), g.rflux_coef[i] * dth});
    }
    for (int i = 1; i <= Nr - 1; ++i) {
      const double w = g.inv_r_cell(i);
      for (int j = 0; j < Nt; ++j)
        links_.push_back({idx(i, j), idx(i, (j + 1) % Nt), w / g.dtheta_link(j)});
    }
  }
}

Eigen::VectorXd PdeSolver::residual(const Eigen::VectorXd& u, double lambda) const {
  Eigen::VectorXd r = -lambda * V_.cwiseProduct(exp_clamped(u));
  r += bdry_coef_.cwiseProduct(u);
  for (const Link& l : links_) {
    const double flux = l.c * (u(l.a) - u(l.b));
    r(l.a) += flux;
    r(l.b) -= flux;
  }
  return r;
}

double PdeSolver::residual_norm(const Eigen::VectorXd& u, double lambda) const {
  const Eigen::VectorXd r = residual(u, lambda).cwiseQuotient(V_);
  const double scale = std::max(1.0, lambda * exp_clamped(u).maxCoeff());
  return r.cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd PdeSolver::newton_solve(double lambda, const Eigen::VectorXd& u0,
                                        NewtonHistory* history) const {
  if (!(lambda >= 0.0)) throw LambdaOutOfRange("newton_solve: lambda < 0");
  if (u0.size() != V_.size())
    throw ConfigError("newton_solve: initial guess has wrong size");
  Eigen::VectorXd u = u0;
  double rn = residual_norm(u, lambda);
  if (history) history->residuals.push_back(rn);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < 50; ++it) {
    if (rn <= tol_) return u;
    Eigen::SparseMatrix<double> J = S_;
    const Eigen::VectorXd w = lambda * V_.cwiseProduct(exp_clamped(u));
    for (int k = 0; k < J.rows(); ++k) J.coeffRef(k, k) -= w(k);
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw JacobianSingular("newton_solve: factorization failed (fold?)");
    Eigen::VectorXd step = lu.solve(-residual(u, lambda));
    const double step_max = step.cwiseAbs().maxCoeff();
    if (step_max > 4.0) step *= 4.0 / step_max; // guard the exponential
    double damp = 1.0;
    for (int half = 0;; ++half) {
      const Eigen::VectorXd trial = u + damp * step;
      const double rt = residual_norm(trial, lambda);
      if (rt < rn || rt <= tol_) {
        u = trial;
        rn = rt;
        break;
      }
      damp *= 0.5;
      if (half > 40) throw NewtonDiverged("newton_solve: line search stalled");
    }
    if (history) history->residuals.push_back(rn);
  }
  if (rn <= tol_) return u;
  throw NewtonDiverged("newton_solve: iteration cap reached");
}

BranchState PdeSolver::make_state(double lambda, const Eigen::VectorXd& u) const {
  BranchState s;
  s.lambda = lambda;
  s.u = u;
  s.u_max = u.size() ? u.maxCoeff() : 0.0;
  return s;
}

double PdeSolver::mass(const Eigen::VectorXd& u, double lambda) const {
  return measure_factor_ * lambda * V_.dot(exp_clamped(u));
}

double PdeSolver::peak_spacing(const Eigen::VectorXd& u) const {
  int imax = 0;
  u.maxCoeff(&imax);
  if (disc_.kind == Discretization::Kind::Radial)
    return disc_.radial.spacing_at(imax);
  const int Nt = disc_.sector.nt();
  return disc_.sector.radial_spacing_at(imax / Nt + 1);
}

void PdeSolver::check_resolution(const BranchState& s) const {
  const double delta = 1.0 / std::sqrt(s.lambda * std::exp(s.u_max));
  const double h = peak_spacing(s.u);
  if (delta < 4.0 * h)
    throw MeshUnderResolved("peak width " + std::to_string(delta) +
                            " below 4 spacings (" + std::to_string(h) +
                            "); regrade the mesh");
}

// --- bordered (N+1)-dimensional Newton -------------------------------------
// Unknowns z = (u, ell = log lambda); rows: F(u, ell) = 0 and one scalar
// constraint  c_u . u + c_ell * ell = rhs  (the constraint is linear in all
// uses here: arclength, pinned lambda, pinned peak value).

namespace {

struct Constraint {
  Eigen::VectorXd c_u;
  double c_ell = 0.0;
  double rhs = 0.0;
};

} // namespace

static bool bordered_newton(const PdeSolver& solver, Eigen::VectorXd& u,
                            double& ell, const Constraint& con, double tol,
                            int max_it = 25) {
  const auto& S = solver.stiffness();
  const auto& V = solver.volumes();
  const int n = static_cast<int>(V.size());

  std::vector<Eigen::Triplet<double>> base;
  base.reserve(S.nonZeros() + 2 * n + 2);
  for (int k = 0; k < S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it)
      base.emplace_back(it.row(), it.col(), it.value());

  for (int it = 0; it < max_it; ++it) {
    const double lambda = std::exp(ell);
    const Eigen::VectorXd eu = exp_clamped(u);
    const Eigen::VectorXd F = solver.residual_vector(u, lambda);
    const double c = con.c_u.dot(u) + con.c_ell * ell - con.rhs;
    const double rn = solver.residual_norm(u, lambda);
    if (rn <= tol && std::abs(c) <= 1e-12 * std::max(1.0, std::abs(con.rhs)))
      return true;

    auto trip = base;
    const Eigen::VectorXd w = lambda * V.cwiseProduct(eu);
    for (int k = 0; k < n; ++k) {
      trip.emplace_back(k, k, -w(k));
      trip.emplace_back(k, n, -w(k)); // dF/d(ell) = -lambda V e^u
      if (con.c_u(k) != 0.0) trip.emplace_back(n, k, con.c_u(k));
    }
    trip.emplace_back(n, n, con.c_ell == 0.0 ? 0.0 : con.c_ell);

    Eigen::SparseMatrix<double> A(n + 1, n + 1);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) return false;

    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -F;
    rhs(n) = -c;
    const Eigen::VectorXd dz = lu.solve(rhs);
    double damp = 1.0;
    const double dmax = dz.head(n).cwiseAbs().maxCoeff();
    if (dmax > 4.0) damp = 4.0 / dmax;
    if (std::abs(dz(n)) * damp > 2.0) damp = 2.0 / std::abs(dz(n));
    u += damp * dz.head(n);
    ell += damp * dz(n);
  }
  return false;
}

BranchState PdeSolver::state_at_lambda(const BranchState& seed, double lambda) const {
  if (!(lambda > 0.0)) throw LambdaOutOfRange("state_at_lambda: lambda <= 0");
  const Eigen::VectorXd u = newton_solve(lambda, seed.u);
  BranchState s = make_state(lambda, u);
  s.arclength = seed.arclength;
  check_resolution(s);
  return s;
}

BranchState PdeSolver::state_at_umax(const BranchState& seed, double umax_target) const {
  int imax = 0;
  seed.u.maxCoeff(&imax);
  Constraint con;
  con.c_u = Eigen::VectorXd::Zero(unknowns());
  con.c_u(imax) = 1.0;
  con.rhs = umax_target;
  Eigen::VectorXd u = seed.u;
  double ell = std::log(seed.lambda);
  if (!bordered_newton(*this, u, ell, con, tol_))
    throw NewtonDiverged("state_at_umax: bordered Newton failed");
  BranchState s = make_state(std::exp(ell), u);
  s.arclength = seed.arclength;
  check_resolution(s);
  return s;
}

SolutionBranch PdeSolver::continue_branch(const BranchState& from,
                                          const BranchTarget& target,
                                          const ContinuationOptions& opts) const {
  if (!target.lambda_min && !target.u_max)
    throw ConfigError("continue_branch: no stopping target given");
  const int n = unknowns();
  const double inv_n = 1.0 / n;

  SolutionBranch branch;
  branch.states.push_back(from);
  branch.states.back().arclength = 0.0;

  // Initial tangent from the natural parametrization du/d(ell) = -J^{-1} F_ell.
  Eigen::VectorXd t_u(n);
  double t_ell;
  {
    const double lambda = from.lambda;
    Eigen::SparseMatrix<double> J = S_;
    const Eigen::VectorXd w = lambda * V_.cwiseProduct(exp_clamped(from.u));
    for (int k = 0; k < n; ++k) J.coeffRef(k, k) -= w(k);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success)
      throw JacobianSingular("continue_branch: cannot start at a fold");
    t_u = lu.solve(w);
    t_ell = 1.0;
    const double nrm = std::sqrt(inv_n * t_u.squaredNorm() + t_ell * t_ell);
    t_u /= nrm;
    t_ell /= nrm;
    if (opts.direction < 0) {
      t_u = -t_u;
      t_ell = -t_ell;
    }
  }

  double ds = opts.ds_init;
  bool past_fold = false;
  auto done = [&](const BranchState& s) {
    if (target.u_max && s.u_max >= *target.u_max) return true;
    if (target.lambda_min && past_fold && s.lambda <= *target.lambda_min) return true;
    // A branch seeded on the blow-up side may never cross a fold.
    if (target.lambda_min && !branch.fold && opts.direction < 0 &&
        s.lambda <= *target.lambda_min)
      return true;
    return false;
  };

  int guard = 0;
  while (!done(branch.states.back())) {
    if (++guard > 100000)
      throw NewtonDiverged("continue_branch: step limit exceeded");
    const BranchState& prev = branch.states.back();
    const double ell_prev = std::log(prev.lambda);

    Eigen::VectorXd u = prev.u + ds * t_u;
    double ell = ell_prev + ds * t_ell;
    Constraint con;
    con.c_u = inv_n * t_u;
    con.c_ell = t_ell;
    con.rhs = con.c_u.dot(prev.u) + t_ell * ell_prev + ds;

    if (!bordered_newton(*this, u, ell, con, tol_, 12)) {
      ds *= 0.5;
      if (ds < opts.ds_min)
        throw StepFloorReached("continue_branch: step below floor");
      continue;
    }

    BranchState s = make_state(std::exp(ell), u);
    s.arclength = prev.arclength + ds;
    check_resolution(s);

    // Secant tangent for the next step.
    Eigen::VectorXd new_tu = (s.u - prev.u) / ds;
    double new_tell = (ell - ell_prev) / ds;
    const double nrm = std::sqrt(inv_n * new_tu.squaredNorm() + new_tell * new_tell);
    new_tu /= nrm;
    new_tell /= nrm;

    const bool was_up = t_ell > 0;
    branch.states.push_back(s);
    if (was_up && new_tell < 0 && !branch.fold) {
      FoldInfo f;
      f.index = static_cast<int>(branch.states.size()) - 2;
      f.lambda = std::max(s.lambda, prev.lambda);
      branch.fold = f;
      past_fold = true;
    }
    t_u = new_tu;
    t_ell = new_tell;
    ds = std::min(ds * 1.4, opts.ds_max);
  }

  if (branch.fold && opts.refine_fold) {
    // lambda is a smooth unimodal function of the peak height near the turn;
    // maximize it by golden section with warm-started bordered solves.
    const int i0 = std::max(branch.fold->index - 1, 0);
    const int i1 = std::min(branch.fold->index + 2,
                            static_cast<int>(branch.states.size()) - 1);
    double lo = branch.states[i0].u_max, hi = branch.states[i1].u_max;
    BranchState work = branch.states[branch.fold->index];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    BranchState s1 = state_at_umax(work, x1);
    BranchState s2 = state_at_umax(s1, x2);
    for (int it = 0; it < 60 && hi - lo > 1e-7 * std::max(1.0, hi); ++it) {
      if (s1.lambda > s2.lambda) {
        hi = x2;
        x2 = x1;
        s2 = s1;
        x1 = hi - gr * (hi - lo);
        s1 = state_at_umax(s2, x1);
      } else {
        lo = x1;
        x1 = x2;
        s1 = s2;
        x2 = lo + gr * (hi - lo);
        s2 = state_at_umax(s1, x2);
      }
    }
    branch.fold->lambda = std::max(s1.lambda, s2.lambda);
  }
  return branch;
}

Eigen::VectorXd annulus_m_mode_seed(const SectorGrid& grid, const DomainSpec& dom,
                                    const Configuration& config, double d_scale,
                                    double lambda) {
  const int Nr = grid.nr(), Nt = grid.nt();
  const double eps2 = 8.0 * d_scale * d_scale * lambda;
  Eigen::VectorXd u((Nr - 1) * Nt);
  for (int i = 1; i <= Nr - 1; ++i)
    for (int j = 0; j < Nt; ++j) {
      const Point x(grid.r[i] * std::cos(grid.theta[j]),
                    grid.r[i] * std::sin(grid.theta[j]));
      double val = 0.0;
      for (const Point& kap : config.points) {
        const double rho2 = (x - kap).squaredNorm();
        val += -2.0 * std::log(eps2 + rho2);
        val += 8.0 * M_PI * regular_part(dom, x, kap).value;
      }
      u((i - 1) * Nt + j) = val;
    }
  return u;
}

} // namespace gelfand
