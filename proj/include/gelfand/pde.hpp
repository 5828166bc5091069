#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gelfand/assembly.hpp"
#include "gelfand/hamiltonian.hpp"

namespace gelfand {

struct BranchState {
  double lambda = 0.0;
  Eigen::VectorXd u; // unknown nodes only (Dirichlet nodes excluded)
  double u_max = 0.0;
  double arclength = 0.0;
};

struct FoldInfo {
  double lambda = 0.0;
  int index = 0; // state index right before the turn
};

struct SolutionBranch {
  std::vector<BranchState> states;
  std::optional<FoldInfo> fold;
};

struct BranchTarget {
  std::optional<double> lambda_min; // stop on the upper branch at this lambda
  std::optional<double> u_max;      // or when the peak reaches this height
};

struct ContinuationOptions {
  double ds_init = 0.05;
  double ds_max = 0.6;
  double ds_min = 1e-12;
  int direction = +1; // initial sign of d(log lambda)/ds
  bool refine_fold = true;
};

struct NewtonHistory {
  std::vector<double> residuals;
  int iterations() const { return static_cast<int>(residuals.size()); }
};

/// Discrete Gel'fand operator  S u = lambda V e^u  on one grid, with Newton
/// and pseudo-arclength continuation in (u, log lambda).
class PdeSolver {
public:
  explicit PdeSolver(Discretization disc, double residual_tol = 1e-10);

  const Discretization& disc() const { return disc_; }
  int unknowns() const { return static_cast<int>(V_.size()); }

  // Scaled sup-norm of the discrete residual.
  double residual_norm(const Eigen::VectorXd& u, double lambda) const;

  // Raw algebraic residual S u - lambda V e^u, evaluated flux-wise so the
  // fine-cell rows do not lose accuracy to cancellation.
  Eigen::VectorXd residual_vector(const Eigen::VectorXd& u, double lambda) const {
    return residual(u, lambda);
  }

  Eigen::VectorXd newton_solve(double lambda, const Eigen::VectorXd& u0,
                               NewtonHistory* history = nullptr) const;

  SolutionBranch continue_branch(const BranchState& from, const BranchTarget& target,
                                 const ContinuationOptions& opts = {}) const;

  // Converged state at an exact lambda, warm-started from a nearby state.
  BranchState state_at_lambda(const BranchState& seed, double lambda) const;

  // Converged state with u(peak node) pinned to a target height; lambda is
  // then part of the solution (regular through the fold).
  BranchState state_at_umax(const BranchState& seed, double umax_target) const;

  // lambda * integral of e^u over the full domain.
  double mass(const Eigen::VectorXd& u, double lambda) const;

  BranchState make_state(double lambda, const Eigen::VectorXd& u) const;

  const Eigen::SparseMatrix<double>& stiffness() const { return S_; }
  const Eigen::VectorXd& volumes() const { return V_; }
  double measure_factor() const { return measure_factor_; }

  // Grid spacing near the node currently holding the maximum.
  double peak_spacing(const Eigen::VectorXd& u) const;

private:
  Eigen::VectorXd residual(const Eigen::VectorXd& u, double lambda) const;
  void check_resolution(const BranchState& s) const;

  // Flux links for the cancellation-free residual: differences of nearly
  // equal node values are taken before any scaling.
  struct Link {
    int a, b;
    double c;
  };

  Discretization disc_;
  double tol_;
  Eigen::SparseMatrix<double> S_;
  Eigen::VectorXd V_;
  std::vector<Link> links_;
  Eigen::VectorXd bdry_coef_;
  double measure_factor_ = 1.0;
};

// Singular-limit seed for the m-mode annulus branch at moderate lambda:
// superposed Liouville bubbles at the polygon vertices matched to the Green
// far field.
Eigen::VectorXd annulus_m_mode_seed(const SectorGrid& grid, const DomainSpec& dom,
                                    const Configuration& config, double d_scale,
                                    double lambda);

} // namespace gelfand
