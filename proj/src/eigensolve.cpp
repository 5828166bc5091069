#include "gelfand/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseLU>

namespace gelfand {

namespace {

template <typename Scalar>
using SpMat = Eigen::SparseMatrix<Scalar>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct BlockEigs {
  Eigen::VectorXd values; // ascending
  Mat<Scalar> vectors;    // eigenvectors of S v = mu B v (columns)
};

template <typename Scalar>
Mat<Scalar> random_block(int n, int p, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Mat<Scalar> X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) {
      if constexpr (std::is_same_v<Scalar, double>)
        X(i, j) = dist(rng);
      else
        X(i, j) = Scalar(dist(rng), dist(rng));
    }
  return X;
}

// Shift-invert subspace iteration on C = B^{-1/2} S B^{-1/2}: converge the
// n_want smallest eigenvalues with shift 0, then polish the cluster near 1
// with the shift-1 factorization.
template <typename Scalar>
BlockEigs<Scalar> smallest_eigenpairs(const SpMat<Scalar>& S,
                                      const Eigen::VectorXd& B, int n_want,
                                      const EigenOptions& opts) {
  const int n = static_cast<int>(S.rows());
  n_want = std::min(n_want, n);
  const int p = std::min(n, n_want + 4);
  const Eigen::VectorXd Bs = B.cwiseSqrt();

  auto applyC = [&](const Vec<Scalar>& x) -> Vec<Scalar> {
    return (S * (x.cwiseQuotient(Bs.cast<Scalar>().eval()))).cwiseQuotient(
        Bs.cast<Scalar>().eval());
  };

  Eigen::SparseLU<SpMat<Scalar>> lu0(S);
  if (lu0.info() != Eigen::Success)
    throw ConvergenceFailure("eigensolve: stiffness factorization failed");

  Mat<Scalar> X = random_block<Scalar>(n, p, 12345u + 7u * n + unsigned(p));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Mat<Scalar> CX;
  bool converged = false;

  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    // Y = C^{-1} X  via  (S) z = B^{1/2} x,  y = B^{1/2} z.
    Mat<Scalar> Y(n, p);
    for (int j = 0; j < p; ++j) {
      Vec<Scalar> rhs = X.col(j).cwiseProduct(Bs.cast<Scalar>().eval());
      Y.col(j) = lu0.solve(rhs).cwiseProduct(Bs.cast<Scalar>().eval());
    }
    Eigen::HouseholderQR<Mat<Scalar>> qr(Y);
    Mat<Scalar> Q = qr.householderQ() * Mat<Scalar>::Identity(n, p);

    Mat<Scalar> CQ(n, p);
    for (int j = 0; j < p; ++j) CQ.col(j) = applyC(Q.col(j));
    Mat<Scalar> H = Q.adjoint() * CQ;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> small(0.5 * (H + H.adjoint()));
    X = Q * small.eigenvectors();
    CX = CQ * small.eigenvectors();
    theta = small.eigenvalues();

    converged = true;
    for (int j = 0; j < n_want; ++j) {
      const double res = (CX.col(j) - Scalar(theta(j)) * X.col(j)).norm();
      if (res > opts.tol * std::max(1.0, std::abs(theta(j)))) {
        converged = false;
        break;
      }
    }
  }
  if (!converged)
    throw ConvergenceFailure("eigensolve: subspace iteration did not reach tol");

  // Second band: one inverse-iteration sweep with the shift-1 factorization,
  // then re-extract Ritz pairs from the polished family.
  {
    std::vector<int> band;
    for (int j = 0; j < n_want; ++j)
      if (std::abs(theta(j) - 1.0) < 0.4) band.push_back(j);
    if (!band.empty()) {
      SpMat<Scalar> S1 = S;
      for (int k = 0; k < n; ++k) S1.coeffRef(k, k) -= Scalar(B(k));
      Eigen::SparseLU<SpMat<Scalar>> lu1(S1);
      if (lu1.info() == Eigen::Success) {
        Mat<Scalar> Z(n, band.size());
        for (size_t c = 0; c < band.size(); ++c) {
          Vec<Scalar> rhs = X.col(band[c]).cwiseProduct(Bs.cast<Scalar>().eval());
          Vec<Scalar> y = lu1.solve(rhs).cwiseProduct(Bs.cast<Scalar>().eval());
          Z.col(c) = y / y.norm();
        }
        Eigen::HouseholderQR<Mat<Scalar>> qr(Z);
        Mat<Scalar> Q = qr.householderQ() * Mat<Scalar>::Identity(n, int(band.size()));
        Mat<Scalar> CQ(n, int(band.size()));
        for (int j = 0; j < int(band.size()); ++j) CQ.col(j) = applyC(Q.col(j));
        Mat<Scalar> H = Q.adjoint() * CQ;
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> small(0.5 * (H + H.adjoint()));
        const Mat<Scalar> refined = Q * small.eigenvectors();
        for (size_t c = 0; c < band.size(); ++c) {
          const double res =
              (applyC(refined.col(c)) - Scalar(small.eigenvalues()(c)) * refined.col(c))
                  .norm();
          const double old_res =
              (CX.col(band[c]) - Scalar(theta(band[c])) * X.col(band[c])).norm();
          if (res <= old_res) {
            X.col(band[c]) = refined.col(c);
            theta(band[c]) = small.eigenvalues()(c);
          }
        }
      }
    }
  }

  BlockEigs<Scalar> out;
  out.values = theta.head(n_want);
  out.vectors.resize(n, n_want);
  for (int j = 0; j < n_want; ++j)
    out.vectors.col(j) = X.col(j).cwiseQuotient(Bs.cast<Scalar>().eval());
  return out;
}

struct RawPair {
  double mu;
  int wave;
  int partner;
  Eigen::VectorXcd vec; // block eigenvector (unknown layout)
};

double scaled_residual(const Eigen::VectorXd& resid_over_V, double mu,
                       double lambda, double eu_max, double v_sup) {
  return resid_over_V.cwiseAbs().maxCoeff() /
         std::max(1.0, mu * lambda * eu_max) / std::max(v_sup, 1e-300);
}

} // namespace

std::vector<EigenPair> weighted_spectrum(const Discretization& disc,
                                         const Eigen::VectorXd& u, double lambda,
                                         int count, const EigenOptions& opts) {
  if (!(lambda > 0.0) || !u.allFinite())
    throw WeightNotPositive("weighted_spectrum: weight lambda e^u not positive");
  if (count < 1) throw ConfigError("weighted_spectrum: count must be >= 1");

  std::vector<RawPair> raw;

  if (disc.kind == Discretization::Kind::Radial) {
    const RadialGrid& g = disc.radial;
    const Eigen::VectorXd eu = u.array().exp();
    const int cap = count + 3;
    for (int ell = 0; ell <= cap; ++ell) {
      const int n_b = ell == 0 ? count : (count + 1) / 2 + 1;
      Eigen::SparseMatrix<double> S = radial_stiffness(g, ell);
      const Eigen::VectorXd V = radial_volumes(g, ell);
      Eigen::VectorXd B(V.size());
      const int off = ell == 0 ? 0 : 1; // u lives on the ell = 0 layout
      for (int i = 0; i < V.size(); ++i) B(i) = lambda * eu(i + off) * V(i);
      const auto blk = smallest_eigenpairs<double>(S, B, std::min<int>(n_b, V.size()), opts);
      for (int j = 0; j < blk.values.size(); ++j) {
        RawPair rp;
        rp.mu = blk.values(j);
        rp.wave = ell;
        rp.partner = 0;
        rp.vec = blk.vectors.col(j).cast<std::complex<double>>();
        raw.push_back(rp);
        if (ell > 0) {
          rp.partner = 1;
          raw.push_back(rp);
        }
      }
      // Block minima grow with ell; stop once this block cannot contribute.
      std::vector<double> mus;
      for (const auto& r : raw) mus.push_back(r.mu);
      std::sort(mus.begin(), mus.end());
      if (ell >= 1 && static_cast<int>(mus.size()) >= count &&
          blk.values(0) > mus[count - 1])
        break;
    }
  } else {
    const SectorGrid& g = disc.sector;
    const int m = g.m;
    const Eigen::VectorXd eu = u.array().exp();
    const Eigen::VectorXd V = sector_volumes(g);
    Eigen::VectorXd B = lambda * V.cwiseProduct(eu);
    for (int q = 0; q <= m / 2; ++q) {
      const bool real_block = (q == 0) || (2 * q == m);
      const int mult = real_block ? 1 : 2;
      const int n_b = mult == 1 ? count : (count + 1) / 2 + 1;
      const std::complex<double> omega =
          std::polar(1.0, 2.0 * M_PI * q / static_cast<double>(m));
      if (real_block) {
        auto S = sector_stiffness<double>(g, omega);
        const auto blk =
            smallest_eigenpairs<double>(S, B, std::min<int>(n_b, B.size()), opts);
        for (int j = 0; j < blk.values.size(); ++j)
          raw.push_back({blk.values(j), q, 0,
                         blk.vectors.col(j).cast<std::complex<double>>()});
      } else {
        auto S = sector_stiffness<std::complex<double>>(g, omega);
        const auto blk = smallest_eigenpairs<std::complex<double>>(
            S, B, std::min<int>(n_b, B.size()), opts);
        for (int j = 0; j < blk.values.size(); ++j) {
          raw.push_back({blk.values(j), q, 0, blk.vectors.col(j)});
          raw.push_back({blk.values(j), q, 1, blk.vectors.col(j)});
        }
      }
    }
  }

  std::sort(raw.begin(), raw.end(), [](const RawPair& a, const RawPair& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.wave != b.wave) return a.wave < b.wave;
    return a.partner < b.partner;
  });
  if (static_cast<int>(raw.size()) > count) raw.resize(count);

  // Package, reconstruct boundary rows, sup-normalize, flag degeneracies.
  std::vector<EigenPair> out;
  const double eu_max = u.array().exp().maxCoeff();

  for (size_t idx = 0; idx < raw.size(); ++idx) {
    const RawPair& rp = raw[idx];
    EigenPair p;
    p.mu = rp.mu;
    p.k = static_cast<int>(idx) + 1;
    p.wave_number = rp.wave;
    p.partner = rp.partner;

    if (disc.kind == Discretization::Kind::Radial) {
      const RadialGrid& g = disc.radial;
      const int N = g.n();
      Eigen::VectorXd f = Eigen::VectorXd::Zero(N + 1);
      const int off = rp.wave == 0 ? 0 : 1;
      for (int i = 0; i < rp.vec.size(); ++i) f(i + off) = rp.vec(i).real();
      int imax = 0;
      f.cwiseAbs().maxCoeff(&imax);
      f /= f(imax); // largest-magnitude value becomes +1
      p.radial = f;

      // Residual of the block equation at the normalized vector.
      Eigen::SparseMatrix<double> S = radial_stiffness(g, rp.wave);
      const Eigen::VectorXd V = radial_volumes(g, rp.wave);
      Eigen::VectorXd B(V.size());
      const Eigen::VectorXd eu = u.array().exp();
      for (int i = 0; i < V.size(); ++i) B(i) = lambda * eu(i + off) * V(i);
      const Eigen::VectorXd vv = f.segment(off, V.size());
      const Eigen::VectorXd r =
          (S * vv - p.mu * B.cwiseProduct(vv)).cwiseQuotient(V);
      p.residual = scaled_residual(r, p.mu, lambda, eu_max, 1.0);
    } else {
      const SectorGrid& g = disc.sector;
      const int Nr = g.nr(), Nt = g.nt();
      Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(Nr + 1, Nt);
      for (int i = 1; i <= Nr - 1; ++i)
        for (int j = 0; j < Nt; ++j) W(i, j) = rp.vec((i - 1) * Nt + j);

      // Phase convention: the largest |W| sample is made real positive, then
      // the partner is scaled so its own largest-magnitude value is +1.
      int imax = 0, jmax = 0;
      W.cwiseAbs().maxCoeff(&imax, &jmax);
      std::complex<double> base = std::polar(1.0, -std::arg(W(imax, jmax)));
      if (rp.partner == 1) base *= std::complex<double>(0.0, -1.0); // Im part
      const std::complex<double> omega =
          std::polar(1.0, 2.0 * M_PI * rp.wave / static_cast<double>(g.m));
      double vmax = 0.0, vsigned = 1.0;
      std::complex<double> ph = base;
      for (int c = 0; c < g.m; ++c) {
        for (int i = 1; i <= Nr - 1; ++i)
          for (int j = 0; j < Nt; ++j) {
            const double val = (ph * W(i, j)).real();
            if (std::abs(val) > vmax) {
              vmax = std::abs(val);
              vsigned = val;
            }
          }
        ph *= omega;
      }
      p.sector = W;
      p.prefactor = base * (vsigned >= 0 ? 1.0 : -1.0) / std::max(vmax, 1e-300);

      auto S = sector_stiffness<std::complex<double>>(g, omega);
      const Eigen::VectorXd V = sector_volumes(g);
      const Eigen::VectorXd eu = u.array().exp();
      const Eigen::VectorXcd r = S * rp.vec -
                                 std::complex<double>(p.mu) *
                                     (lambda * V.cwiseProduct(eu))
                                         .cast<std::complex<double>>()
                                         .cwiseProduct(rp.vec);
      p.residual = scaled_residual(r.cwiseAbs().cwiseQuotient(V), p.mu, lambda,
                                   eu_max, rp.vec.cwiseAbs().maxCoeff());
    }
    out.push_back(std::move(p));
  }

  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = 0; j < out.size(); ++j)
      if (i != j && std::abs(out[i].mu - out[j].mu) <=
                        opts.degenerate_tol * std::max(1.0, std::abs(out[i].mu)))
        out[i].degenerate = true;
  return out;
}

double eigenfunction_value(const Discretization& disc, const EigenPair& pair,
                           const Point& x) {
  if (disc.kind == Discretization::Kind::Radial) {
    const RadialGrid& g = disc.radial;
    const double r = x.norm();
    if (r > g.rho) throw PointOutsideDomain("eigenfunction_value");
    double f;
    if (r < g.r[1]) {
      // even/odd parity at the center by wave number
      const double f1 = pair.radial(1), f0 = pair.radial(0);
      if (pair.wave_number == 0)
        f = f0 + (f1 - f0) * (r * r) / (g.r[1] * g.r[1]);
      else
        f = f1 * std::pow(r / g.r[1], pair.wave_number);
    } else {
      f = interp_quadratic(g.r, pair.radial, r);
    }
    if (pair.wave_number == 0) return f;
    const double th = std::atan2(x.y(), x.x());
    return pair.partner == 0 ? f * std::cos(pair.wave_number * th)
                             : f * std::sin(pair.wave_number * th);
  }

  const SectorGrid& g = disc.sector;
  const double r = x.norm();
  if (r < g.a || r > 1.0) throw PointOutsideDomain("eigenfunction_value");
  double th = std::atan2(x.y(), x.x());
  const double span = 2.0 * M_PI / g.m;
  int copy = static_cast<int>(std::floor((th + span / 2) / span));
  double th_loc = th - copy * span;
  copy = ((copy % g.m) + g.m) % g.m;
  const std::complex<double> omega =
      std::polar(1.0, 2.0 * M_PI * pair.wave_number / static_cast<double>(g.m));

  // Quadratic interpolation in r and theta; angular ghost columns carry the
  // Bloch phase across the wrap.
  const int Nt = g.nt();
  auto Wcol = [&](int j) -> std::pair<double, std::complex<double>> {
    std::complex<double> phase = 1.0;
    double shift = 0.0;
    int jj = j;
    if (jj < 0) {
      jj += Nt;
      phase = std::conj(omega);
      shift = -span;
    } else if (jj >= Nt) {
      jj -= Nt;
      phase = omega;
      shift = span;
    }
    return {g.theta[jj] + shift, phase};
  };

  int j0 = static_cast<int>(std::lower_bound(g.theta.begin(), g.theta.end(), th_loc) -
                            g.theta.begin());
  j0 = std::clamp(j0, 0, Nt); // stencil j0-1, j0, j0+1 with ghosts

  // radial stencil
  const auto& rr = g.r;
  int i0 = static_cast<int>(std::lower_bound(rr.begin(), rr.end(), r) - rr.begin());
  i0 = std::clamp(i0, 1, static_cast<int>(rr.size()) - 2);

  std::complex<double> col_val[3];
  double col_th[3];
  for (int c = 0; c < 3; ++c) {
    const auto [tj, phase] = Wcol(j0 - 1 + c);
    col_th[c] = tj;
    // quadratic in r on stencil i0-1..i0+1 for this (possibly wrapped) column
    const int jj = ((j0 - 1 + c) % Nt + Nt) % Nt;
    const double x0 = rr[i0 - 1], x1 = rr[i0], x2 = rr[i0 + 1];
    const double l0 = (r - x1) * (r - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (r - x0) * (r - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (r - x0) * (r - x1) / ((x2 - x0) * (x2 - x1));
    col_val[c] = phase * (l0 * pair.sector(i0 - 1, jj) + l1 * pair.sector(i0, jj) +
                          l2 * pair.sector(i0 + 1, jj));
  }
  const double t0 = col_th[0], t1 = col_th[1], t2 = col_th[2];
  const double l0 = (th_loc - t1) * (th_loc - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (th_loc - t0) * (th_loc - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (th_loc - t0) * (th_loc - t1) / ((t2 - t0) * (t2 - t1));
  const std::complex<double> W =
      l0 * col_val[0] + l1 * col_val[1] + l2 * col_val[2];
  const std::complex<double> ph = std::pow(omega, copy);
  return (pair.prefactor * ph * W).real();
}

double weighted_inner(const Discretization& disc, const Eigen::VectorXd& u,
                      double lambda, const EigenPair& a, const EigenPair& b) {
  const Eigen::VectorXd eu = u.array().exp();
  if (disc.kind == Discretization::Kind::Radial) {
    // Angular factor: int_0^{2pi} trig_a(l_a t) trig_b(l_b t) dt.
    double ang = 0.0;
    if (a.wave_number == b.wave_number) {
      if (a.wave_number == 0)
        ang = 2.0 * M_PI;
      else if (a.partner == b.partner)
        ang = M_PI;
    }
    if (ang == 0.0) return 0.0;
    const RadialGrid& g = disc.radial;
    double s = 0.0;
    for (int i = 0; i < g.n(); ++i)
      s += g.volume[i] * (i < u.size() ? lambda * eu(i) : 0.0) * a.radial(i) *
           b.radial(i);
    return ang * s;
  }

  const SectorGrid& g = disc.sector;
  const int m = g.m;
  const int Nt = g.nt();
  const bool sum_ab = ((a.wave_number + b.wave_number) % m) == 0;
  const bool diff_ab = ((a.wave_number - b.wave_number) % m) == 0;
  if (!sum_ab && !diff_ab) return 0.0;
  std::complex<double> A(0, 0), C(0, 0);
  for (int i = 1; i <= g.nr() - 1; ++i)
    for (int j = 0; j < Nt; ++j) {
      const double w = lambda * eu((i - 1) * Nt + j) * g.volume(i, j);
      A += w * a.sector(i, j) * b.sector(i, j);
      C += w * a.sector(i, j) * std::conj(b.sector(i, j));
    }
  double total = 0.0;
  if (sum_ab) total += 0.5 * m * (a.prefactor * b.prefactor * A).real();
  if (diff_ab) total += 0.5 * m * (a.prefactor * std::conj(b.prefactor) * C).real();
  return total;
}

BandGapReport check_band_gap(const std::vector<EigenPair>& pairs, int m,
                             double lambda) {
  BandGapReport rep;
  if (static_cast<int>(pairs.size()) < 3 * m + 1) return rep; // incomplete
  rep.complete = true;
  rep.mu_after_band = pairs[3 * m].mu;
  rep.gap_ok = rep.mu_after_band > 1.0;
  for (int k = m; k < 3 * m; ++k)
    rep.second_band_max_dev =
        std::max(rep.second_band_max_dev, std::abs(pairs[k].mu - 1.0));
  rep.second_band_dev_over_lambda = rep.second_band_max_dev / lambda;
  return rep;
}

} // namespace gelfand
