#include "gelfand/fields.hpp"

#include <algorithm>
#include <cmath>

#include "gelfand/errors.hpp"

namespace gelfand {

namespace {

Eigen::VectorXd radial_full_values(const RadialGrid& g, const Eigen::VectorXd& u) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(g.n() + 1);
  full.head(u.size()) = u;
  return full;
}

Eigen::MatrixXd sector_full_values(const SectorGrid& g, const Eigen::VectorXd& u) {
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(g.nr() + 1, g.nt());
  for (int i = 1; i <= g.nr() - 1; ++i)
    for (int j = 0; j < g.nt(); ++j) full(i, j) = u((i - 1) * g.nt() + j);
  return full;
}

} // namespace

SolutionField::SolutionField(const Discretization& disc, const Eigen::VectorXd& u)
    : disc_(&disc) {
  if (disc.kind == Discretization::Kind::Radial)
    radial_full_ = radial_full_values(disc.radial, u);
  else
    sector_full_ = sector_full_values(disc.sector, u);
}

double SolutionField::operator()(const Point& x) const {
  if (disc_->kind == Discretization::Kind::Radial) {
    const RadialGrid& g = disc_->radial;
    const double r = x.norm();
    if (r > g.rho) throw PointOutsideDomain("SolutionField");
    if (r < g.r[1]) {
      const double f0 = radial_full_(0), f1 = radial_full_(1);
      return f0 + (f1 - f0) * r * r / (g.r[1] * g.r[1]);
    }
    return interp_quadratic(g.r, radial_full_, r);
  }
  const SectorGrid& g = disc_->sector;
  const double r = x.norm();
  if (r < g.a || r > 1.0) throw PointOutsideDomain("SolutionField");
  double th = std::atan2(x.y(), x.x());
  const double span = 2.0 * M_PI / g.m;
  th -= span * std::floor((th + span / 2) / span);

  const int Nt = g.nt();
  int j0 = static_cast<int>(std::lower_bound(g.theta.begin(), g.theta.end(), th) -
                            g.theta.begin());
  const auto& rr = g.r;
  int i0 = static_cast<int>(std::lower_bound(rr.begin(), rr.end(), r) - rr.begin());
  i0 = std::clamp(i0, 1, static_cast<int>(rr.size()) - 2);

  double col_val[3], col_th[3];
  for (int c = 0; c < 3; ++c) {
    int j = j0 - 1 + c;
    double shift = 0.0;
    if (j < 0) {
      j += Nt;
      shift = -span;
    } else if (j >= Nt) {
      j -= Nt;
      shift = span;
    }
    col_th[c] = g.theta[j] + shift;
    const double x0 = rr[i0 - 1], x1 = rr[i0], x2 = rr[i0 + 1];
    const double l0 = (r - x1) * (r - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (r - x0) * (r - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (r - x0) * (r - x1) / ((x2 - x0) * (x2 - x1));
    col_val[c] = l0 * sector_full_(i0 - 1, j) + l1 * sector_full_(i0, j) +
                 l2 * sector_full_(i0 + 1, j);
  }
  const double t0 = col_th[0], t1 = col_th[1], t2 = col_th[2];
  const double l0 = (th - t1) * (th - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (th - t0) * (th - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (th - t0) * (th - t1) / ((t2 - t0) * (t2 - t1));
  return l0 * col_val[0] + l1 * col_val[1] + l2 * col_val[2];
}

} // namespace gelfand
