#include "gelfand/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "gelfand/bubble.hpp"
#include "gelfand/green.hpp"

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

// Integral over [a,b] of the quadratic through (x0,f0),(x1,f1),(x2,f2).
double quad_integral(double x0, double x1, double x2, double f0, double f1,
                     double f2, double a, double b) {
  const double d0 = (x0 - x1) * (x0 - x2);
  const double d1 = (x1 - x0) * (x1 - x2);
  const double d2 = (x2 - x0) * (x2 - x1);
  const double c2 = f0 / d0 + f1 / d1 + f2 / d2;
  const double c1 = -f0 * (x1 + x2) / d0 - f1 * (x0 + x2) / d1 - f2 * (x0 + x1) / d2;
  const double c0 = f0 * x1 * x2 / d0 + f1 * x0 * x2 / d1 + f2 * x0 * x1 / d2;
  auto F = [&](double x) { return ((c2 / 3.0 * x + c1 / 2.0) * x + c0) * x; };
  return F(b) - F(a);
}

} // namespace

PeakData locate_peaks(const Discretization& disc, const Eigen::VectorXd& u,
                      double lambda, int m_expected) {
  PeakData out;
  out.lambda = lambda;

  if (disc.kind == Discretization::Kind::Radial) {
    if (m_expected != 1)
      throw WrongPeakCount("locate_peaks: radial disk states carry one peak");
    const RadialGrid& g = disc.radial;
    const Eigen::VectorXd full = radial_full_values(g, u);
    int imax = 0;
    const double umax = full.maxCoeff(&imax);
    int count = 0;
    for (int i = 0; i <= g.n(); ++i) {
      const bool left_ok = i == 0 || full(i) > full(i - 1);
      const bool right_ok = i == g.n() || full(i) > full(i + 1);
      if (left_ok && right_ok && full(i) > 0.5 * umax) ++count;
    }
    if (count != 1) throw WrongPeakCount("locate_peaks: found " +
                                         std::to_string(count) + " radial maxima");
    Point peak(0.0, 0.0);
    double height = full(0);
    if (imax > 0) { // off-center maximum: parabola through the three neighbors
      const int i = std::clamp(imax, 1, g.n() - 1);
      const double x0 = g.r[i - 1], x1 = g.r[i], x2 = g.r[i + 1];
      const double f0 = full(i - 1), f1 = full(i), f2 = full(i + 1);
      const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
      const double A = (x2 * (f1 - f0) + x1 * (f0 - f2) + x0 * (f2 - f1)) / denom;
      const double B =
          (x2 * x2 * (f0 - f1) + x1 * x1 * (f2 - f0) + x0 * x0 * (f1 - f2)) / denom;
      const double rstar = -B / (2.0 * A);
      peak = Point(rstar, 0.0);
      height = f1 - A * (x1 - rstar) * (x1 - rstar);
    }
    out.peaks.push_back(peak);
    out.heights.push_back(height);
    out.delta.push_back(1.0 / std::sqrt(lambda * std::exp(height)));
    out.ball_radius = g.rho - peak.norm();
    return out;
  }

  const SectorGrid& g = disc.sector;
  if (m_expected != g.m)
    throw WrongPeakCount("locate_peaks: sector grid carries m = " +
                         std::to_string(g.m) + " peaks");
  const Eigen::MatrixXd full = sector_full_values(g, u);
  const double umax = full.maxCoeff();
  const int Nt = g.nt();

  int besti = -1, bestj = -1;
  int count = 0;
  for (int i = 1; i <= g.nr() - 1; ++i)
    for (int j = 0; j < Nt; ++j) {
      const double v = full(i, j);
      const int jm = (j + Nt - 1) % Nt, jp = (j + 1) % Nt;
      if (v > full(i - 1, j) && v > full(i + 1, j) && v > full(i, jm) &&
          v > full(i, jp) && v > 0.5 * umax) {
        ++count;
        besti = i;
        bestj = j;
      }
    }
  if (count != 1)
    throw WrongPeakCount("locate_peaks: sector holds " + std::to_string(count) +
                         " maxima above half height");

  // Biquadratic least-squares fit on the 3x3 stencil around the maximizer.
  Eigen::MatrixXd A(9, 6);
  Eigen::VectorXd b(9);
  const double span = 2.0 * M_PI / g.m;
  int row = 0;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      const int i = besti + di;
      int j = bestj + dj;
      double shift = 0.0;
      if (j < 0) {
        j += Nt;
        shift = -span;
      } else if (j >= Nt) {
        j -= Nt;
        shift = span;
      }
      const double dr = g.r[i] - g.r[besti];
      const double dt = (g.theta[j] + shift) - g.theta[bestj];
      A.row(row) << 1.0, dr, dt, dr * dr, dr * dt, dt * dt;
      b(row) = full(i, j);
      ++row;
    }
  const Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
  Eigen::Matrix2d Hq;
  Hq << 2.0 * q(3), q(4), q(4), 2.0 * q(5);
  const Eigen::Vector2d rhs(-q(1), -q(2));
  Eigen::Vector2d step = Hq.fullPivLu().solve(rhs);
  const double max_dr = g.radial_spacing_at(besti);
  const double max_dt = g.dtheta_link(std::max(bestj - 1, 0));
  step(0) = std::clamp(step(0), -max_dr, max_dr);
  step(1) = std::clamp(step(1), -max_dt, max_dt);
  const double rstar = g.r[besti] + step(0);
  const double tstar = g.theta[bestj] + step(1);
  const double height = q(0) + q(1) * step(0) + q(2) * step(1) +
                        q(3) * step(0) * step(0) + q(4) * step(0) * step(1) +
                        q(5) * step(1) * step(1);

  const double delta = 1.0 / std::sqrt(lambda * std::exp(height));
  double min_pair = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.m; ++p) {
    const double ang = tstar + span * p;
    out.peaks.emplace_back(rstar * std::cos(ang), rstar * std::sin(ang));
    out.heights.push_back(height);
    out.delta.push_back(delta);
  }
  for (size_t a = 0; a < out.peaks.size(); ++a)
    for (size_t c = a + 1; c < out.peaks.size(); ++c)
      min_pair = std::min(min_pair, (out.peaks[a] - out.peaks[c]).norm());
  double R = std::min(rstar - g.a, 1.0 - rstar);
  if (g.m >= 2) R = std::min(R, 0.5 * min_pair);
  out.ball_radius = R;
  return out;
}

double polygon_circle_area(const std::vector<Point>& poly, const Point& center,
                           double radius) {
  const double R2 = radius * radius;
  auto arc_area = [&](const Point& a, const Point& b) {
    const double ang = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    return 0.5 * R2 * ang;
  };
  auto cross2 = [](const Point& a, const Point& b) {
    return a.x() * b.y() - a.y() * b.x();
  };

  double area = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int e = 0; e < n; ++e) {
    Point p = poly[e] - center;
    Point q = poly[(e + 1) % n] - center;
    const bool pin = p.squaredNorm() <= R2, qin = q.squaredNorm() <= R2;

    // Intersections of p + t(q-p) with the circle.
    const Point d = q - p;
    const double A = d.squaredNorm();
    const double B = 2.0 * p.dot(d);
    const double C = p.squaredNorm() - R2;
    const double disc = B * B - 4.0 * A * C;
    double t1 = -1, t2 = -1;
    if (disc > 0 && A > 0) {
      const double sq = std::sqrt(disc);
      t1 = (-B - sq) / (2.0 * A);
      t2 = (-B + sq) / (2.0 * A);
    }
    auto at = [&](double t) { return Point(p + t * d); };

    if (pin && qin) {
      area += 0.5 * cross2(p, q);
    } else if (pin && !qin) {
      const Point x1 = at(t2);
      area += 0.5 * cross2(p, x1) + arc_area(x1, q);
    } else if (!pin && qin) {
      const Point x1 = at(t1);
      area += arc_area(p, x1) + 0.5 * cross2(x1, q);
    } else {
      if (disc > 0 && t1 > 0.0 && t1 < 1.0 && t2 > 0.0 && t2 < 1.0) {
        const Point x1 = at(t1), x2 = at(t2);
        area += arc_area(p, x1) + 0.5 * cross2(x1, x2) + arc_area(x2, q);
      } else {
        area += arc_area(p, q);
      }
    }
  }
  return area;
}

std::vector<double> local_mass(const Discretization& disc, const Eigen::VectorXd& u,
                               double lambda, PeakData& peaks,
                               std::optional<double> ball_radius) {
  const double R = ball_radius.value_or(peaks.ball_radius);

  if (disc.kind == Discretization::Kind::Radial) {
    const RadialGrid& g = disc.radial;
    const Eigen::VectorXd full = radial_full_values(g, u);
    Eigen::VectorXd f(g.n() + 1);
    for (int i = 0; i <= g.n(); ++i)
      f(i) = 2.0 * M_PI * lambda * std::exp(full(i)) * g.r[i];
    double s = 0.0;
    for (int i = 0; i + 1 <= g.n(); ++i) {
      const double a = g.r[i];
      if (a >= R) break;
      const double b = std::min(g.r[i + 1], R);
      const int lo = std::clamp(i, 1, g.n() - 1);
      const double left = quad_integral(g.r[lo - 1], g.r[lo], g.r[lo + 1],
                                        f(lo - 1), f(lo), f(lo + 1), a, b);
      const int hi = std::clamp(i + 1, 1, g.n() - 1);
      const double right = quad_integral(g.r[hi - 1], g.r[hi], g.r[hi + 1],
                                         f(hi - 1), f(hi), f(hi + 1), a, b);
      s += 0.5 * (left + right);
    }
    peaks.sigma.assign(1, s);
    return peaks.sigma;
  }

  const SectorGrid& g = disc.sector;
  const Eigen::MatrixXd full = sector_full_values(g, u);
  const Point x1 = peaks.peaks.at(0);
  double s = 0.0;
  const int Nt = g.nt();
  for (int i = 1; i <= g.nr() - 1; ++i)
    for (int j = 0; j < Nt; ++j) {
      const double r0 = g.rface[i - 1], r1 = g.rface[i];
      const double a0 = g.theta_face[j], a1 = g.theta_face[j + 1];
      const std::vector<Point> quad = {
          {r0 * std::cos(a0), r0 * std::sin(a0)},
          {r1 * std::cos(a0), r1 * std::sin(a0)},
          {r1 * std::cos(a1), r1 * std::sin(a1)},
          {r0 * std::cos(a1), r0 * std::sin(a1)}};
      double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
      for (const Point& pt : quad) {
        const double dd = (pt - x1).norm();
        dmin = std::min(dmin, dd);
        dmax = std::max(dmax, dd);
      }
      const double bulge = r1 * (a1 - a0) * (a1 - a0) / 8.0;
      if (dmin - bulge > R) continue;
      double cell_area;
      if (dmax + bulge < R)
        cell_area = g.volume(i, j); // fully inside: use the exact polar area
      else
        cell_area = polygon_circle_area(quad, x1, R);
      s += lambda * std::exp(full(i, j)) * cell_area;
    }
  peaks.sigma.assign(g.m, s);
  return peaks.sigma;
}

std::vector<double> extract_c(const Discretization& disc, const EigenPair& vk,
                              const PeakData& peaks) {
  std::vector<double> c;
  c.reserve(peaks.peaks.size());
  for (const Point& p : peaks.peaks)
    c.push_back(eigenfunction_value(disc, vk, p));
  return c;
}

double rescaled_profile_error(const Discretization& disc, const EigenPair& vk,
                              const PeakData& peaks, int j, double c_j, double mu,
                              double window, bool first_order_only) {
  const Point xj = peaks.peaks.at(j - 1);
  const double delta = peaks.delta.at(j - 1);
  const double bdist = disc.kind == Discretization::Kind::Radial
                           ? disc.radial.rho - xj.norm()
                           : std::min(xj.norm() - disc.sector.a, 1.0 - xj.norm());
  if (delta * window >= bdist)
    throw WindowExceedsGrid("rescaled_profile_error: window leaves the domain");

  const double v_at_peak = eigenfunction_value(disc, vk, xj);
  double err = 0.0;
  const int n_rad = 64, n_ang = 12;
  for (int ia = 0; ia < n_ang; ++ia) {
    const double ang = 2.0 * M_PI * ia / n_ang;
    for (int ir = 1; ir <= n_rad; ++ir) {
      const double t = window * ir / n_rad;
      const Point x = xj + delta * t * Point(std::cos(ang), std::sin(ang));
      const double v = eigenfunction_value(disc, vk, x);
      const double model =
          v_at_peak + (first_order_only ? 0.0 : mu * c_j * bubble_profile(t));
      err = std::max(err, std::abs(v - model));
    }
  }
  return err / mu;
}

namespace {

std::vector<Point> far_field_samples(const DomainSpec& dom,
                                     const std::vector<Point>& kappa,
                                     double min_dist) {
  std::vector<Point> pts;
  const double lo = dom.kind == DomainKind::Disk ? 0.05 * dom.disk_radius
                                                 : dom.inner_radius + 0.05;
  const double hi = dom.kind == DomainKind::Disk ? 0.92 * dom.disk_radius : 0.95;
  for (int ir = 0; ir < 6; ++ir) {
    const double r = lo + (hi - lo) * ir / 5.0;
    for (int ia = 0; ia < 24; ++ia) {
      const double t = 2.0 * M_PI * ia / 24.0 + 0.05;
      const Point x(r * std::cos(t), r * std::sin(t));
      if (!dom.contains(x, 1e-6)) continue;
      bool ok = true;
      for (const Point& k : kappa)
        if ((x - k).norm() < min_dist) ok = false;
      if (ok) pts.push_back(x);
    }
  }
  return pts;
}

} // namespace

double far_field_error_u(const Discretization& disc, const Eigen::VectorXd& u,
                         const DomainSpec& dom, const std::vector<Point>& kappa,
                         double min_dist) {
  const SolutionField field(disc, u);
  double err = 0.0;
  for (const Point& x : far_field_samples(dom, kappa, min_dist)) {
    double model = 0.0;
    for (const Point& k : kappa) model += 8.0 * M_PI * green(dom, x, k).value;
    err = std::max(err, std::abs(field(x) - model));
  }
  return err;
}

double far_field_error_v(const Discretization& disc, const EigenPair& vk,
                         const DomainSpec& dom, const std::vector<Point>& kappa,
                         const std::vector<double>& c, double min_dist) {
  double err = 0.0, scale = 0.0;
  for (const Point& x : far_field_samples(dom, kappa, min_dist)) {
    double model = 0.0;
    for (size_t j = 0; j < kappa.size(); ++j)
      model += 8.0 * M_PI * c[j] * green(dom, x, kappa[j]).value;
    const double v = eigenfunction_value(disc, vk, x);
    err = std::max(err, std::abs(v / vk.mu - model));
    scale = std::max(scale, std::abs(model));
  }
  return scale > 0 ? err / scale : err;
}

} // namespace gelfand
