#include "gelfand/green.hpp"

#include <cmath>

namespace gelfand {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Eigen::Vector2d radial_unit(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

Eigen::Vector2d angular_unit(double theta) {
  return {-std::sin(theta), std::cos(theta)};
}

// ---------------------------------------------------------------------------
// Disk of radius rho.  On the unit disk the regular part is
//   K(x,y) = (1/4pi) log Q,   Q = 1 - 2 x.y + |x|^2 |y|^2,
// which is smooth for |x|,|y| < 1 (Q >= (1 - |x||y|)^2 > 0) and needs no
// image point, so the diagonal and y -> 0 limits are exact.
// Scaling: K_rho(x,y) = K_1(x/rho, y/rho) + (1/2pi) log rho.
// ---------------------------------------------------------------------------

struct DiskRegular {
  double value;
  Eigen::Vector2d grad_x;
  Eigen::Matrix2d hess_x;
  Eigen::Matrix2d cross; // d^2 K / dx dy
};

DiskRegular disk_regular(const DomainSpec& dom, const Point& x0, const Point& y0) {
  const double rho = dom.disk_radius;
  const Eigen::Vector2d x = x0 / rho, y = y0 / rho;
  const double Q = 1.0 - 2.0 * x.dot(y) + x.squaredNorm() * y.squaredNorm();
  const Eigen::Vector2d Qx = 2.0 * (y.squaredNorm() * x - y);
  const Eigen::Vector2d Qy = 2.0 * (x.squaredNorm() * y - x);
  const Eigen::Matrix2d Qxx = 2.0 * y.squaredNorm() * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d Qxy =
      -2.0 * Eigen::Matrix2d::Identity() + 4.0 * x * y.transpose();

  DiskRegular out;
  const double c = 1.0 / (4.0 * M_PI);
  out.value = c * std::log(Q) + std::log(rho) / kTwoPi;
  out.grad_x = (c / rho) * Qx / Q;
  out.hess_x = (c / (rho * rho)) * (Qxx / Q - Qx * Qx.transpose() / (Q * Q));
  out.cross = (c / (rho * rho)) * (Qxy / Q - Qx * Qy.transpose() / (Q * Q));
  return out;
}

// ---------------------------------------------------------------------------
// Annulus a < |x| < 1.  Separation of variables gives, with r = |x|, s = |y|,
// psi = theta - phi,
//   K(x,y) = (log r log s)/(2pi log a)
//          + (1/2pi) sum_{n>=1} cos(n psi) (u1^n + u2^n - u3^n - u4^n)/(n D_n)
// where u1 = a^2 r/s, u2 = a^2 s/r, u3 = r s, u4 = a^2/(r s), D_n = 1 - a^2n.
// All u_i lie in (0,1) for interior points, so the series converges
// geometrically; coefficients follow from matching the log singularity on
// both boundary circles.
// ---------------------------------------------------------------------------

struct AnnulusSeries {
  // Accumulated sums; f_* are polar derivatives of K.
  double val, f_r, f_rr, f_t, f_tt, f_rt;
  double f_s, f_rs, f_rphi, f_ts, f_tphi;
  double tail;
};

AnnulusSeries annulus_series(const DomainSpec& dom, const Point& x, const Point& y) {
  const double a = dom.inner_radius;
  const int N = dom.series_truncation;
  const double r = x.norm(), s = y.norm();
  const double theta = std::atan2(x.y(), x.x());
  const double phi = std::atan2(y.y(), y.x());
  const double psi = theta - phi;
  const double la = std::log(a);

  const double a2 = a * a;
  const double u1 = a2 * r / s, u2 = a2 * s / r, u3 = r * s, u4 = a2 / (r * s);

  double S0 = 0, Sr = 0, Srr = 0, St = 0, Stt = 0, Srt = 0;
  double Ss = 0, Srs = 0, Sst = 0;

  double p1 = 1, p2 = 1, p3 = 1, p4 = 1; // u_i^n
  double q = 1;                          // a^(2n)
  const double cpsi = std::cos(psi), spsi = std::sin(psi);
  double cn = 1, sn = 0; // cos(n psi), sin(n psi)

  for (int n = 1; n <= N; ++n) {
    p1 *= u1; p2 *= u2; p3 *= u3; p4 *= u4; q *= a2;
    const double c = cn * cpsi - sn * spsi; // cos(n psi)
    const double sg = sn * cpsi + cn * spsi;
    cn = c; sn = sg;

    const double Dn = 1.0 - q;
    const double B = (p1 + p2 - p3 - p4) / Dn;   // n D_n F_n / 1
    const double A = (p1 - p2 - p3 + p4) / Dn;   // r dF/dr * n -> see below
    const double C = (-p1 + p2 - p3 + p4) / Dn;
    const double E = (p1 + p2 + p3 + p4) / Dn;

    const double Fn = B / n;
    const double dFr = A / r;
    const double dFs = C / s;

    S0 += c * Fn;
    Sr += c * dFr;
    Srr += c * (n * B - A) / (r * r);
    St += n * sg * Fn;
    Stt += n * n * c * Fn;
    Srt += n * sg * dFr;
    Ss += c * dFs;
    Srs += -c * n * E / (r * s);
    Sst += n * sg * dFs;
  }

  const double inv2pi = 1.0 / kTwoPi;
  AnnulusSeries out;
  out.val = std::log(r) * std::log(s) / (kTwoPi * la) + inv2pi * S0;
  out.f_r = std::log(s) / (kTwoPi * r * la) + inv2pi * Sr;
  out.f_rr = -std::log(s) / (kTwoPi * r * r * la) + inv2pi * Srr;
  out.f_t = -inv2pi * St;
  out.f_tt = -inv2pi * Stt;
  out.f_rt = -inv2pi * Srt;
  out.f_s = std::log(r) / (kTwoPi * s * la) + inv2pi * Ss;
  out.f_rs = 1.0 / (kTwoPi * r * s * la) + inv2pi * Srs;
  out.f_rphi = inv2pi * Srt;
  out.f_ts = -inv2pi * Sst;
  out.f_tphi = inv2pi * Stt;

  // Geometric tail of the dropped modes n > N (value level).
  const double D1 = 1.0 - a2;
  double t = 0;
  t += std::pow(u1, N + 1) / (1.0 - u1);
  t += std::pow(u2, N + 1) / (1.0 - u2);
  t += std::pow(u3, N + 1) / (1.0 - u3);
  t += std::pow(u4, N + 1) / (1.0 - u4);
  out.tail = t / (kTwoPi * (N + 1) * D1);
  return out;
}

Eigen::Matrix2d polar_hessian(double f_r, double f_rr, double f_t, double f_tt,
                              double f_rt, double r, double theta) {
  const Eigen::Vector2d er = radial_unit(theta), et = angular_unit(theta);
  Eigen::Matrix2d H = f_rr * er * er.transpose();
  const double mix = f_rt / r - f_t / (r * r);
  H += mix * (er * et.transpose() + et * er.transpose());
  H += (f_r / r + f_tt / (r * r)) * et * et.transpose();
  return H;
}

struct LogPart {
  double value;
  Eigen::Vector2d grad_x;
  Eigen::Matrix2d hess_x;
  Eigen::Matrix2d cross;
};

// (1/2pi) log(1/|x-y|) and its derivatives.
LogPart log_part(const Point& x, const Point& y) {
  const Eigen::Vector2d d = x - y;
  const double d2 = d.squaredNorm();
  LogPart out;
  out.value = -std::log(d2) / (2.0 * kTwoPi);
  out.grad_x = -d / (kTwoPi * d2);
  const Eigen::Matrix2d m =
      Eigen::Matrix2d::Identity() / d2 - 2.0 * d * d.transpose() / (d2 * d2);
  out.hess_x = -m / kTwoPi;
  out.cross = m / kTwoPi;
  return out;
}

} // namespace

GreenEval regular_part(const DomainSpec& dom, const Point& x, const Point& y,
                       bool with_hessian) {
  dom.require_interior(x, "regular_part");
  dom.require_interior(y, "regular_part");
  GreenEval out;
  if (dom.kind == DomainKind::Disk) {
    const DiskRegular k = disk_regular(dom, x, y);
    out.value = k.value;
    out.grad_x = k.grad_x;
    if (with_hessian) out.hess_x = k.hess_x;
    return out;
  }
  const AnnulusSeries S = annulus_series(dom, x, y);
  const double r = x.norm();
  const double theta = std::atan2(x.y(), x.x());
  out.value = S.val;
  out.grad_x = S.f_r * radial_unit(theta) + (S.f_t / r) * angular_unit(theta);
  if (with_hessian)
    out.hess_x = polar_hessian(S.f_r, S.f_rr, S.f_t, S.f_tt, S.f_rt, r, theta);
  return out;
}

GreenEval green(const DomainSpec& dom, const Point& x, const Point& y,
                bool with_hessian) {
  dom.require_interior(x, "green");
  dom.require_interior(y, "green");
  if ((x - y).norm() < 1e-14 * dom.diameter())
    throw CoincidentPoints("green: x and y separated by less than 1e-14 diam");
  const LogPart lp = log_part(x, y);
  GreenEval K = regular_part(dom, x, y, with_hessian);
  GreenEval out;
  out.value = lp.value + K.value;
  out.grad_x = lp.grad_x + K.grad_x;
  if (with_hessian) out.hess_x = lp.hess_x + *K.hess_x;
  return out;
}

RobinEval robin(const DomainSpec& dom, const Point& x) {
  dom.require_interior(x, "robin");
  RobinEval out;
  if (dom.kind == DomainKind::Disk) {
    const double rho = dom.disk_radius;
    const double D = rho * rho - x.squaredNorm();
    out.value = std::log(D / rho) / kTwoPi;
    out.grad = -2.0 * x / (kTwoPi * D);
    out.hess = (-2.0 * Eigen::Matrix2d::Identity() / D -
                4.0 * x * x.transpose() / (D * D)) /
               kTwoPi;
    return out;
  }

  // Annulus: R depends on r = |x| only; differentiate the diagonal series.
  const double a = dom.inner_radius;
  const int N = dom.series_truncation;
  const double r = x.norm();
  const double la = std::log(a);
  const double a2 = a * a;
  const double v = a2 / (r * r);

  double R = std::log(r) * std::log(r) / (kTwoPi * la);
  double Rp = std::log(r) / (M_PI * r * la);
  double Rpp = (1.0 - std::log(r)) / (M_PI * r * r * la);

  double pr = 1, pv = 1, q = 1; // r^2n, v^n, a^2n
  for (int n = 1; n <= N; ++n) {
    pr *= r * r; pv *= v; q *= a2;
    const double Dn = 1.0 - q;
    R += (2.0 * q - pr - pv) / (kTwoPi * n * Dn);
    Rp += (pv / r - pr / r) / (M_PI * Dn);
    Rpp -= ((2 * n + 1) * pv / (r * r) + (2 * n - 1) * pr / (r * r)) / (M_PI * Dn);
  }

  const double theta = std::atan2(x.y(), x.x());
  const Eigen::Vector2d er = radial_unit(theta);
  out.value = R;
  out.grad = Rp * er;
  out.hess = Rpp * er * er.transpose() +
             (Rp / r) * (Eigen::Matrix2d::Identity() - er * er.transpose());
  return out;
}

Eigen::Matrix2d green_cross_hessian(const DomainSpec& dom, const Point& x,
                                    const Point& y) {
  dom.require_interior(x, "green_cross_hessian");
  dom.require_interior(y, "green_cross_hessian");
  if ((x - y).norm() < 1e-14 * dom.diameter())
    throw CoincidentPoints("green_cross_hessian: coincident points");

  const Eigen::Matrix2d Mlog = log_part(x, y).cross;
  if (dom.kind == DomainKind::Disk) return Mlog + disk_regular(dom, x, y).cross;

  const AnnulusSeries S = annulus_series(dom, x, y);
  const double r = x.norm(), s = y.norm();
  const double theta = std::atan2(x.y(), x.x());
  const double phi = std::atan2(y.y(), y.x());
  const Eigen::Vector2d er = radial_unit(theta), et = angular_unit(theta);
  const Eigen::Vector2d fr = radial_unit(phi), ft = angular_unit(phi);

  Eigen::Matrix2d M = S.f_rs * er * fr.transpose();
  M += (S.f_rphi / s) * er * ft.transpose();
  M += (S.f_ts / r) * et * fr.transpose();
  M += (S.f_tphi / (r * s)) * et * ft.transpose();
  return Mlog + M;
}

double series_tail_bound(const DomainSpec& dom, const Point& x, const Point& y) {
  if (dom.kind == DomainKind::Disk) return 0.0;
  dom.require_interior(x, "series_tail_bound");
  dom.require_interior(y, "series_tail_bound");
  return annulus_series(dom, x, y).tail;
}

} // namespace gelfand
