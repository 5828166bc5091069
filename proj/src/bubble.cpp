#include "gelfand/bubble.hpp"

#include <cmath>
#include <functional>

#include "gelfand/errors.hpp"

namespace gelfand {

double bubble_profile(double r) {
  return -2.0 * std::log1p(r * r / 8.0);
}

namespace {

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  if (depth > 60)
    throw QuadratureNotConverged("adaptive_simpson: recursion depth exceeded");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 0);
}

double eU(double r) {
  const double t = 1.0 + r * r / 8.0;
  return 1.0 / (t * t);
}

} // namespace

BubbleConstants bubble_constants(double rel_tol) {
  const double R = 80.0; // truncation radius; the r^-4 tails below are exact
  const double tol = 0.1 * rel_tol * 8.0 * M_PI;

  BubbleConstants out;
  out.mass = integrate([](double r) { return 2.0 * M_PI * r * eU(r); }, 0.0, R, tol);
  out.mass_u = integrate(
      [](double r) { return 2.0 * M_PI * r * eU(r) * bubble_profile(r); }, 0.0, R,
      tol);
  out.log_moment = integrate(
      [](double r) { return r > 0 ? -r * std::log(r) * eU(r) : 0.0; }, 0.0, R, tol);

  // e^U = 64/(8+r^2)^2; elementary antiderivatives for r > R.
  const double w = 8.0 + R * R;
  out.mass += 64.0 * M_PI / w;
  out.mass_u += -128.0 * M_PI * (std::log(w / 8.0) + 1.0) / w;
  const double w0 = R * R;
  out.log_moment -=
      16.0 * (std::log(w0) / (8.0 + w0) - std::log(w0 / (8.0 + w0)) / 8.0);
  return out;
}

} // namespace gelfand
