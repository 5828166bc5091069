#pragma once

#include <Eigen/Dense>

#include "gelfand/errors.hpp"

namespace gelfand {

using Point = Eigen::Vector2d;

enum class DomainKind { Disk, Annulus };

/// Planar domain on which the Green kernel is available in closed or
/// series form: a disk of given radius, or an annulus a < |x| < 1.
struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  double disk_radius = 1.0;     // disk only
  double inner_radius = 0.5;    // annulus only, outer radius fixed to 1
  int series_truncation = 256;  // annulus only, Fourier modes of the kernel

  static DomainSpec disk(double radius) {
    if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
    DomainSpec d;
    d.kind = DomainKind::Disk;
    d.disk_radius = radius;
    return d;
  }

  static DomainSpec annulus(double a, int n_modes = 256) {
    if (!(a > 0.0 && a < 1.0))
      throw ConfigError("annulus inner radius must lie in (0,1)");
    if (n_modes < 8) throw ConfigError("series truncation must be >= 8");
    DomainSpec d;
    d.kind = DomainKind::Annulus;
    d.inner_radius = a;
    d.series_truncation = n_modes;
    return d;
  }

  bool contains(const Point& p, double margin = 0.0) const {
    const double r = p.norm();
    if (kind == DomainKind::Disk) return r < disk_radius - margin;
    return r > inner_radius + margin && r < 1.0 - margin;
  }

  // Distance from an interior point to the boundary (negative outside).
  double boundary_distance(const Point& p) const {
    const double r = p.norm();
    if (kind == DomainKind::Disk) return disk_radius - r;
    return std::min(r - inner_radius, 1.0 - r);
  }

  double diameter() const {
    return kind == DomainKind::Disk ? 2.0 * disk_radius : 2.0;
  }

  void require_interior(const Point& p, const char* who) const {
    if (!contains(p))
      throw PointOutsideDomain(std::string(who) + ": point (" +
                               std::to_string(p.x()) + ", " +
                               std::to_string(p.y()) + ") not interior");
  }
};

} // namespace gelfand
