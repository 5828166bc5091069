#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gelfand/domain.hpp"

namespace gelfand {

// Finite-volume radial grid for the disk: nodes r_0 = 0 < ... < r_N = rho,
// cell faces at arithmetic midpoints, fluxes with log-mean face coefficients
// so that pure log-harmonics are reproduced exactly.
struct RadialGrid {
  double rho = 1.0;
  std::vector<double> r;         // N+1 nodes
  std::vector<double> face;      // N faces, face[i] between nodes i and i+1
  std::vector<double> flux_coef; // face coefficient / node spacing
  std::vector<double> volume;    // per-radian cell volume, cells 0..N-1
  std::vector<double> inv_r_w;   // per-radian cell integral of 1/r (cells 1..N-1)

  int n() const { return static_cast<int>(r.size()) - 1; }
  double spacing_at(int i) const; // local node spacing near node i

  // Sinh-graded nodes clustered at the origin; h0 = first interval length.
  static RadialGrid disk(double rho, int n_r, double h0);
  // Rebuild the derived face/volume data from stored nodes (checkpoints).
  static RadialGrid from_nodes(double rho, std::vector<double> nodes);
};

// Finite-volume polar grid on one symmetry sector of the annulus,
// theta in [-pi/m, pi/m), periodic (or Bloch-twisted) in the angle.
// Radial and angular spacings are graded towards the expected peak
// (r = r_peak, theta = 0).
struct SectorGrid {
  double a = 0.5; // inner radius, outer fixed to 1
  int m = 1;      // rotational symmetry order

  std::vector<double> r;          // Nr+1 nodes, r[0] = a, r[Nr] = 1
  std::vector<double> rface;      // Nr faces between radial nodes
  std::vector<double> rflux_coef; // log-mean coefficient / spacing
  std::vector<double> theta;      // Nt node angles (cell centers)
  std::vector<double> theta_face; // Nt+1 faces, theta_face[0] = -pi/m

  int nr() const { return static_cast<int>(r.size()) - 1; }
  int nt() const { return static_cast<int>(theta.size()); }
  double dtheta_cell(int j) const { return theta_face[j + 1] - theta_face[j]; }
  // node-to-node angular distance across face j -> j+1 (wraps at j = Nt-1)
  double dtheta_link(int j) const;
  double radial_spacing_at(int i) const;

  // cell volume of cell (i, j), interior radial index 1..Nr-1
  double volume(int i, int j) const;
  // per-cell integral of 1/r over the radial extent (angular flux factor)
  double inv_r_cell(int i) const;

  static SectorGrid make(double a, int m, int n_r, int n_t, double r_peak,
                         double hr0, double ht0);
  static SectorGrid from_nodes(double a, int m, std::vector<double> nodes,
                               std::vector<double> faces);
};

// Sinh-stretched 1D node sets used by both grids.
std::vector<double> sinh_nodes_left(double length, int n, double h0);
std::vector<double> sinh_nodes_interior(double lo, double hi, double center, int n,
                                        double h0);

// One discretization of the PDE: either the radial disk problem or the
// annulus symmetry sector.
struct Discretization {
  enum class Kind { Radial, Sector } kind = Kind::Radial;
  RadialGrid radial;
  SectorGrid sector;

  static Discretization disk(const RadialGrid& g) {
    Discretization d;
    d.kind = Kind::Radial;
    d.radial = g;
    return d;
  }
  static Discretization annulus(const SectorGrid& g) {
    Discretization d;
    d.kind = Kind::Sector;
    d.sector = g;
    return d;
  }
};

// Quadratic (3-point) interpolation on a sorted node vector.
double interp_quadratic(const std::vector<double>& x, const Eigen::VectorXd& f,
                        double xq);

} // namespace gelfand
