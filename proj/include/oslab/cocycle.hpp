#pragma once

// Orbits and the derivative cocycle acting on subspaces, splittings and flags.

#include "oslab/grassmann.hpp"
#include "oslab/systems.hpp"

#include <iosfwd>
#include <vector>

namespace oslab {

/// x_0 .. x_n together with J_i = Df(x_i) for i < n.
struct OrbitSegment {
  std::vector<Point> points;
  std::vector<Matrix> jacobians;

  int horizon() const { return static_cast<int>(jacobians.size()); }
};

/// Iterates x_{-back} .. x_{forward} around a base point. Backward points
/// come from the inverse map, so `points[origin]` is the base point.
struct OrbitWindow {
  std::vector<Point> points;
  std::vector<Matrix> jacobians;  // Df at every point of the window
  int origin = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Escape radius for non-compact systems.
inline constexpr double kDivergenceRadius = 1e6;

/// Throws NumericError when a henon or linear orbit leaves the ball of
/// radius 1e6.
OrbitSegment generate_orbit(const System& sys, const Point& x0, int n);

OrbitWindow generate_window(const System& sys, const Point& x0, int back, int forward);

/// Checks the OrbitSegment invariants against re-application of f. Returns
/// the largest deviation seen (points and Jacobians).
double audit_orbit(const System& sys, const OrbitSegment& orbit);

/// Orthonormalized image J E. DegeneracyError when the image frame has
/// volume below 1e-12.
Subspace push_subspace(const Matrix& J, const Subspace& E);

/// An ordered direct-sum decomposition of R^d at a base point, blocks sorted
/// by increasing exponent.
struct SplittingSample {
  Point base;
  std::vector<Subspace> spaces;
  std::vector<int> dims;
  std::vector<double> exponent_estimates;

  int ambient_dim() const { return spaces.empty() ? 0 : spaces.front().ambient_dim(); }
  int block_count() const { return static_cast<int>(spaces.size()); }

  /// Throws on a sum that is not direct or does not fill R^d, or on
  /// exponents that are not strictly increasing (gap > 1e-6).
  void validate() const;
};

/// The nested pair (F_1 < ... < F_k ; H_1 > ... > H_k) with
/// dim F_i = l_i and dim H_i = d - l_i.
struct FlagSample {
  Point base;
  std::vector<Subspace> filtration;
  std::vector<Subspace> cofiltration;
  std::vector<int> level_dims;

  int levels() const { return static_cast<int>(filtration.size()); }

  /// Checks dimensions and nesting within 1e-10.
  void validate() const;
};

SplittingSample push_splitting(const Matrix& J, const SplittingSample& gamma, const Point& y);

/// F_i = E_1 + ... + E_i, H_i = E_{i+1} + ... + E_s.
FlagSample splitting_to_flag(const SplittingSample& gamma);

/// Recovers E_i = F_i n H_{i-1}; DomainError when an intersection has the
/// wrong dimension (the flag is outside the image of splitting_to_flag).
/// Exponent estimates are not carried by a flag and come back empty.
SplittingSample flag_to_splitting(const FlagSample& w, double tol = 1e-8);

FlagSample push_flag(const Matrix& J, const FlagSample& w, const Point& y);

/// log|det(J restricted to F_i)|, level i is 1-based.
double phi(int i, const Matrix& J, const FlagSample& w);
/// log|det(J restricted to H_i)|, level i is 1-based.
double psi(int i, const Matrix& J, const FlagSample& w);

/// One row per step: point coordinates, then the Jacobian row-major. The
/// final point has no Jacobian and its Jacobian columns are left empty.
void write_orbit_csv(std::ostream& out, const OrbitSegment& orbit);

}  // namespace oslab
