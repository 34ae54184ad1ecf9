#pragma once

// Periodic orbits: close-return seeding, multiple-shooting Newton refinement,
// monodromy spectra and invariant splittings along the cycle.

#include "oslab/oseledets.hpp"

#include <vector>

namespace oslab {

struct PeriodicOrbit {
  std::vector<Point> points;
  int period = 0;
  Matrix monodromy;          // J_{p-1} ... J_0 from points[0]
  Vector eigen_moduli;       // |mu_i| of the monodromy, increasing
  Vector exponents;          // (1/p) log|mu_i|, increasing
  std::vector<int> block_dims;
  SplittingSample splitting;  // at points[0]
  bool hyperbolic = false;
  double residual = 0.0;  // max distance(f(points[i]), points[i+1 mod p])
};

struct SearchConfig {
  int max_period = 50;
  int seed_orbit_length = 2000;
  double return_radius = 0.05;
  int newton_max_iters = 50;
  double newton_tol = 1e-13;
  double dedup_tol = 1e-8;

  void validate() const;
};

struct CloseReturn {
  Point point;
  int period = 0;
  int index = 0;  // position of the point on the seed orbit
};

/// Pairs (x_j, p) with p <= max_period and distance(x_{j+p}, x_j) below the
/// return radius. For each period only the closest return in a run of
/// consecutive matches is kept.
std::vector<CloseReturn> close_returns(const System& sys, const OrbitSegment& orbit, const SearchConfig& cfg);

/// Newton refinement of a period-p cycle through `seed` by multiple shooting
/// on (f(x_i) - x_{i+1 mod p}). Reduces to the minimal period when the
/// converged cycle repeats. Throws NumericError on a singular step or when
/// the iteration budget is exhausted.
PeriodicOrbit newton_refine(const System& sys, const Point& seed, int p, const SearchConfig& cfg);

/// Invariant splitting of a monodromy matrix: eigenvalues grouped by modulus
/// (relative tolerance 1e-6), real invariant subspaces per group, blocks by
/// increasing (1/p) log-modulus.
SplittingSample eigensplit(const Matrix& monodromy, int p);

/// Lyapunov exponents of the cycle through the cyclic QR method; shift
/// invariant and accurate for long periods where the monodromy itself is
/// badly conditioned.
Vector cycle_exponents(const std::vector<Matrix>& jacobians, int cycles = 0);

/// Splittings at every cycle point, from sweeps over the repeated cycle.
std::vector<SplittingSample> cycle_splittings(const System& sys, const PeriodicOrbit& po);

/// Exact averages against the uniform measure on the cycle.
MeasureStats orbit_stats(const System& sys, const PeriodicOrbit& po);

/// The same orbit started at points[shift].
PeriodicOrbit rotate_orbit(const System& sys, const PeriodicOrbit& po, int shift);

/// Two orbits are the same when their point sets agree under cyclic
/// alignment within `tol`.
bool same_orbit(const System& sys, const PeriodicOrbit& a, const PeriodicOrbit& b, double tol);

/// Close returns on the seed orbit, Newton on every candidate, hyperbolic
/// survivors deduplicated and sorted by their lexicographically smallest point.
std::vector<PeriodicOrbit> find_periodic_orbits(const System& sys, const Point& x0, const SearchConfig& cfg,
                                                int threads = 1);

}  // namespace oslab
