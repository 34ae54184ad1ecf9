#pragma once

// Desk-scale verification of the approximation theorem: reference statistics
// from a long orbit, a bounded periodic-orbit search, and the comparisons
// (exponents, mean distances, independence numbers, splitting coverage,
// weak* proxy). Outcomes are pass, fail or not-found; a bounded search that
// finds nothing is never a refutation.

#include "oslab/periodic.hpp"
#include "oslab/pesin.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oslab {

enum class Verdict { pass, fail, not_found };
std::string_view to_string(Verdict v);

struct GapReport {
  Verdict verdict = Verdict::not_found;
  double gap = 0.0;       // worst gap; meaningless unless structure matched
  Matrix gaps;            // per-index (exponents: d x 1) or per-pair (s x s)
  std::string note;       // reason for not-found
};

/// (stable, unstable) sums of the blocks with negative and positive exponent
/// estimates. DomainError when a block exponent is within `gap` of zero or
/// one side is empty.
std::pair<Subspace, Subspace> stable_unstable(const SplittingSample& g, double gap = kDefaultBlockGap);

/// Sorted spectra with multiplicity; structural mismatch (dimension or block
/// pattern) is not-found.
GapReport verify_exponents(const MeasureStats& reference, const PeriodicOrbit& po, double epsilon);
GapReport verify_exponents(const MeasureStats& reference, const MeasureStats& other, double epsilon);
GapReport verify_mean_distance(const MeasureStats& reference, const MeasureStats& other, double epsilon);
GapReport verify_independence(const MeasureStats& reference, const MeasureStats& other, double epsilon);

struct CoverageReport {
  Verdict verdict = Verdict::not_found;
  double coverage = 0.0;
  int evaluated = 0;            // samples entering the denominator
  int covered = 0;
  int estimation_failures = 0;  // excluded from the denominator
  int pesin_rejected = 0;       // excluded by the Pesin filter
  double eta = 0.0;
  struct Sample {
    Point point;
    double distance = 0.0;  // min over cycle points of dist(gamma(x), beta(z))
    int nearest = -1;       // index of the minimizing cycle point
  };
  std::vector<Sample> samples;
  std::string note;
};

/// dist(gamma, beta) = max(torus distance of base points, max_i d_G(E_i, E'_i)).
double splitting_distance(const System& sys, const SplittingSample& a, const SplittingSample& b);

/// Coverage of `samples` by the cycle splittings; pass iff coverage > 1 - eta.
/// `estimation_failures` is carried into the report.
CoverageReport verify_splitting_approx(const System& sys, const std::vector<SplittingSample>& samples,
                                       const std::vector<SplittingSample>& cycle, double eta,
                                       int estimation_failures = 0, int threads = 1);

/// Max over the real and imaginary parts of e^{2 pi i k.x}, 0 < |k|_inf <= 2,
/// of |orbit average - cycle average|.
double weak_star_discrepancy(const std::vector<Point>& orbit, const std::vector<Point>& cycle);

struct VerifyConfig {
  int orbit_horizon = 10000;      // reference orbit for sampling and the weak* proxy
  int splitting_horizon = 60;     // sweep padding on each side of a splitting
  int stats_horizon = 10000;      // Birkhoff averages
  double epsilon = 1e-6;
  double eta = 1e-6;
  int samples = 200;              // candidate points for (iii) before the Pesin filter
  double block_gap = kDefaultBlockGap;
  PesinParams pesin;
  SearchConfig search;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Start point drawn from the seed: uniform on the torus for toral systems,
/// a transient-discarded orbit point near the origin otherwise.
Point seeded_start(const System& sys, std::uint64_t seed);

struct ApproximationReport {
  SystemSpec system;
  VerifyConfig config;
  std::optional<MeasureStats> reference;
  std::optional<PeriodicOrbit> orbit;
  std::optional<MeasureStats> orbit_stats;
  int orbits_found = 0;
  GapReport exponents;       // exponent check
  GapReport mean_distance;   // conclusion (i)
  GapReport independence;    // conclusion (ii)
  CoverageReport splitting;  // conclusion (iii)
  std::optional<double> weak_star;
  std::vector<std::string> errors;  // stage failures, in pipeline order

  /// fail if any check failed, else not-found if any was not found, else pass.
  Verdict overall() const;
};

/// Reference stats, periodic search, best-orbit selection (structural match,
/// then exponent gap) and every check. Stage failures are recorded in the
/// report instead of propagating.
ApproximationReport run_full_verification(const System& sys, const VerifyConfig& config);

}  // namespace oslab
