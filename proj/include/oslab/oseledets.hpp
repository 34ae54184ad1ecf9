#pragma once

// Finite-horizon Oseledets estimation: Lyapunov spectra by the discrete QR
// method, splittings from forward and backward tangent sweeps, and the
// Birkhoff averages of angle, projector distance and independence number.

#include "oslab/cocycle.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace oslab {

/// Exponents whose sorted gaps are below this are merged into one block.
inline constexpr double kDefaultBlockGap = 1e-2;

struct ExponentEstimate {
  Vector values;  // sorted increasing
  int horizon = 0;
  int renorm_period = 1;
  double residual = 0.0;  // max drift of the running averages over the last 10%
};

struct MeasureStats {
  Matrix mean_distance;  // s x s, zero diagonal
  Matrix mean_angle;     // s x s, zero diagonal
  double independence = 0.0;
  ExponentEstimate exponents;
  std::vector<int> block_dims;
  int horizon = 0;
};

/// Discrete QR method. The frame is first relaxed for `warmup` steps that do
/// not enter the averages. The last diagonal entry of every R factor is
/// taken from log|det| of the block product, so sum(values) is exact.
ExponentEstimate lyapunov_qr(const System& sys, const Point& x0, int n, int renorm_period = 1,
                             int warmup = 100);

/// Splits sorted-increasing exponents into blocks at gaps >= `gap`.
std::vector<int> infer_block_dims(const Vector& sorted_exponents, double gap = kDefaultBlockGap);

/// Averages of sorted exponents over each block.
std::vector<double> block_exponents(const Vector& sorted_exponents, const std::vector<int>& dims);

/// Orthonormal frames carried along a window in both time directions.
///
/// fast[i]: frame pushed forward from the window start; its leading m
///          columns approximate the m fastest directions at point i.
/// slow[i]: frame pulled back from the window end; its leading m columns
///          approximate the m slowest directions at point i.
/// Frames near the end they start from have not relaxed yet.
struct TangentSweeps {
  std::vector<Matrix> fast;
  std::vector<Matrix> slow;
  Vector fast_log_growth;  // per-column sums of log|R_ii| over the whole fast sweep
  Vector slow_log_growth;  // same for the backward sweep
  int steps = 0;

  Subspace fast_space(int index, int dim) const;
  Subspace slow_space(int index, int dim) const;
};

TangentSweeps compute_sweeps(const OrbitWindow& window);

/// E_1 = F_1, E_i = F_i n H_{i-1}, E_s = H_{s-1} from the sweeps at `index`.
SplittingSample splitting_from_sweeps(const TangentSweeps& sweeps, int index, const Point& base,
                                      const std::vector<int>& dims, const std::vector<double>& exponents);

struct SplittingOptions {
  std::optional<std::vector<int>> dims;  // inferred from the sweeps when absent
  double gap = kDefaultBlockGap;
};

/// Oseledets splitting at x from n forward and n backward iterates. Throws
/// EstimationError when the forward and backward sweeps disagree on the
/// block structure.
SplittingSample estimate_splitting(const System& sys, const Point& x, int n, const SplittingOptions& opts = {});

/// Mean of the observable over steps 0 .. horizon-1.
double birkhoff_average(const OrbitSegment& orbit,
                        const std::function<double(const Point&, const Matrix&)>& observable);

/// Splittings at every point of an orbit, computed with one pair of sweeps.
struct OrbitSplittings {
  std::vector<Point> points;
  std::vector<SplittingSample> splittings;
  std::vector<int> dims;
};

OrbitSplittings splittings_along_orbit(const System& sys, const Point& x0, int n, int splitting_horizon,
                                       const std::vector<int>& dims, const std::vector<double>& exponents);

/// Uniform averages of d_G, min angle and the independence number over the
/// given splittings (from `first` on).
struct SplittingAverages {
  Matrix mean_distance;
  Matrix mean_angle;
  double independence = 0.0;
};
SplittingAverages average_splittings(const std::vector<SplittingSample>& splittings, std::size_t first = 0,
                                     int threads = 1);

struct StatsOptions {
  double gap = kDefaultBlockGap;
  bool discard_transient = false;  // drop the first 10% of the orbit
  int threads = 1;
};

MeasureStats measure_stats(const System& sys, const Point& x0, int n, int splitting_horizon,
                           const StatsOptions& opts = {});

/// Transport of a subspace given at `window.origin` to every point of the
/// window. A subspace that coincides (d_G < snap_tol) with the slowest or
/// fastest subspace of its dimension is carried as that invariant family;
/// anything else is pushed forward and pulled back directly. Forward pushes
/// of slow subspaces are unstable in floating point, hence the snapping.
struct Transport {
  std::vector<Subspace> spaces;
  enum class Mode { raw, slow_family, fast_family } mode = Mode::raw;
};
Transport transport_subspace(const OrbitWindow& window, const TangentSweeps& sweeps, const Subspace& E,
                             double snap_tol = 1e-8);

struct GrowthRates {
  std::vector<double> filtration;    // (1/n) sum phi(i, .)
  std::vector<double> cofiltration;  // (1/n) sum psi(i, .)
  std::vector<Transport::Mode> filtration_modes;
  std::vector<Transport::Mode> cofiltration_modes;
  int horizon = 0;
};

GrowthRates filtration_growth_check(const System& sys, const Point& x0, int n, const FlagSample& w,
                                    int sweep_padding = 60);

}  // namespace oslab
