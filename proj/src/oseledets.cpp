#include "oslab/oseledets.hpp"

#include "oslab/parallel.hpp"
#include "oslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oslab {

namespace {

// A fixed generic orthonormal frame. Sweeps start from it so results are
// reproducible and no start direction is aligned with a coordinate axis.
Matrix generic_frame(int d) {
  CounterRng rng(0x6f73656c65646574ULL, static_cast<std::uint64_t>(d));
  Eigen::HouseholderQR<Matrix> qr(rng.next_normal_matrix(d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

// QR step: returns Q and adds log|R_ii| into growth.
Matrix qr_step(const Matrix& y, Vector& growth) {
  Eigen::HouseholderQR<Matrix> qr(y);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < y.cols(); ++i) growth(i) += std::log(std::abs(r(i, i)));
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

double log_abs_det(const Matrix& m) { return std::log(std::abs(m.determinant())); }

}  // namespace

ExponentEstimate lyapunov_qr(const System& sys, const Point& x0, int n, int renorm_period, int warmup) {
  if (n < 100) throw InputError("lyapunov_qr: horizon must be >= 100");
  if (renorm_period < 1) throw InputError("lyapunov_qr: renorm_period must be >= 1");
  if (warmup < 0) throw InputError("lyapunov_qr: warmup must be >= 0");
  if (x0.size() != sys.dim()) throw InputError("lyapunov_qr: point dimension mismatch");
  const int d = sys.dim();
  Point x = sys.reduce(x0);
  Matrix q = generic_frame(d);
  Vector scratch = Vector::Zero(d);

  auto advance = [&](int step) {
    const Matrix j = sys.jacobian(x);
    x = sys.apply(x);
    if (!sys.is_toral() && (!x.allFinite() || x.norm() > kDivergenceRadius)) {
      throw NumericError("lyapunov_qr: orbit diverged at step " + std::to_string(step));
    }
    return j;
  };

  for (int i = 0; i < warmup; ++i) {
    q = qr_step(advance(i - warmup) * q, scratch);
  }

  Vector sums = Vector::Zero(d);
  std::vector<std::pair<int, Vector>> checkpoints;
  int done = 0;
  while (done < n) {
    const int len = std::min(renorm_period, n - done);
    Matrix block = Matrix::Identity(d, d);
    double log_det = 0.0;
    for (int i = 0; i < len; ++i) {
      const Matrix j = advance(done + i);
      const double ld = log_abs_det(j);
      if (!std::isfinite(ld)) throw NumericError("lyapunov_qr: singular Jacobian along the orbit");
      log_det += ld;
      block = j * block;
    }
    Vector growth = Vector::Zero(d);
    q = qr_step(block * q, growth);
    // The trailing diagonal entry loses all accuracy once the block product
    // is ill-conditioned; volume fixes it exactly.
    growth(d - 1) = log_det - growth.head(d - 1).sum();
    if (!growth.allFinite()) throw NumericError("lyapunov_qr: degenerate frame");
    sums += growth;
    done += len;
    checkpoints.emplace_back(done, sums / done);
  }

  ExponentEstimate out;
  out.values = sums / n;
  std::sort(out.values.begin(), out.values.end());
  out.horizon = n;
  out.renorm_period = renorm_period;
  const int tail_start = n - n / 10;
  const Vector unsorted_final = sums / n;
  for (const auto& [step, avg] : checkpoints) {
    if (step < tail_start) continue;
    out.residual = std::max(out.residual, (avg - unsorted_final).cwiseAbs().maxCoeff());
  }
  return out;
}

std::vector<int> infer_block_dims(const Vector& sorted_exponents, double gap) {
  std::vector<int> dims;
  if (sorted_exponents.size() == 0) return dims;
  int run = 1;
  for (Eigen::Index i = 1; i < sorted_exponents.size(); ++i) {
    if (sorted_exponents(i) - sorted_exponents(i - 1) >= gap) {
      dims.push_back(run);
      run = 1;
    } else {
      ++run;
    }
  }
  dims.push_back(run);
  return dims;
}

std::vector<double> block_exponents(const Vector& sorted_exponents, const std::vector<int>& dims) {
  std::vector<double> out;
  Eigen::Index at = 0;
  for (int n : dims) {
    out.push_back(sorted_exponents.segment(at, n).mean());
    at += n;
  }
  return out;
}

Subspace TangentSweeps::fast_space(int index, int dim) const {
  return Subspace::from_orthonormal(fast[static_cast<std::size_t>(index)].leftCols(dim));
}

Subspace TangentSweeps::slow_space(int index, int dim) const {
  return Subspace::from_orthonormal(slow[static_cast<std::size_t>(index)].leftCols(dim));
}

TangentSweeps compute_sweeps(const OrbitWindow& window) {
  const int size = window.size();
  if (size < 1) throw InputError("compute_sweeps: empty window");
  const int d = static_cast<int>(window.points.front().size());
  TangentSweeps s;
  s.steps = size - 1;
  s.fast.resize(static_cast<std::size_t>(size));
  s.slow.resize(static_cast<std::size_t>(size));
  s.fast_log_growth = Vector::Zero(d);
  s.slow_log_growth = Vector::Zero(d);
  s.fast.front() = generic_frame(d);
  for (int i = 0; i + 1 < size; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    s.fast[iu + 1] = qr_step(window.jacobians[iu] * s.fast[iu], s.fast_log_growth);
  }
  s.slow.back() = generic_frame(d);
  for (int i = size - 2; i >= 0; --i) {
    const auto iu = static_cast<std::size_t>(i);
    const Matrix inv = window.jacobians[iu].partialPivLu().inverse();
    s.slow[iu] = qr_step(inv * s.slow[iu + 1], s.slow_log_growth);
  }
  if (!s.fast_log_growth.allFinite() || !s.slow_log_growth.allFinite()) {
    throw NumericError("compute_sweeps: degenerate tangent frame");
  }
  return s;
}

SplittingSample splitting_from_sweeps(const TangentSweeps& sweeps, int index, const Point& base,
                                      const std::vector<int>& dims, const std::vector<double>& exponents) {
  const int d = static_cast<int>(sweeps.fast.front().rows());
  if (std::accumulate(dims.begin(), dims.end(), 0) != d) {
    throw InputError("splitting_from_sweeps: block dimensions do not sum to d");
  }
  const int s = static_cast<int>(dims.size());
  SplittingSample out;
  out.base = base;
  out.dims = dims;
  out.exponent_estimates = exponents;
  if (s == 1) {
    out.spaces.push_back(Subspace::full(d));
    out.validate();
    return out;
  }
  std::vector<int> level(static_cast<std::size_t>(s) - 1);
  std::partial_sum(dims.begin(), dims.end() - 1, level.begin());
  out.spaces.push_back(sweeps.slow_space(index, level.front()));
  for (int i = 1; i + 1 < s; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const Subspace f = sweeps.slow_space(index, level[iu]);
    const Subspace h = sweeps.fast_space(index, d - level[iu - 1]);
    out.spaces.push_back(approximate_intersection(f, h, dims[iu]));
  }
  out.spaces.push_back(sweeps.fast_space(index, d - level.back()));
  out.validate();
  return out;
}

SplittingSample estimate_splitting(const System& sys, const Point& x, int n, const SplittingOptions& opts) {
  if (n < 1) throw InputError("estimate_splitting: horizon must be >= 1");
  const OrbitWindow window = generate_window(sys, x, n, n);
  const TangentSweeps sweeps = compute_sweeps(window);
  const int d = sys.dim();
  // Fast-sweep growth is ordered fastest first; slow-sweep growth is the
  // negated spectrum ordered slowest first.
  Vector from_fast = (sweeps.fast_log_growth / sweeps.steps).reverse();
  Vector from_slow = -sweeps.slow_log_growth / sweeps.steps;
  std::sort(from_fast.begin(), from_fast.end());
  std::sort(from_slow.begin(), from_slow.end());
  const Vector estimate = 0.5 * (from_fast + from_slow);
  std::vector<int> dims;
  if (opts.dims) {
    dims = *opts.dims;
  } else {
    dims = infer_block_dims(from_fast, opts.gap);
    const std::vector<int> backward = infer_block_dims(from_slow, opts.gap);
    if (dims != backward) {
      throw EstimationError("estimate_splitting: forward and backward sweeps disagree on block structure");
    }
  }
  if (std::accumulate(dims.begin(), dims.end(), 0) != d) {
    throw InputError("estimate_splitting: block dimensions do not sum to d");
  }
  return splitting_from_sweeps(sweeps, window.origin, window.points[static_cast<std::size_t>(window.origin)],
                               dims, block_exponents(estimate, dims));
}

double birkhoff_average(const OrbitSegment& orbit,
                        const std::function<double(const Point&, const Matrix&)>& observable) {
  const int n = orbit.horizon();
  if (n < 1) throw InputError("birkhoff_average: horizon must be >= 1");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += observable(orbit.points[static_cast<std::size_t>(i)], orbit.jacobians[static_cast<std::size_t>(i)]);
  }
  return sum / n;
}

OrbitSplittings splittings_along_orbit(const System& sys, const Point& x0, int n, int splitting_horizon,
                                       const std::vector<int>& dims, const std::vector<double>& exponents) {
  if (n < 1 || splitting_horizon < 1) throw InputError("splittings_along_orbit: horizons must be >= 1");
  const int h = splitting_horizon;
  const OrbitWindow window = generate_window(sys, x0, h, n - 1 + h);
  const TangentSweeps sweeps = compute_sweeps(window);
  OrbitSplittings out;
  out.dims = dims;
  out.points.reserve(static_cast<std::size_t>(n));
  out.splittings.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Point& p = window.points[static_cast<std::size_t>(h + j)];
    out.points.push_back(p);
    try {
      out.splittings.push_back(splitting_from_sweeps(sweeps, h + j, p, dims, exponents));
    } catch (const Error& e) {
      throw EstimationError("splitting estimation failed at step " + std::to_string(j) + ": " + e.what());
    }
  }
  return out;
}

SplittingAverages average_splittings(const std::vector<SplittingSample>& splittings, std::size_t first,
                                     int threads) {
  if (first >= splittings.size()) throw InputError("average_splittings: nothing to average");
  const auto s = static_cast<Eigen::Index>(splittings[first].spaces.size());
  const std::size_t count = splittings.size() - first;
  std::vector<Matrix> dist(count), angle(count);
  std::vector<double> tau(count);
  parallel_for(count, threads, [&](std::size_t k) {
    const SplittingSample& g = splittings[first + k];
    if (static_cast<Eigen::Index>(g.spaces.size()) != s) throw InputError("average_splittings: block count varies");
    Matrix dm = Matrix::Zero(s, s), am = Matrix::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i + 1; j < s; ++j) {
        const double dg = grassmann_distance(g.spaces[i], g.spaces[j]);
        const double an = min_angle(g.spaces[i], g.spaces[j]);
        dm(i, j) = dm(j, i) = dg;
        am(i, j) = am(j, i) = an;
      }
    }
    dist[k] = std::move(dm);
    angle[k] = std::move(am);
    tau[k] = independence_number(g.spaces);
  });
  SplittingAverages out;
  out.mean_distance = Matrix::Zero(s, s);
  out.mean_angle = Matrix::Zero(s, s);
  for (std::size_t k = 0; k < count; ++k) {
    out.mean_distance += dist[k];
    out.mean_angle += angle[k];
    out.independence += tau[k];
  }
  const auto c = static_cast<double>(count);
  out.mean_distance /= c;
  out.mean_angle /= c;
  out.independence /= c;
  return out;
}

MeasureStats measure_stats(const System& sys, const Point& x0, int n, int splitting_horizon,
                           const StatsOptions& opts) {
  MeasureStats out;
  out.exponents = lyapunov_qr(sys, x0, n, 1);
  out.block_dims = infer_block_dims(out.exponents.values, opts.gap);
  out.horizon = n;
  const OrbitSplittings along = splittings_along_orbit(
      sys, x0, n, splitting_horizon, out.block_dims, block_exponents(out.exponents.values, out.block_dims));
  const std::size_t first = opts.discard_transient ? static_cast<std::size_t>(n / 10) : 0;
  SplittingAverages avg = average_splittings(along.splittings, first, opts.threads);
  out.mean_distance = std::move(avg.mean_distance);
  out.mean_angle = std::move(avg.mean_angle);
  out.independence = avg.independence;
  return out;
}

Transport transport_subspace(const OrbitWindow& window, const TangentSweeps& sweeps, const Subspace& E,
                             double snap_tol) {
  const int size = window.size();
  const int origin = window.origin;
  const int m = E.dim();
  const int d = E.ambient_dim();
  Transport out;
  if (m < d) {
    if (grassmann_distance(E, sweeps.slow_space(origin, m)) < snap_tol) {
      out.mode = Transport::Mode::slow_family;
    } else if (grassmann_distance(E, sweeps.fast_space(origin, m)) < snap_tol) {
      out.mode = Transport::Mode::fast_family;
    }
  }
  if (out.mode == Transport::Mode::slow_family) {
    for (int i = 0; i < size; ++i) out.spaces.push_back(sweeps.slow_space(i, m));
    return out;
  }
  if (out.mode == Transport::Mode::fast_family) {
    for (int i = 0; i < size; ++i) out.spaces.push_back(sweeps.fast_space(i, m));
    return out;
  }
  std::vector<std::optional<Subspace>> spaces(static_cast<std::size_t>(size));
  spaces[static_cast<std::size_t>(origin)] = E;
  for (int i = origin; i + 1 < size; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    spaces[iu + 1] = push_subspace(window.jacobians[iu], *spaces[iu]);
  }
  for (int i = origin; i > 0; --i) {
    const auto iu = static_cast<std::size_t>(i);
    spaces[iu - 1] = push_subspace(window.jacobians[iu - 1].partialPivLu().inverse(), *spaces[iu]);
  }
  out.spaces.reserve(spaces.size());
  for (auto& s : spaces) out.spaces.push_back(std::move(*s));
  return out;
}

GrowthRates filtration_growth_check(const System& sys, const Point& x0, int n, const FlagSample& w,
                                    int sweep_padding) {
  if (n < 1) throw InputError("filtration_growth_check: horizon must be >= 1");
  w.validate();
  if (w.base.size() == x0.size() && sys.distance(w.base, x0) > 1e-12) {
    throw InputError("filtration_growth_check: flag is not based at x0");
  }
  const OrbitWindow window = generate_window(sys, x0, sweep_padding, n + sweep_padding);
  const TangentSweeps sweeps = compute_sweeps(window);
  GrowthRates out;
  out.horizon = n;
  auto rate = [&](const Subspace& level, std::vector<Transport::Mode>& modes) {
    const Transport t = transport_subspace(window, sweeps, level);
    modes.push_back(t.mode);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(window.origin + j);
      const double v = log_det_restricted(window.jacobians[idx], t.spaces[idx]);
      if (!std::isfinite(v)) throw DegeneracyError("filtration_growth_check: degenerate restriction");
      sum += v;
    }
    return sum / n;
  };
  for (const auto& f : w.filtration) out.filtration.push_back(rate(f, out.filtration_modes));
  for (const auto& h : w.cofiltration) out.cofiltration.push_back(rate(h, out.cofiltration_modes));
  return out;
}

}  // namespace oslab
