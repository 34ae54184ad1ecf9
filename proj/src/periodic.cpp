#include "oslab/periodic.hpp"

#include "oslab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

namespace oslab {

namespace {

using Cycle = std::vector<Point>;

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double max_step_residual(const System& sys, const Cycle& pts) {
  const std::size_t p = pts.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    worst = std::max(worst, sys.distance(pts[(i + 1) % p], sys.apply(pts[i])));
  }
  return worst;
}

// Shortest q dividing p with pts[i + q] == pts[i] for all i.
Cycle reduce_to_minimal_period(const System& sys, Cycle pts, double tol) {
  const int p = static_cast<int>(pts.size());
  for (int q = 1; q < p; ++q) {
    if (p % q != 0) continue;
    bool repeats = true;
    for (int i = 0; i < p && repeats; ++i) {
      repeats = sys.distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>((i + q) % p)]) < tol;
    }
    if (repeats) {
      pts.resize(static_cast<std::size_t>(q));
      return pts;
    }
  }
  return pts;
}

Cycle refine_cycle(const System& sys, const Point& seed, int p, const SearchConfig& cfg) {
  if (p < 1) throw InputError("newton_refine: period must be >= 1");
  if (seed.size() != sys.dim()) throw InputError("newton_refine: seed dimension mismatch");
  const int d = sys.dim();
  const int size = p * d;
  Cycle x(static_cast<std::size_t>(p));
  x[0] = sys.reduce(seed);
  for (int i = 1; i < p; ++i) x[static_cast<std::size_t>(i)] = sys.apply(x[static_cast<std::size_t>(i - 1)]);

  auto residuals = [&](Vector& r) {
    double worst = 0.0;
    for (int i = 0; i < p; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const Vector ri = sys.displacement(x[(iu + 1) % static_cast<std::size_t>(p)], sys.apply(x[iu]));
      r.segment(i * d, d) = ri;
      worst = std::max(worst, ri.norm());
    }
    return worst;
  };

  Vector r(size);
  for (int iter = 0; iter <= cfg.newton_max_iters; ++iter) {
    const double worst = residuals(r);
    if (!std::isfinite(worst)) throw NumericError("newton_refine: non-finite residual");
    if (worst < cfg.newton_tol) {
      return reduce_to_minimal_period(sys, std::move(x), std::max(cfg.dedup_tol, 1e-9));
    }
    if (iter == cfg.newton_max_iters) break;
    // Block-cyclic Jacobian of (f(x_i) - x_{i+1}).
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(p * d * (d + 1)));
    for (int i = 0; i < p; ++i) {
      Matrix block = sys.jacobian(x[static_cast<std::size_t>(i)]);
      const int next = (i + 1) % p;
      if (next == i) block -= Matrix::Identity(d, d);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          if (block(a, b) != 0.0) triplets.emplace_back(i * d + a, i * d + b, block(a, b));
        }
        if (next != i) triplets.emplace_back(i * d + a, next * d + a, -1.0);
      }
    }
    Eigen::SparseMatrix<double> jac(size, size);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(jac);
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw NumericError("newton_refine: singular Newton step (non-hyperbolic candidate)");
    const Vector step = lu.solve(-r);
    if (lu.info() != Eigen::Success || !step.allFinite()) {
      throw NumericError("newton_refine: singular Newton step (non-hyperbolic candidate)");
    }
    for (int i = 0; i < p; ++i) {
      auto& xi = x[static_cast<std::size_t>(i)];
      xi = sys.reduce(xi + step.segment(i * d, d));
    }
  }
  throw NumericError("newton_refine: no convergence within " + std::to_string(cfg.newton_max_iters) + " iterations");
}

std::vector<Matrix> cycle_jacobians(const System& sys, const Cycle& pts) {
  std::vector<Matrix> js;
  js.reserve(pts.size());
  for (const auto& x : pts) js.push_back(sys.jacobian(x));
  return js;
}

PeriodicOrbit assemble(const System& sys, Cycle pts) {
  PeriodicOrbit po;
  po.period = static_cast<int>(pts.size());
  po.points = std::move(pts);
  const int d = sys.dim();
  const std::vector<Matrix> js = cycle_jacobians(sys, po.points);
  po.monodromy = Matrix::Identity(d, d);
  for (const auto& j : js) po.monodromy = j * po.monodromy;
  po.exponents = cycle_exponents(js);
  po.eigen_moduli = (po.exponents * po.period).array().exp();
  po.hyperbolic = po.exponents.cwiseAbs().minCoeff() > 1e-8;
  // Group equal moduli: relative tolerance 1e-6 on the modulus.
  po.block_dims = infer_block_dims(po.exponents, 1e-6 / po.period);
  po.residual = max_step_residual(sys, po.points);
  try {
    po.splitting = cycle_splittings(sys, po).front();
  } catch (const Error&) {
    // Without a spectral gap the splitting is undefined; such orbits are
    // reported as non-hyperbolic and carry no splitting.
    if (po.hyperbolic) throw;
  }
  return po;
}

int sweep_padding_for(const Vector& exponents, const std::vector<int>& dims) {
  const std::vector<double> be = block_exponents(exponents, dims);
  double gap = 1.0;
  for (std::size_t i = 1; i < be.size(); ++i) gap = std::min(gap, be[i] - be[i - 1]);
  return std::clamp(static_cast<int>(std::ceil(40.0 / std::max(gap, 1e-3))), 60, 4000);
}

}  // namespace

void SearchConfig::validate() const {
  if (max_period < 0) throw InputError("search: max_period must be >= 0");
  if (seed_orbit_length < 1) throw InputError("search: seed_orbit_length must be >= 1");
  if (!(return_radius > 0.0)) throw InputError("search: return_radius must be > 0");
  if (newton_max_iters < 1) throw InputError("search: newton_max_iters must be >= 1");
  if (!(newton_tol > 0.0)) throw InputError("search: newton_tol must be > 0");
  if (!(dedup_tol > 0.0)) throw InputError("search: dedup_tol must be > 0");
}

std::vector<CloseReturn> close_returns(const System& sys, const OrbitSegment& orbit, const SearchConfig& cfg) {
  cfg.validate();
  std::vector<CloseReturn> out;
  const int n = orbit.horizon();
  for (int p = 1; p <= cfg.max_period; ++p) {
    std::optional<CloseReturn> best;
    double best_dist = 0.0;
    for (int j = 0; j + p <= n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double dist = sys.distance(orbit.points[ju + static_cast<std::size_t>(p)], orbit.points[ju]);
      if (dist < cfg.return_radius) {
        if (!best || dist < best_dist) {
          best = CloseReturn{orbit.points[ju], p, j};
          best_dist = dist;
        }
      } else if (best) {
        out.push_back(*best);
        best.reset();
      }
    }
    if (best) out.push_back(*best);
  }
  return out;
}

Vector cycle_exponents(const std::vector<Matrix>& jacobians, int cycles) {
  if (jacobians.empty()) throw InputError("cycle_exponents: empty cycle");
  const int p = static_cast<int>(jacobians.size());
  const int d = static_cast<int>(jacobians.front().rows());
  const int warm = std::max(2, (600 + p - 1) / p);
  const int keep = cycles > 0 ? cycles : std::max(1, (2000 + p - 1) / p);
  Matrix q = Matrix::Identity(d, d);
  {
    // Generic start so no column sits in an invariant subspace.
    Matrix start(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) start(i, j) = std::cos(1.0 + 0.731 * i + 1.377 * j * (i + 1));
    Eigen::HouseholderQR<Matrix> qr(start);
    q = qr.householderQ() * Matrix::Identity(d, d);
  }
  Vector sums = Vector::Zero(d);
  for (int c = 0; c < warm + keep; ++c) {
    for (const auto& j : jacobians) {
      Eigen::HouseholderQR<Matrix> qr(j * q);
      const Matrix& r = qr.matrixQR();
      q = qr.householderQ() * Matrix::Identity(d, d);
      if (c < warm) continue;
      double head = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double g = std::log(std::abs(r(i, i)));
        sums(i) += g;
        head += g;
      }
      sums(d - 1) += std::log(std::abs(j.determinant())) - head;
    }
  }
  Vector out = sums / (static_cast<double>(keep) * p);
  if (!out.allFinite()) throw NumericError("cycle_exponents: degenerate cycle");
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SplittingSample> cycle_splittings(const System& sys, const PeriodicOrbit& po) {
  const int p = po.period;
  const int h = sweep_padding_for(po.exponents, po.block_dims);
  OrbitWindow window;
  window.origin = h;
  const int size = 2 * h + p;
  const int shift = ((-h % p) + p) % p;
  for (int i = 0; i < size; ++i) {
    const Point& x = po.points[static_cast<std::size_t>((i + shift) % p)];
    window.points.push_back(x);
    window.jacobians.push_back(sys.jacobian(x));
  }
  const TangentSweeps sweeps = compute_sweeps(window);
  const std::vector<double> be = block_exponents(po.exponents, po.block_dims);
  std::vector<SplittingSample> out;
  out.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    out.push_back(splitting_from_sweeps(sweeps, h + i, po.points[static_cast<std::size_t>(i)], po.block_dims, be));
  }
  return out;
}

PeriodicOrbit newton_refine(const System& sys, const Point& seed, int p, const SearchConfig& cfg) {
  cfg.validate();
  return assemble(sys, refine_cycle(sys, seed, p, cfg));
}

SplittingSample eigensplit(const Matrix& monodromy, int p) {
  if (p < 1) throw InputError("eigensplit: period must be >= 1");
  if (monodromy.rows() != monodromy.cols() || monodromy.rows() == 0) throw InputError("eigensplit: square matrix required");
  const auto d = monodromy.rows();
  if (!(std::abs(monodromy.determinant()) > 0.0)) throw InputError("eigensplit: monodromy is singular");
  Eigen::EigenSolver<Matrix> es(monodromy, false);
  std::vector<std::complex<double>> mu(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(mu.begin(), mu.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });

  std::vector<std::vector<std::complex<double>>> groups{{mu.front()}};
  for (std::size_t i = 1; i < mu.size(); ++i) {
    const double prev = std::abs(mu[i - 1]);
    const double cur = std::abs(mu[i]);
    const double rel = (cur - prev) / cur;
    if (rel <= 1e-6) {
      groups.back().push_back(mu[i]);
    } else if (rel <= 1e-4) {
      throw EstimationError("eigensplit: moduli " + std::to_string(prev) + " and " + std::to_string(cur) +
                            " are too close to group reliably");
    } else {
      groups.push_back({mu[i]});
    }
  }

  SplittingSample out;
  out.base = Point::Zero(d);
  const Matrix id = Matrix::Identity(d, d);
  for (const auto& g : groups) {
    // Real annihilating polynomial of the group; its kernel is the real
    // generalized eigenspace (conjugate pairs share a modulus).
    Matrix q = id;
    std::vector<bool> used(g.size(), false);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      if (std::abs(g[i].imag()) <= 1e-12 * std::abs(g[i])) {
        q = (monodromy - g[i].real() * id) * q;
        continue;
      }
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        if (!used[j] && std::abs(g[j] - std::conj(g[i])) <= 1e-8 * std::abs(g[i])) {
          used[j] = true;
          break;
        }
      }
      q = (monodromy * monodromy - 2.0 * g[i].real() * monodromy + std::norm(g[i]) * id) * q;
    }
    Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullV);
    const auto k = static_cast<Eigen::Index>(g.size());
    out.spaces.push_back(Subspace::span(svd.matrixV().rightCols(k), 0.0));
    out.dims.push_back(static_cast<int>(k));
    double mean_modulus = 0.0;
    for (const auto& m : g) mean_modulus += std::abs(m);
    out.exponent_estimates.push_back(std::log(mean_modulus / static_cast<double>(k)) / p);
  }
  out.validate();
  return out;
}

MeasureStats orbit_stats(const System& sys, const PeriodicOrbit& po) {
  if (!po.hyperbolic) throw InputError("orbit_stats: orbit is not hyperbolic");
  const std::vector<SplittingSample> splittings = cycle_splittings(sys, po);
  SplittingAverages avg = average_splittings(splittings);
  MeasureStats out;
  out.mean_distance = std::move(avg.mean_distance);
  out.mean_angle = std::move(avg.mean_angle);
  out.independence = avg.independence;
  out.exponents.values = po.exponents;
  out.exponents.horizon = po.period;
  out.block_dims = po.block_dims;
  out.horizon = po.period;
  return out;
}

PeriodicOrbit rotate_orbit(const System& sys, const PeriodicOrbit& po, int shift) {
  const int p = po.period;
  Cycle pts;
  pts.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) pts.push_back(po.points[static_cast<std::size_t>(((i + shift) % p + p) % p)]);
  return assemble(sys, std::move(pts));
}

namespace {

bool same_cycle(const System& sys, const Cycle& a, const Cycle& b, double tol) {
  if (a.size() != b.size()) return false;
  const std::size_t p = a.size();
  for (std::size_t s = 0; s < p; ++s) {
    bool match = true;
    for (std::size_t i = 0; i < p && match; ++i) match = sys.distance(a[i], b[(i + s) % p]) < tol;
    if (match) return true;
  }
  return false;
}

Cycle rotate_to_smallest(Cycle c) {
  const auto it = std::min_element(c.begin(), c.end(), lex_less);
  std::rotate(c.begin(), it, c.end());
  return c;
}

}  // namespace

bool same_orbit(const System& sys, const PeriodicOrbit& a, const PeriodicOrbit& b, double tol) {
  return same_cycle(sys, a.points, b.points, tol);
}

std::vector<PeriodicOrbit> find_periodic_orbits(const System& sys, const Point& x0, const SearchConfig& cfg,
                                                int threads) {
  cfg.validate();
  if (cfg.max_period == 0) return {};
  const OrbitSegment seed_orbit = generate_orbit(sys, x0, std::max(cfg.seed_orbit_length, cfg.max_period + 1));
  const std::vector<CloseReturn> seeds = close_returns(sys, seed_orbit, cfg);

  std::vector<std::optional<Cycle>> refined(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    try {
      refined[i] = rotate_to_smallest(refine_cycle(sys, seeds[i].point, seeds[i].period, cfg));
    } catch (const Error&) {
      // Seeds that do not converge are dropped.
    }
  });

  std::vector<Cycle> unique;
  for (auto& c : refined) {
    if (!c) continue;
    const bool seen = std::any_of(unique.begin(), unique.end(),
                                  [&](const Cycle& u) { return same_cycle(sys, u, *c, cfg.dedup_tol); });
    if (!seen) unique.push_back(std::move(*c));
  }
  std::sort(unique.begin(), unique.end(), [](const Cycle& a, const Cycle& b) {
    if (lex_less(a.front(), b.front())) return true;
    if (lex_less(b.front(), a.front())) return false;
    return a.size() < b.size();
  });

  std::vector<std::optional<PeriodicOrbit>> assembled(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) {
    try {
      assembled[i] = assemble(sys, unique[i]);
    } catch (const Error&) {
    }
  });
  std::vector<PeriodicOrbit> out;
  for (auto& po : assembled) {
    if (po && po->hyperbolic) out.push_back(std::move(*po));
  }
  return out;
}

}  // namespace oslab
