#include "oslab/harness.hpp"

#include "oslab/parallel.hpp"
#include "oslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oslab {

namespace {

constexpr std::uint64_t kStartStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr int kNonToralTransient = 1000;

GapReport structural_mismatch(std::string note) {
  GapReport r;
  r.verdict = Verdict::not_found;
  r.gap = std::numeric_limits<double>::quiet_NaN();
  r.note = std::move(note);
  return r;
}

std::optional<std::string> mismatch(const MeasureStats& a, const MeasureStats& b) {
  if (a.exponents.values.size() != b.exponents.values.size()) return "structural mismatch: dimensions differ";
  if (a.block_dims != b.block_dims) return "structural mismatch: block dimensions differ";
  return std::nullopt;
}

GapReport judge(GapReport r, double epsilon) {
  r.verdict = r.gap < epsilon ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_found:
      return "not-found";
  }
  return "not-found";
}

std::pair<Subspace, Subspace> stable_unstable(const SplittingSample& g, double gap) {
  std::vector<Subspace> s, u;
  for (int i = 0; i < g.block_count(); ++i) {
    const double lambda = g.exponent_estimates[static_cast<std::size_t>(i)];
    if (std::abs(lambda) < gap) throw DomainError("pesin filter: block with zero exponent");
    (lambda < 0.0 ? s : u).push_back(g.spaces[static_cast<std::size_t>(i)]);
  }
  if (s.empty() || u.empty()) throw DomainError("pesin filter: splitting is not of saddle type");
  return {direct_sum(s), direct_sum(u)};
}

GapReport verify_exponents(const MeasureStats& reference, const MeasureStats& other, double epsilon) {
  if (auto why = mismatch(reference, other)) return structural_mismatch(*why);
  GapReport r;
  r.gaps = (reference.exponents.values - other.exponents.values).cwiseAbs();
  r.gap = r.gaps.size() == 0 ? 0.0 : r.gaps.maxCoeff();
  return judge(std::move(r), epsilon);
}

GapReport verify_exponents(const MeasureStats& reference, const PeriodicOrbit& po, double epsilon) {
  MeasureStats other;
  other.exponents.values = po.exponents;
  other.block_dims = po.block_dims;
  return verify_exponents(reference, other, epsilon);
}

GapReport verify_mean_distance(const MeasureStats& reference, const MeasureStats& other, double epsilon) {
  if (auto why = mismatch(reference, other)) return structural_mismatch(*why);
  GapReport r;
  r.gaps = (reference.mean_distance - other.mean_distance).cwiseAbs();
  r.gap = r.gaps.size() == 0 ? 0.0 : r.gaps.maxCoeff();
  return judge(std::move(r), epsilon);
}

GapReport verify_independence(const MeasureStats& reference, const MeasureStats& other, double epsilon) {
  if (auto why = mismatch(reference, other)) return structural_mismatch(*why);
  GapReport r;
  r.gap = std::abs(reference.independence - other.independence);
  r.gaps = Matrix::Constant(1, 1, r.gap);
  return judge(std::move(r), epsilon);
}

double splitting_distance(const System& sys, const SplittingSample& a, const SplittingSample& b) {
  if (a.dims != b.dims) throw InputError("splitting_distance: block dimensions differ");
  double d = sys.is_toral() ? torus_distance(a.base, b.base) : (a.base - b.base).norm();
  for (std::size_t i = 0; i < a.spaces.size(); ++i) d = std::max(d, grassmann_distance(a.spaces[i], b.spaces[i]));
  return d;
}

CoverageReport verify_splitting_approx(const System& sys, const std::vector<SplittingSample>& samples,
                                       const std::vector<SplittingSample>& cycle, double eta,
                                       int estimation_failures, int threads) {
  if (!(eta > 0.0)) throw InputError("verify_splitting_approx: eta must be > 0");
  CoverageReport r;
  r.eta = eta;
  r.estimation_failures = estimation_failures;
  if (cycle.empty()) {
    r.note = "no cycle splittings";
    return r;
  }
  if (samples.empty()) {
    r.note = "no admissible sample points";
    return r;
  }
  if (samples.front().dims != cycle.front().dims) {
    r.note = "structural mismatch: block dimensions differ";
    return r;
  }
  r.samples.resize(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    CoverageReport::Sample s;
    s.point = samples[i].base;
    s.distance = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < cycle.size(); ++z) {
      const double d = splitting_distance(sys, samples[i], cycle[z]);
      if (d < s.distance) {
        s.distance = d;
        s.nearest = static_cast<int>(z);
      }
    }
    r.samples[i] = std::move(s);
  });
  r.evaluated = static_cast<int>(samples.size());
  r.covered = static_cast<int>(
      std::count_if(r.samples.begin(), r.samples.end(), [&](const auto& s) { return s.distance < eta; }));
  r.coverage = static_cast<double>(r.covered) / r.evaluated;
  r.verdict = r.coverage > 1.0 - eta ? Verdict::pass : Verdict::fail;
  return r;
}

double weak_star_discrepancy(const std::vector<Point>& orbit, const std::vector<Point>& cycle) {
  if (orbit.empty() || cycle.empty()) throw InputError("weak_star_discrepancy: empty point set");
  const int d = static_cast<int>(orbit.front().size());
  // Frequencies k with |k|_inf <= 2, one of each +-k pair (both parts are
  // even or odd in k, so the pair gives the same discrepancy).
  std::vector<Vector> freqs;
  std::vector<int> k(static_cast<std::size_t>(d), -2);
  for (;;) {
    int lead = 0;
    for (int v : k) {
      if (v != 0) {
        lead = v;
        break;
      }
    }
    if (lead > 0) {
      Vector f(d);
      for (int i = 0; i < d; ++i) f(i) = k[static_cast<std::size_t>(i)];
      freqs.push_back(std::move(f));
    }
    int pos = 0;
    while (pos < d && k[static_cast<std::size_t>(pos)] == 2) k[static_cast<std::size_t>(pos++)] = -2;
    if (pos == d) break;
    ++k[static_cast<std::size_t>(pos)];
  }
  auto means = [&](const std::vector<Point>& pts, const Vector& f) {
    double c = 0.0, s = 0.0;
    for (const auto& x : pts) {
      const double t = 2.0 * std::numbers::pi * f.dot(x);
      c += std::cos(t);
      s += std::sin(t);
    }
    const double n = static_cast<double>(pts.size());
    return std::pair{c / n, s / n};
  };
  double worst = 0.0;
  for (const auto& f : freqs) {
    const auto [oc, os] = means(orbit, f);
    const auto [cc, cs] = means(cycle, f);
    worst = std::max({worst, std::abs(oc - cc), std::abs(os - cs)});
  }
  return worst;
}

void VerifyConfig::validate() const {
  if (orbit_horizon < 1 || splitting_horizon < 1 || stats_horizon < 1) {
    throw InputError("verify: horizons must be >= 1");
  }
  if (stats_horizon < 100) throw InputError("verify: stats horizon must be >= 100");
  if (!(epsilon > 0.0)) throw InputError("verify: epsilon must be > 0");
  if (!(eta > 0.0)) throw InputError("verify: eta must be > 0");
  if (samples < 1) throw InputError("verify: samples must be >= 1");
  if (!(block_gap > 0.0)) throw InputError("verify: block_gap must be > 0");
  if (threads < 1) throw InputError("verify: threads must be >= 1");
  pesin.validate();
  search.validate();
}

Point seeded_start(const System& sys, std::uint64_t seed) {
  CounterRng rng(seed, kStartStream);
  if (sys.is_toral()) return sys.reduce(rng.next_uniform_vector(sys.dim()));
  Point x = rng.next_uniform_vector(sys.dim(), -0.1, 0.1);
  for (int i = 0; i < kNonToralTransient; ++i) x = sys.apply(x);
  return x;
}

Verdict ApproximationReport::overall() const {
  const Verdict all[] = {exponents.verdict, mean_distance.verdict, independence.verdict, splitting.verdict};
  if (std::find(std::begin(all), std::end(all), Verdict::fail) != std::end(all)) return Verdict::fail;
  if (std::find(std::begin(all), std::end(all), Verdict::not_found) != std::end(all)) return Verdict::not_found;
  return Verdict::pass;
}

ApproximationReport run_full_verification(const System& sys, const VerifyConfig& config) {
  ApproximationReport report;
  report.system = sys.spec();
  report.config = config;
  auto stage = [&](const char* name, const std::function<void()>& body) {
    try {
      body();
      return true;
    } catch (const std::exception& e) {
      report.errors.push_back(std::string(name) + ": " + e.what());
      return false;
    }
  };

  if (!stage("config", [&] { config.validate(); })) return report;
  Point x0;
  if (!stage("start", [&] { x0 = seeded_start(sys, config.seed); })) return report;

  const StatsOptions so{config.block_gap, false, config.threads};
  if (!stage("reference", [&] {
        report.reference = measure_stats(sys, x0, config.stats_horizon, config.splitting_horizon, so);
      })) {
    return report;
  }
  const MeasureStats& ref = *report.reference;

  std::vector<PeriodicOrbit> found;
  stage("search", [&] { found = find_periodic_orbits(sys, x0, config.search, config.threads); });
  report.orbits_found = static_cast<int>(found.size());

  // Best orbit: structural match first, then the smallest exponent gap.
  const PeriodicOrbit* best = nullptr;
  GapReport best_gap;
  bool best_matches = false;
  for (const auto& po : found) {
    GapReport g = verify_exponents(ref, po, config.epsilon);
    const bool matches = g.verdict != Verdict::not_found;
    if (best == nullptr || (matches && !best_matches) || (matches == best_matches && matches && g.gap < best_gap.gap)) {
      best = &po;
      best_gap = std::move(g);
      best_matches = matches;
    }
  }
  if (best == nullptr) {
    const std::string why = "no hyperbolic periodic orbit found within max_period";
    report.exponents = structural_mismatch(why);
    report.mean_distance = structural_mismatch(why);
    report.independence = structural_mismatch(why);
    report.splitting.note = why;
    report.splitting.eta = config.eta;
    return report;
  }
  report.orbit = *best;
  report.exponents = std::move(best_gap);

  if (stage("orbit stats", [&] { report.orbit_stats = orbit_stats(sys, *best); })) {
    report.mean_distance = verify_mean_distance(ref, *report.orbit_stats, config.epsilon);
    report.independence = verify_independence(ref, *report.orbit_stats, config.epsilon);
  } else {
    report.mean_distance = structural_mismatch("orbit statistics unavailable");
    report.independence = structural_mismatch("orbit statistics unavailable");
  }

  OrbitSegment orbit;
  stage("reference orbit", [&] { orbit = generate_orbit(sys, x0, config.orbit_horizon); });
  if (!orbit.points.empty()) {
    stage("weak*", [&] { report.weak_star = weak_star_discrepancy(orbit.points, best->points); });
  }

  report.splitting.eta = config.eta;
  stage("splitting coverage", [&] {
    if (orbit.points.empty()) throw NumericError("reference orbit unavailable");
    const int n = config.orbit_horizon;
    CounterRng rng(config.seed, kSampleStream);
    std::vector<int> picks;
    for (int i = 0; i < config.samples; ++i) picks.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))));
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());

    const int h = config.splitting_horizon;
    const OrbitWindow window = generate_window(sys, x0, h, n - 1 + h);
    const TangentSweeps sweeps = compute_sweeps(window);
    const std::vector<double> be = block_exponents(ref.exponents.values, ref.block_dims);

    enum class Outcome { kept, estimation_failed, pesin_rejected };
    std::vector<Outcome> outcome(picks.size(), Outcome::estimation_failed);
    std::vector<std::optional<SplittingSample>> estimated(picks.size());
    parallel_for(picks.size(), config.threads, [&](std::size_t i) {
      const int at = h + picks[i];
      SplittingSample g;
      try {
        g = splitting_from_sweeps(sweeps, at, window.points[static_cast<std::size_t>(at)], ref.block_dims, be);
        g.validate();
      } catch (const Error&) {
        outcome[i] = Outcome::estimation_failed;
        return;
      }
      try {
        const auto [s, u] = stable_unstable(g, config.block_gap);
        if (!pesin_check(sys, g.base, s, u, config.pesin).pass) {
          outcome[i] = Outcome::pesin_rejected;
          return;
        }
      } catch (const Error&) {
        outcome[i] = Outcome::pesin_rejected;
        return;
      }
      outcome[i] = Outcome::kept;
      estimated[i] = std::move(g);
    });

    std::vector<SplittingSample> kept;
    int failures = 0, rejected = 0;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (outcome[i] == Outcome::kept) kept.push_back(std::move(*estimated[i]));
      if (outcome[i] == Outcome::estimation_failed) ++failures;
      if (outcome[i] == Outcome::pesin_rejected) ++rejected;
    }
    const std::vector<SplittingSample> cycle = cycle_splittings(sys, *best);
    report.splitting = verify_splitting_approx(sys, kept, cycle, config.eta, failures, config.threads);
    report.splitting.pesin_rejected = rejected;
  });
  return report;
}

}  // namespace oslab
