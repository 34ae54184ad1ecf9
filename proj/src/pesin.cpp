#include "oslab/pesin.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oslab {

namespace {

constexpr int kMaxBlockIndex = 64;

double spectral_norm(const Matrix& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

struct BaseMargins {
  std::vector<PesinMargins> by_m;  // cocycle-only slack
  std::vector<PesinReport::Entry> audit;
};

// Slack of each condition before the e^{eps k} and e^{eps |m|} allowances.
BaseMargins base_margins(const System& sys, const Point& x, const Subspace& stable, const Subspace& unstable,
                         const PesinParams& params, const PesinOptions& opts) {
  const int d = sys.dim();
  if (stable.ambient_dim() != d || unstable.ambient_dim() != d || stable.dim() + unstable.dim() != d) {
    throw InputError("pesin_check: stable and unstable subspaces must split R^d");
  }
  const std::vector<Subspace> pair{stable, unstable};
  direct_sum(pair);

  const int M = params.m_range;
  const int N = params.n_range;
  const int reach = M + N + opts.sweep_padding;
  const OrbitWindow window = generate_window(sys, x, reach, reach);
  const TangentSweeps sweeps = compute_sweeps(window);
  const std::vector<Subspace> es = transport_subspace(window, sweeps, stable, opts.snap_tol).spaces;
  const std::vector<Subspace> eu = transport_subspace(window, sweeps, unstable, opts.snap_tol).spaces;
  std::vector<Matrix> inv;
  inv.reserve(window.jacobians.size());
  for (const auto& j : window.jacobians) inv.push_back(j.partialPivLu().inverse());

  const double eps = params.epsilon;
  BaseMargins out;
  for (int m = -M; m <= M; ++m) {
    const int at = window.origin + m;
    PesinMargins pm;
    pm.m = m;
    pm.a = std::numeric_limits<double>::infinity();
    pm.b = std::numeric_limits<double>::infinity();

    Matrix fwd = Matrix::Identity(stable.dim(), stable.dim());
    Matrix bwd = Matrix::Identity(unstable.dim(), unstable.dim());
    double fwd_log = 0.0;
    double bwd_log = 0.0;
    for (int n = 1; n <= N; ++n) {
      const auto j = static_cast<std::size_t>(at + n - 1);
      fwd = es[j + 1].basis().transpose() * window.jacobians[j] * es[j].basis() * fwd;
      const double sf = spectral_norm(fwd);
      fwd_log += std::log(sf);
      fwd /= sf;

      const auto i = static_cast<std::size_t>(at - n + 1);
      bwd = eu[i - 1].basis().transpose() * inv[i - 1] * eu[i].basis() * bwd;
      const double sb = spectral_norm(bwd);
      bwd_log += std::log(sb);
      bwd /= sb;

      const double slack_a = -(params.beta - eps) * n - fwd_log;
      const double slack_b = -(params.alpha - eps) * n - bwd_log;
      pm.a = std::min(pm.a, slack_a);
      pm.b = std::min(pm.b, slack_b);
      if (opts.audit) out.audit.push_back({m, n, slack_a, slack_b});
    }
    const auto ai = static_cast<std::size_t>(at);
    pm.c = std::log(std::tan(min_angle(es[ai], eu[ai])));
    if (std::isnan(pm.a) || std::isnan(pm.b) || std::isnan(pm.c)) {
      throw NumericError("pesin_check: non-finite margin at m = " + std::to_string(m));
    }
    out.by_m.push_back(pm);
  }
  return out;
}

struct Worst {
  double a, b, c;
};

Worst worst_at(const BaseMargins& base, double eps, int k) {
  Worst w{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  for (const auto& pm : base.by_m) {
    const double allowance = eps * k + eps * std::abs(pm.m);
    w.a = std::min(w.a, pm.a + allowance);
    w.b = std::min(w.b, pm.b + allowance);
    w.c = std::min(w.c, pm.c + allowance);
  }
  return w;
}

}  // namespace

void PesinParams::validate() const {
  if (!(epsilon > 0.0)) throw InputError("pesin: epsilon must be > 0");
  if (!(alpha > epsilon) || !(beta > epsilon)) throw InputError("pesin: alpha and beta must exceed epsilon");
  if (alpha < 10.0 * epsilon || beta < 10.0 * epsilon) {
    throw InputError("pesin: alpha and beta must be at least 10 * epsilon");
  }
  if (k < 1) throw InputError("pesin: k must be >= 1");
  if (m_range < 0) throw InputError("pesin: m_range must be >= 0");
  if (n_range < 1) throw InputError("pesin: n_range must be >= 1");
}

PesinReport pesin_check(const System& sys, const Point& x, const Subspace& stable, const Subspace& unstable,
                        const PesinParams& params, const PesinOptions& opts) {
  params.validate();
  BaseMargins base = base_margins(sys, x, stable, unstable, params, opts);
  const Worst w = worst_at(base, params.epsilon, params.k);
  PesinReport report;
  report.params = params;
  report.a_margin = w.a;
  report.b_margin = w.b;
  report.c_margin = w.c;
  report.pass = w.a >= 0.0 && w.b >= 0.0 && w.c >= 0.0;
  report.cocycle_margins = std::move(base.by_m);
  report.audit = std::move(base.audit);
  for (auto& e : report.audit) {
    const double allowance = params.epsilon * params.k + params.epsilon * std::abs(e.m);
    e.a += allowance;
    e.b += allowance;
  }
  return report;
}

std::optional<int> smallest_k(const System& sys, const Point& x, const Subspace& stable, const Subspace& unstable,
                              double alpha, double beta, double epsilon, int m_range, int n_range,
                              const PesinOptions& opts) {
  PesinParams params{alpha, beta, epsilon, 1, m_range, n_range};
  params.validate();
  const BaseMargins base = base_margins(sys, x, stable, unstable, params, opts);
  for (int k = 1; k <= kMaxBlockIndex; ++k) {
    const Worst w = worst_at(base, epsilon, k);
    if (w.a >= 0.0 && w.b >= 0.0 && w.c >= 0.0) return k;
  }
  return std::nullopt;
}

}  // namespace oslab
