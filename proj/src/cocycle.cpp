#include "oslab/cocycle.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace oslab {

namespace {

void check_escape(const System& sys, const Point& x, int step) {
  if (sys.is_toral()) return;
  if (!x.allFinite() || x.norm() > kDivergenceRadius) {
    throw NumericError("orbit diverged at step " + std::to_string(step));
  }
}

// Largest component of E outside F; zero when E is contained in F.
double containment_defect(const Subspace& inner, const Subspace& outer) {
  const Matrix resid = inner.basis() - outer.basis() * (outer.basis().transpose() * inner.basis());
  return resid.cwiseAbs().maxCoeff();
}

}  // namespace

OrbitSegment generate_orbit(const System& sys, const Point& x0, int n) {
  if (n < 1) throw InputError("generate_orbit: horizon must be >= 1");
  if (x0.size() != sys.dim()) throw InputError("generate_orbit: point dimension mismatch");
  OrbitSegment orbit;
  orbit.points.reserve(static_cast<std::size_t>(n) + 1);
  orbit.jacobians.reserve(static_cast<std::size_t>(n));
  Point x = sys.reduce(x0);
  check_escape(sys, x, 0);
  orbit.points.push_back(x);
  for (int i = 0; i < n; ++i) {
    orbit.jacobians.push_back(sys.jacobian(x));
    x = sys.apply(x);
    check_escape(sys, x, i + 1);
    orbit.points.push_back(x);
  }
  return orbit;
}

OrbitWindow generate_window(const System& sys, const Point& x0, int back, int forward) {
  if (back < 0 || forward < 0) throw InputError("generate_window: negative extent");
  if (x0.size() != sys.dim()) throw InputError("generate_window: point dimension mismatch");
  OrbitWindow w;
  const auto total = static_cast<std::size_t>(back + forward + 1);
  w.points.resize(total);
  w.origin = back;
  Point x = sys.reduce(x0);
  w.points[static_cast<std::size_t>(back)] = x;
  for (int i = back - 1; i >= 0; --i) {
    x = sys.apply_inverse(x);
    check_escape(sys, x, i - back);
    w.points[static_cast<std::size_t>(i)] = x;
  }
  x = w.points[static_cast<std::size_t>(back)];
  for (int i = back + 1; i < static_cast<int>(total); ++i) {
    x = sys.apply(x);
    check_escape(sys, x, i - back);
    w.points[static_cast<std::size_t>(i)] = x;
  }
  w.jacobians.reserve(total);
  for (const auto& p : w.points) w.jacobians.push_back(sys.jacobian(p));
  return w;
}

double audit_orbit(const System& sys, const OrbitSegment& orbit) {
  if (orbit.points.size() != orbit.jacobians.size() + 1) {
    throw InputError("audit_orbit: need exactly one more point than Jacobians");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < orbit.jacobians.size(); ++i) {
    worst = std::max(worst, sys.distance(sys.apply(orbit.points[i]), orbit.points[i + 1]));
    worst = std::max(worst, (sys.jacobian(orbit.points[i]) - orbit.jacobians[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

Subspace push_subspace(const Matrix& J, const Subspace& E) {
  if (J.rows() != J.cols() || J.cols() != E.ambient_dim()) {
    throw InputError("push_subspace: dimension mismatch");
  }
  const Matrix image = J * E.basis();
  if (vol(image) < kFrameIndependenceTol) throw DegeneracyError("push_subspace: image frame collapsed");
  return Subspace::span(image, 0.0);
}

void SplittingSample::validate() const {
  if (spaces.empty()) throw InputError("splitting: no blocks");
  if (dims.size() != spaces.size()) throw InputError("splitting: dims and spaces disagree");
  const int d = ambient_dim();
  int total = 0;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    if (spaces[i].dim() != dims[i]) throw InputError("splitting: block dimension mismatch");
    total += dims[i];
  }
  if (total != d) throw InputError("splitting: block dimensions do not sum to the ambient dimension");
  if (base.size() != d) throw InputError("splitting: base point dimension mismatch");
  direct_sum(spaces);
  if (!exponent_estimates.empty()) {
    if (exponent_estimates.size() != spaces.size()) throw InputError("splitting: one exponent per block");
    for (std::size_t i = 1; i < exponent_estimates.size(); ++i) {
      if (!(exponent_estimates[i] - exponent_estimates[i - 1] > 1e-6)) {
        throw InputError("splitting: exponents must increase strictly");
      }
    }
  }
}

void FlagSample::validate() const {
  const int k = levels();
  if (k < 1) throw InputError("flag: no levels");
  if (cofiltration.size() != filtration.size() || level_dims.size() != filtration.size()) {
    throw InputError("flag: filtration, cofiltration and level dims disagree");
  }
  const int d = filtration.front().ambient_dim();
  for (int i = 0; i < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    if (level_dims[iu] < 1 || level_dims[iu] >= d) throw InputError("flag: level dimension out of range");
    if (i > 0 && level_dims[iu] <= level_dims[iu - 1]) throw InputError("flag: levels must increase");
    if (filtration[iu].dim() != level_dims[iu] || cofiltration[iu].dim() != d - level_dims[iu]) {
      throw InputError("flag: subspace dimensions do not match levels");
    }
    if (i > 0) {
      if (containment_defect(filtration[iu - 1], filtration[iu]) > 1e-10) {
        throw DomainError("flag: filtration is not nested");
      }
      if (containment_defect(cofiltration[iu], cofiltration[iu - 1]) > 1e-10) {
        throw DomainError("flag: cofiltration is not nested");
      }
    }
  }
}

SplittingSample push_splitting(const Matrix& J, const SplittingSample& gamma, const Point& y) {
  SplittingSample out;
  out.base = y;
  out.dims = gamma.dims;
  out.exponent_estimates = gamma.exponent_estimates;
  out.spaces.reserve(gamma.spaces.size());
  for (const auto& e : gamma.spaces) out.spaces.push_back(push_subspace(J, e));
  out.validate();
  return out;
}

FlagSample splitting_to_flag(const SplittingSample& gamma) {
  gamma.validate();
  const int s = gamma.block_count();
  FlagSample w;
  w.base = gamma.base;
  int level = 0;
  for (int i = 0; i + 1 < s; ++i) {
    level += gamma.dims[static_cast<std::size_t>(i)];
    w.level_dims.push_back(level);
    const std::span<const Subspace> all(gamma.spaces);
    w.filtration.push_back(direct_sum(all.subspan(0, static_cast<std::size_t>(i) + 1)));
    w.cofiltration.push_back(direct_sum(all.subspan(static_cast<std::size_t>(i) + 1)));
  }
  return w;
}

SplittingSample flag_to_splitting(const FlagSample& w, double tol) {
  w.validate();
  const int k = w.levels();
  const int d = w.filtration.front().ambient_dim();
  SplittingSample out;
  out.base = w.base;
  out.spaces.reserve(static_cast<std::size_t>(k) + 1);
  out.spaces.push_back(w.filtration.front());
  out.dims.push_back(w.level_dims.front());
  for (int i = 1; i < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const int n = w.level_dims[iu] - w.level_dims[iu - 1];
    double resid = 0.0;
    Subspace e = approximate_intersection(w.filtration[iu], w.cofiltration[iu - 1], n, &resid);
    if (resid > tol) {
      throw DomainError("flag_to_splitting: level " + std::to_string(i + 1) +
                        " intersection has the wrong dimension");
    }
    out.spaces.push_back(std::move(e));
    out.dims.push_back(n);
  }
  out.spaces.push_back(w.cofiltration.back());
  out.dims.push_back(d - w.level_dims.back());
  try {
    out.validate();
  } catch (const DegeneracyError&) {
    throw DomainError("flag_to_splitting: recovered blocks do not form a direct sum");
  }
  return out;
}

FlagSample push_flag(const Matrix& J, const FlagSample& w, const Point& y) {
  FlagSample out;
  out.base = y;
  out.level_dims = w.level_dims;
  for (const auto& f : w.filtration) out.filtration.push_back(push_subspace(J, f));
  for (const auto& h : w.cofiltration) out.cofiltration.push_back(push_subspace(J, h));
  return out;
}

namespace {

double level_log_det(int i, const Matrix& J, const std::vector<Subspace>& levels, const char* what) {
  if (i < 1 || i > static_cast<int>(levels.size())) {
    throw InputError(std::string(what) + ": level index out of range");
  }
  const double v = log_det_restricted(J, levels[static_cast<std::size_t>(i - 1)]);
  if (!std::isfinite(v)) throw DegeneracyError(std::string(what) + ": degenerate restriction");
  return v;
}

}  // namespace

double phi(int i, const Matrix& J, const FlagSample& w) { return level_log_det(i, J, w.filtration, "phi"); }

double psi(int i, const Matrix& J, const FlagSample& w) { return level_log_det(i, J, w.cofiltration, "psi"); }

void write_orbit_csv(std::ostream& out, const OrbitSegment& orbit) {
  if (orbit.points.empty()) return;
  const auto d = orbit.points.front().size();
  out << "step";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << i;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out << ",j" << r << c;
  out << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t step = 0; step < orbit.points.size(); ++step) {
    out << step;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << orbit.points[step](i);
    const bool has_jac = step < orbit.jacobians.size();
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        out << ',';
        if (has_jac) out << orbit.jacobians[step](r, c);
      }
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace oslab
