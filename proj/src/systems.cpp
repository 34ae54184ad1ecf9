#include "oslab/systems.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace oslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHyperbolicTol = 1e-8;
constexpr int kInverseMaxSteps = 100;

bool is_integer_matrix(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (!std::isfinite(v) || v != std::round(v)) return false;
  }
  return true;
}

double wrap_unit(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

double wrap_half(double v) { return v - std::round(v); }

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::toral_automorphism: return "toral_automorphism";
    case SystemKind::perturbed_toral: return "perturbed_toral";
    case SystemKind::henon: return "henon";
    case SystemKind::linear: return "linear";
  }
  return "unknown";
}

SystemKind system_kind_from_string(std::string_view name) {
  if (name == "toral_automorphism") return SystemKind::toral_automorphism;
  if (name == "perturbed_toral") return SystemKind::perturbed_toral;
  if (name == "henon") return SystemKind::henon;
  if (name == "linear") return SystemKind::linear;
  throw InputError("unknown system kind '" + std::string(name) + "'");
}

int SystemSpec::ambient_dim() const {
  return kind == SystemKind::henon ? 2 : static_cast<int>(matrix.rows());
}

SystemSpec SystemSpec::cat2() {
  SystemSpec s;
  s.kind = SystemKind::toral_automorphism;
  s.matrix = (Matrix(2, 2) << 2, 1, 1, 1).finished();
  return s;
}

SystemSpec SystemSpec::a3() {
  SystemSpec s;
  s.kind = SystemKind::toral_automorphism;
  s.matrix = (Matrix(3, 3) << 1, 1, 1, 1, 2, 2, 1, 2, 3).finished();
  return s;
}

SystemSpec SystemSpec::perturbed_cat2(double delta) {
  SystemSpec s = cat2();
  s.kind = SystemKind::perturbed_toral;
  s.delta = delta;
  return s;
}

SystemSpec SystemSpec::henon(double a, double b) {
  SystemSpec s;
  s.kind = SystemKind::henon;
  s.henon_a = a;
  s.henon_b = b;
  return s;
}

SystemSpec SystemSpec::linear(Matrix m) {
  SystemSpec s;
  s.kind = SystemKind::linear;
  s.matrix = std::move(m);
  return s;
}

SpectrumReport validate_hyperbolic(const SystemSpec& spec) {
  if (spec.kind == SystemKind::henon) {
    throw InputError("validate_hyperbolic: requires a matrix system");
  }
  const Matrix& a = spec.matrix;
  if (a.rows() == 0 || a.rows() != a.cols()) throw ValidationError("matrix must be square and non-empty");
  if (a.rows() > kMaxAmbientDim) throw ValidationError("ambient dimension above 8 is not supported");
  const bool toral = spec.kind != SystemKind::linear;
  SpectrumReport out;
  out.determinant = a.determinant();
  if (toral) {
    if (!is_integer_matrix(a)) throw ValidationError("toral matrix must have integer entries");
    const double rounded = std::round(out.determinant);
    if (std::abs(out.determinant - rounded) > 1e-9 || std::abs(rounded) != 1.0) {
      throw ValidationError("toral matrix must be unimodular (|det| = 1)");
    }
    out.determinant = rounded;
  } else if (std::abs(out.determinant) == 0.0) {
    throw ValidationError("linear map must be invertible");
  }
  Eigen::EigenSolver<Matrix> es(a, false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(moduli.begin(), moduli.end());
  out.eigen_moduli = Eigen::Map<Vector>(moduli.data(), static_cast<Eigen::Index>(moduli.size()));
  out.exponents = out.eigen_moduli.array().log();
  for (Eigen::Index i = 0; i < out.exponents.size(); ++i) {
    if (std::abs(out.exponents(i)) < kHyperbolicTol) {
      throw ValidationError("matrix is not hyperbolic: eigenvalue of modulus 1");
    }
  }
  // Group equal moduli (relative tolerance 1e-6) into Oseledets blocks.
  int run = 1;
  for (std::size_t i = 1; i < moduli.size(); ++i) {
    if (std::abs(moduli[i] - moduli[i - 1]) <= 1e-6 * moduli[i]) {
      ++run;
    } else {
      out.block_dims.push_back(run);
      run = 1;
    }
  }
  out.block_dims.push_back(run);
  return out;
}

System::System(SystemSpec spec) : spec_(std::move(spec)) {
  switch (spec_.kind) {
    case SystemKind::henon:
      if (spec_.henon_b == 0.0 || !std::isfinite(spec_.henon_b) || !std::isfinite(spec_.henon_a)) {
        throw ValidationError("henon: b must be finite and nonzero");
      }
      dim_ = 2;
      break;
    case SystemKind::perturbed_toral:
      if (!(spec_.delta >= 0.0)) throw ValidationError("perturbed_toral: delta must be >= 0");
      if (spec_.matrix.rows() < 2) throw ValidationError("perturbed_toral: needs dimension >= 2");
      [[fallthrough]];
    case SystemKind::toral_automorphism:
    case SystemKind::linear:
      validate_hyperbolic(spec_);
      dim_ = static_cast<int>(spec_.matrix.rows());
      inverse_matrix_ = spec_.matrix.inverse();
      if (spec_.kind != SystemKind::linear) inverse_matrix_ = inverse_matrix_.array().round().matrix();
      break;
  }
}

bool System::is_toral() const {
  return spec_.kind == SystemKind::toral_automorphism || spec_.kind == SystemKind::perturbed_toral;
}

Point System::apply_lift(const Point& x) const {
  switch (spec_.kind) {
    case SystemKind::henon: {
      Point y(2);
      y(0) = 1.0 - spec_.henon_a * x(0) * x(0) + x(1);
      y(1) = spec_.henon_b * x(0);
      return y;
    }
    case SystemKind::perturbed_toral: {
      Point y = spec_.matrix * x;
      y(0) += spec_.delta * std::sin(kTwoPi * x(1)) / kTwoPi;
      return y;
    }
    case SystemKind::toral_automorphism:
    case SystemKind::linear:
      return spec_.matrix * x;
  }
  return x;
}

Point System::apply(const Point& x) const { return reduce(apply_lift(x)); }

Matrix System::jacobian(const Point& x) const {
  switch (spec_.kind) {
    case SystemKind::henon:
      return (Matrix(2, 2) << -2.0 * spec_.henon_a * x(0), 1.0, spec_.henon_b, 0.0).finished();
    case SystemKind::perturbed_toral: {
      Matrix j = spec_.matrix;
      j(0, 1) += spec_.delta * std::cos(kTwoPi * x(1));
      return j;
    }
    case SystemKind::toral_automorphism:
    case SystemKind::linear:
      return spec_.matrix;
  }
  return spec_.matrix;
}

Point System::apply_inverse(const Point& y) const {
  switch (spec_.kind) {
    case SystemKind::henon: {
      Point x(2);
      x(0) = y(1) / spec_.henon_b;
      x(1) = y(0) - 1.0 + spec_.henon_a * x(0) * x(0);
      return x;
    }
    case SystemKind::toral_automorphism:
    case SystemKind::linear:
      return reduce(inverse_matrix_ * y);
    case SystemKind::perturbed_toral: {
      // Fixed point of x = A^{-1}(y - delta sin(2 pi x_2)/(2 pi) e_1); the
      // shear term is a contraction for the supported delta range.
      Point x = reduce(inverse_matrix_ * y);
      for (int step = 0; step < kInverseMaxSteps; ++step) {
        Point rhs = y;
        rhs(0) -= spec_.delta * std::sin(kTwoPi * x(1)) / kTwoPi;
        Point next = reduce(inverse_matrix_ * rhs);
        const double change = torus_distance(next, x);
        x = std::move(next);
        if (change <= 1e-15) return x;
      }
      if (torus_distance(apply(x), y) < 1e-12) return x;
      throw NumericError("perturbed_toral inverse: fixed-point iteration did not converge");
    }
  }
  return y;
}

Matrix System::inverse_jacobian(const Point& x) const {
  switch (spec_.kind) {
    case SystemKind::toral_automorphism:
    case SystemKind::linear:
      return inverse_matrix_;
    case SystemKind::henon: {
      const Point pre = apply_inverse(x);
      return (Matrix(2, 2) << 0.0, 1.0 / spec_.henon_b, 1.0, 2.0 * spec_.henon_a * pre(0) / spec_.henon_b)
          .finished();
    }
    case SystemKind::perturbed_toral:
      return jacobian(apply_inverse(x)).inverse();
  }
  return inverse_matrix_;
}

Point System::reduce(Point x) const {
  if (is_toral()) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = wrap_unit(x(i));
  }
  return x;
}

Vector System::displacement(const Point& x, const Point& y) const {
  Vector d = y - x;
  if (is_toral()) {
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = wrap_half(d(i));
  }
  return d;
}

double System::distance(const Point& x, const Point& y) const { return displacement(x, y).norm(); }

double System::log_abs_det_jacobian(const Point&) const {
  switch (spec_.kind) {
    case SystemKind::henon: return std::log(std::abs(spec_.henon_b));
    case SystemKind::linear: return std::log(std::abs(spec_.matrix.determinant()));
    case SystemKind::toral_automorphism:
    case SystemKind::perturbed_toral: return 0.0;
  }
  return 0.0;
}

double torus_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw InputError("torus_distance: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = wrap_half(y(i) - x(i));
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace oslab
