#pragma once

// Dynamical systems with analytic Jacobians and inverses.
//
//   toral_automorphism   x -> A x mod 1, A integer and unimodular
//   perturbed_toral      x -> A x + delta sin(2 pi x_2) / (2 pi) e_1 mod 1
//   henon                (x1, x2) -> (1 - a x1^2 + x2, b x1)
//   linear               x -> A x on R^d, A real (test hook, no torus)

#include "oslab/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace oslab {

enum class SystemKind { toral_automorphism, perturbed_toral, henon, linear };

std::string_view to_string(SystemKind kind);
SystemKind system_kind_from_string(std::string_view name);

/// Plain description of a system, as read from a config block.
struct SystemSpec {
  SystemKind kind = SystemKind::toral_automorphism;
  Matrix matrix;  // toral kinds: integer entries; linear: real entries
  double delta = 0.0;
  double henon_a = 1.4;
  double henon_b = 0.3;

  int ambient_dim() const;

  static SystemSpec cat2();
  /// [[1,1,1],[1,2,2],[1,2,3]], a hyperbolic automorphism of T^3 with three
  /// distinct real exponents.
  static SystemSpec a3();
  static SystemSpec perturbed_cat2(double delta);
  static SystemSpec henon(double a = 1.4, double b = 0.3);
  static SystemSpec linear(Matrix m);
};

/// Eigen-data of a toral automorphism.
struct SpectrumReport {
  Vector eigen_moduli;         // sorted increasing
  Vector exponents;            // log of the moduli, increasing
  std::vector<int> block_dims; // multiplicities of equal moduli
  double determinant = 0.0;
};

/// Modulus and hyperbolicity check; throws ValidationError.
SpectrumReport validate_hyperbolic(const SystemSpec& spec);

/// A validated system ready for iteration. Immutable and thread-safe.
class System {
 public:
  /// Validates the spec (unimodular, hyperbolic, b != 0, ...).
  explicit System(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  SystemKind kind() const { return spec_.kind; }
  int dim() const { return dim_; }
  bool is_toral() const;

  Point apply(const Point& x) const;
  /// f without reduction mod 1. For non-toral kinds identical to apply.
  Point apply_lift(const Point& x) const;
  Matrix jacobian(const Point& x) const;
  /// Throws NumericError if the perturbed inverse fails to converge.
  Point apply_inverse(const Point& x) const;
  /// Jacobian of the inverse at x, i.e. Df(f^{-1} x)^{-1}.
  Matrix inverse_jacobian(const Point& x) const;

  /// Reduces toral coordinates into [0,1); identity otherwise.
  Point reduce(Point x) const;
  /// Flat distance: minimal circle distance per coordinate on tori,
  /// Euclidean otherwise.
  double distance(const Point& x, const Point& y) const;
  /// y - x with toral components wrapped into [-1/2, 1/2).
  Vector displacement(const Point& x, const Point& y) const;

  /// |log det Df|, constant for every system kind shipped here.
  double log_abs_det_jacobian(const Point& x) const;

 private:
  SystemSpec spec_;
  int dim_ = 0;
  Matrix inverse_matrix_;
};

/// Coordinate-wise circle distance on T^d, then Euclidean norm.
double torus_distance(const Point& x, const Point& y);

}  // namespace oslab
