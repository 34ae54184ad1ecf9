#pragma once

// Frames, subspaces and the subspace geometry used throughout the toolkit:
// parallelepiped volumes, restricted determinants, principal angles, the
// projector-difference metric and the pairwise-cosine ("independence") matrix.

#include "oslab/types.hpp"

#include <span>
#include <vector>

namespace oslab {

/// Frames whose volume falls below this are rejected as dependent.
inline constexpr double kFrameIndependenceTol = 1e-12;
/// Default threshold for the direct-sum test.
inline constexpr double kDirectSumTol = 1e-10;

/// An ordered, linearly independent list of p vectors in R^d, stored as the
/// columns of a d x p matrix.
class Frame {
 public:
  /// Throws InputError on ragged input and DegeneracyError when vol <= 1e-12.
  static Frame from_vectors(std::span<const Vector> vectors);
  static Frame from_columns(const Matrix& columns);

  const Matrix& columns() const { return columns_; }
  int ambient_dim() const { return static_cast<int>(columns_.rows()); }
  int count() const { return static_cast<int>(columns_.cols()); }

 private:
  explicit Frame(Matrix columns) : columns_(std::move(columns)) {}
  Matrix columns_;
};

/// A linear subspace of R^d held as a column-orthonormal basis.
class Subspace {
 public:
  /// Orthonormalizes the columns of `spanning`. The columns must be
  /// independent (vol > `tol`), otherwise DegeneracyError.
  static Subspace span(const Matrix& spanning, double tol = kFrameIndependenceTol);
  static Subspace span(const Vector& v) { return span(Matrix(v)); }
  /// Adopts `basis` as-is; it must already be orthonormal to 1e-12.
  static Subspace from_orthonormal(Matrix basis);
  /// span(e_i) for each listed index.
  static Subspace coordinate(int ambient_dim, std::initializer_list<int> axes);
  static Subspace full(int ambient_dim);

  const Matrix& basis() const { return basis_; }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  Matrix projector() const { return basis_ * basis_.transpose(); }

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// The pairwise-cosine matrix of a tuple of subspaces and its least eigenvalue.
struct GramAngleMatrix {
  Matrix entries;
  double smallest_eigenvalue = 0.0;
};

/// |det A| where columns = zeta * A for an orthonormal frame zeta of the span.
/// Dependent columns give 0.
double vol(const Matrix& columns);
double vol(const Frame& frame);

/// vol(L xi) / vol(xi) for a frame xi spanning E.
double det_restricted(const Matrix& L, const Subspace& E);
/// log of det_restricted, computed without forming the ratio.
double log_det_restricted(const Matrix& L, const Subspace& E);

/// Smallest principal angle in [0, pi/2]; zero iff E and F intersect.
double min_angle(const Subspace& E, const Subspace& F);

/// All principal angles, ascending; min(dim E, dim F) of them.
Vector principal_angles(const Subspace& E, const Subspace& F);

/// Orthogonal projection of v/|v| onto E; the zero vector maps to zero.
Vector gamma_project(const Vector& v, const Subspace& E);

/// Operator 2-norm of P_F - P_G. Lies in [0,1]; equals 1 when dims differ.
double grassmann_distance(const Subspace& F, const Subspace& G);

GramAngleMatrix gram_angle_matrix(std::span<const Subspace> spaces);

/// Smallest eigenvalue of gram_angle_matrix.
double independence_number(std::span<const Subspace> spaces);

/// Orthonormal span of the concatenated bases; DegeneracyError when the
/// concatenated frame has volume below `tol` (the sum is not direct).
Subspace direct_sum(std::span<const Subspace> spaces, double tol = kDirectSumTol);

/// Best `dim`-dimensional approximate intersection of E and F, built from the
/// leading principal vector pairs. `residual` receives the largest sine of
/// the principal angles used (0 for an exact intersection).
Subspace approximate_intersection(const Subspace& E, const Subspace& F, int dim,
                                  double* residual = nullptr);

/// Orthogonal complement in R^d. Empty (d x 0) complements are not representable.
Subspace orthogonal_complement(const Subspace& E);

}  // namespace oslab
