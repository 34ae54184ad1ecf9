#include "oslab/grassmann.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oslab {

namespace {

void require_same_ambient(const Subspace& E, const Subspace& F, const char* what) {
  if (E.ambient_dim() != F.ambient_dim()) {
    throw InputError(std::string(what) + ": ambient dimensions differ (" +
                     std::to_string(E.ambient_dim()) + " vs " +
                     std::to_string(F.ambient_dim()) + ")");
  }
}

Matrix thin_q(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

Frame Frame::from_vectors(std::span<const Vector> vectors) {
  if (vectors.empty()) throw InputError("frame: no vectors");
  const auto d = vectors.front().size();
  Matrix cols(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) throw InputError("frame: vectors have different ambient dimensions");
    cols.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return from_columns(cols);
}

Frame Frame::from_columns(const Matrix& columns) {
  if (columns.cols() == 0 || columns.rows() == 0) throw InputError("frame: empty");
  if (columns.cols() > columns.rows()) throw DegeneracyError("frame: more vectors than ambient dimension");
  if (vol(columns) <= kFrameIndependenceTol) throw DegeneracyError("frame: vectors are linearly dependent");
  return Frame(columns);
}

double vol(const Matrix& columns) {
  if (columns.cols() == 0) return 1.0;
  if (columns.cols() > columns.rows()) return 0.0;
  Eigen::HouseholderQR<Matrix> qr(columns);
  const Matrix& r = qr.matrixQR();
  double v = 1.0;
  for (Eigen::Index i = 0; i < columns.cols(); ++i) v *= std::abs(r(i, i));
  return v;
}

double vol(const Frame& frame) { return vol(frame.columns()); }

Subspace Subspace::span(const Matrix& spanning, double tol) {
  if (spanning.cols() < 1 || spanning.cols() > spanning.rows()) {
    throw InputError("subspace: need 1 <= p <= d spanning vectors");
  }
  if (!spanning.allFinite()) throw NumericError("subspace: non-finite spanning vectors");
  if (vol(spanning) <= tol) throw DegeneracyError("subspace: spanning vectors are dependent");
  return Subspace(thin_q(spanning));
}

Subspace Subspace::from_orthonormal(Matrix basis) {
  if (basis.cols() < 1 || basis.cols() > basis.rows()) throw InputError("subspace: need 1 <= p <= d");
  const Matrix gram = basis.transpose() * basis;
  const double dev = (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (!(dev < 1e-12)) throw InputError("subspace: basis is not orthonormal");
  return Subspace(std::move(basis));
}

Subspace Subspace::coordinate(int ambient_dim, std::initializer_list<int> axes) {
  Matrix b = Matrix::Zero(ambient_dim, static_cast<Eigen::Index>(axes.size()));
  Eigen::Index c = 0;
  for (int axis : axes) {
    if (axis < 0 || axis >= ambient_dim) throw InputError("subspace: axis out of range");
    b(axis, c++) = 1.0;
  }
  return from_orthonormal(std::move(b));
}

Subspace Subspace::full(int ambient_dim) {
  return Subspace(Matrix::Identity(ambient_dim, ambient_dim));
}

double det_restricted(const Matrix& L, const Subspace& E) {
  if (L.rows() != L.cols() || L.cols() != E.ambient_dim()) {
    throw InputError("det_restricted: map and subspace dimensions differ");
  }
  // The basis is orthonormal, so vol(basis) = 1.
  return vol(L * E.basis());
}

double log_det_restricted(const Matrix& L, const Subspace& E) {
  if (L.rows() != L.cols() || L.cols() != E.ambient_dim()) {
    throw InputError("log_det_restricted: map and subspace dimensions differ");
  }
  Eigen::HouseholderQR<Matrix> qr(L * E.basis());
  const Matrix& r = qr.matrixQR();
  double s = 0.0;
  for (Eigen::Index i = 0; i < E.dim(); ++i) s += std::log(std::abs(r(i, i)));
  return s;
}

namespace {

// Arguments in a fixed order (smaller dimension first, then by basis entries)
// so that every pairwise quantity is bitwise symmetric.
bool ordered(const Subspace& E, const Subspace& F) {
  if (E.dim() != F.dim()) return E.dim() < F.dim();
  const Matrix& a = E.basis();
  const Matrix& b = F.basis();
  return !std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
}

// (cos, sin) of the principal angles, smallest angle first. Cosines come
// from the cross product, sines from the residual of projecting onto the
// larger space; keeping both keeps small and near-right angles accurate.
std::vector<std::pair<double, double>> principal_pairs(const Subspace& E, const Subspace& F) {
  const bool keep = ordered(E, F);
  const Subspace& a = keep ? E : F;
  const Subspace& b = keep ? F : E;
  const Eigen::Index p = a.dim();
  Eigen::JacobiSVD<Matrix> cross(a.basis().transpose() * b.basis());
  const Matrix resid = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
  Eigen::JacobiSVD<Matrix> off(resid);
  const Vector& cosines = cross.singularValues();  // descending
  const Vector& sines = off.singularValues();      // descending
  std::vector<std::pair<double, double>> out;
  for (Eigen::Index i = 0; i < p; ++i) {
    out.emplace_back(std::clamp(cosines(i), 0.0, 1.0), std::clamp(sines(p - 1 - i), 0.0, 1.0));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::atan2(x.second, x.first) < std::atan2(y.second, y.first);
  });
  return out;
}

// cos of the minimal angle, exactly 0 for orthogonal and 1 for intersecting
// spaces.
double min_angle_cos(const Subspace& E, const Subspace& F) {
  if (E.dim() + F.dim() > E.ambient_dim()) return 1.0;
  const auto [c, s] = principal_pairs(E, F).front();
  return c / std::hypot(c, s);
}

}  // namespace

Vector principal_angles(const Subspace& E, const Subspace& F) {
  require_same_ambient(E, F, "principal_angles");
  const auto pairs = principal_pairs(E, F);
  Vector angles(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    angles(static_cast<Eigen::Index>(i)) = std::atan2(pairs[i].second, pairs[i].first);
  }
  return angles;
}

double min_angle(const Subspace& E, const Subspace& F) {
  require_same_ambient(E, F, "min_angle");
  if (E.dim() + F.dim() > E.ambient_dim()) return 0.0;
  const auto [c, s] = principal_pairs(E, F).front();
  return std::atan2(s, c);
}

Vector gamma_project(const Vector& v, const Subspace& E) {
  if (v.size() != E.ambient_dim()) throw InputError("gamma_project: dimension mismatch");
  const double n = v.norm();
  if (n == 0.0) return Vector::Zero(v.size());
  return E.basis() * (E.basis().transpose() * (v / n));
}

double grassmann_distance(const Subspace& F, const Subspace& G) {
  require_same_ambient(F, G, "grassmann_distance");
  const Matrix diff = F.projector() - G.projector();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(diff, Eigen::EigenvaluesOnly);
  const double d = eig.eigenvalues().cwiseAbs().maxCoeff();
  return std::min(d, 1.0);
}

GramAngleMatrix gram_angle_matrix(std::span<const Subspace> spaces) {
  if (spaces.empty()) throw InputError("gram_angle_matrix: empty list");
  const int d = spaces.front().ambient_dim();
  int total = 0;
  for (const auto& s : spaces) {
    if (s.ambient_dim() != d) throw InputError("gram_angle_matrix: ambient dimensions differ");
    total += s.dim();
  }
  if (total > d) throw InputError("gram_angle_matrix: dimensions sum past the ambient dimension");
  const auto t = static_cast<Eigen::Index>(spaces.size());
  GramAngleMatrix out;
  out.entries = Matrix::Identity(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) {
      const double c = min_angle_cos(spaces[i], spaces[j]);
      out.entries(i, j) = c;
      out.entries(j, i) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.entries, Eigen::EigenvaluesOnly);
  out.smallest_eigenvalue = eig.eigenvalues()(0);
  return out;
}

double independence_number(std::span<const Subspace> spaces) {
  return gram_angle_matrix(spaces).smallest_eigenvalue;
}

Subspace direct_sum(std::span<const Subspace> spaces, double tol) {
  if (spaces.empty()) throw InputError("direct_sum: empty list");
  const int d = spaces.front().ambient_dim();
  Eigen::Index total = 0;
  for (const auto& s : spaces) {
    if (s.ambient_dim() != d) throw InputError("direct_sum: ambient dimensions differ");
    total += s.dim();
  }
  if (total > d) throw InputError("direct_sum: dimensions sum past the ambient dimension");
  Matrix cat(d, total);
  Eigen::Index c = 0;
  for (const auto& s : spaces) {
    cat.middleCols(c, s.dim()) = s.basis();
    c += s.dim();
  }
  if (vol(cat) < tol) throw DegeneracyError("direct_sum: subspaces are not independent");
  return Subspace::span(cat, 0.0);
}

Subspace approximate_intersection(const Subspace& E, const Subspace& F, int dim, double* residual) {
  require_same_ambient(E, F, "approximate_intersection");
  if (dim < 1 || dim > std::min(E.dim(), F.dim())) {
    throw InputError("approximate_intersection: requested dimension out of range");
  }
  Eigen::JacobiSVD<Matrix> svd(E.basis().transpose() * F.basis(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix a = E.basis() * svd.matrixU().leftCols(dim);
  const Matrix b = F.basis() * svd.matrixV().leftCols(dim);
  if (residual != nullptr) {
    double worst = 0.0;
    for (int j = 0; j < dim; ++j) worst = std::max(worst, (a.col(j) - b.col(j)).norm());
    *residual = worst;
  }
  return Subspace::span(0.5 * (a + b), 0.0);
}

Subspace orthogonal_complement(const Subspace& E) {
  const int d = E.ambient_dim();
  if (E.dim() >= d) throw InputError("orthogonal_complement: subspace is the whole space");
  Eigen::HouseholderQR<Matrix> qr(E.basis());
  const Matrix q = qr.householderQ();
  return Subspace::from_orthonormal(q.rightCols(d - E.dim()));
}

}  // namespace oslab
