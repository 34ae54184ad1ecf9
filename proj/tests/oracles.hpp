#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into the library's numerical kernels; the oracles use
// closed forms, Gram determinants, explicit projectors and integer
// arithmetic.

#include "oslab/grassmann.hpp"
#include "oslab/random.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using oslab::Matrix;
using oslab::Vector;

inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
/// log((3 + sqrt 5) / 2), the positive cat-map exponent.
inline const double kCatExponent = std::log((3.0 + std::sqrt(5.0)) / 2.0);

/// Unstable and stable eigenlines of [[2,1],[1,1]].
inline Vector cat_unstable() { return (Vector(2) << kGolden, 1.0).finished(); }
inline Vector cat_stable() { return (Vector(2) << 1.0, -kGolden).finished(); }

/// sqrt(det(X^T X)).
inline double gram_volume(const Matrix& x) { return std::sqrt(std::max(0.0, (x.transpose() * x).determinant())); }

/// X (X^T X)^{-1} X^T from any spanning matrix of full column rank.
inline Matrix projector(const Matrix& x) { return x * (x.transpose() * x).inverse() * x.transpose(); }

/// Largest singular value of the projector difference.
inline double projector_distance(const Matrix& x, const Matrix& y) {
  Eigen::JacobiSVD<Matrix> svd(projector(x) - projector(y));
  return svd.singularValues()(0);
}

/// Principal-angle cosines as singular values of Q_x^T Q_y, the orthonormal
/// bases taken from the projector eigenvectors.
inline Vector principal_cosines(const Matrix& x, const Matrix& y) {
  auto onb = [](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    return Matrix(svd.matrixU());
  };
  Eigen::JacobiSVD<Matrix> svd(onb(x).transpose() * onb(y));
  return svd.singularValues();
}

/// Real roots of x^3 + a x^2 + b x + c with three real roots, by the
/// trigonometric form of Cardano's formula; ascending.
inline std::array<double, 3> cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(3.0 * q / (p * r));
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) out[k] = r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0);
  for (auto& x : out) x -= a / 3.0;
  std::sort(out.begin(), out.end());
  return out;
}

/// Minimal period of p/q under an integer matrix mod 1, by integer iteration
/// of the numerators mod q.
inline int rational_period(const std::vector<std::vector<long long>>& a, std::vector<long long> num, long long q) {
  const std::vector<long long> start = num;
  for (int n = 1; n < 100000; ++n) {
    std::vector<long long> next(num.size(), 0);
    for (std::size_t i = 0; i < num.size(); ++i) {
      for (std::size_t j = 0; j < num.size(); ++j) next[i] += a[i][j] * num[j];
      next[i] = ((next[i] % q) + q) % q;
    }
    num = std::move(next);
    if (num == start) return n;
  }
  return -1;
}

/// Random spanning matrix of a k-dimensional subspace of R^d.
inline Matrix random_frame(oslab::CounterRng& rng, int d, int k) { return rng.next_normal_matrix(d, k); }

inline oslab::Subspace random_subspace(oslab::CounterRng& rng, int d, int k) {
  return oslab::Subspace::span(random_frame(rng, d, k));
}

inline int random_int(oslab::CounterRng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace oracle
