#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace oslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of phase space. Toral coordinates are kept in [0,1).
using Point = Eigen::VectorXd;

/// Largest ambient dimension supported by the dense kernels.
inline constexpr int kMaxAmbientDim = 8;

// Error hierarchy. Every failure surfaced by the library derives from Error so
// callers (the CLI in particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, empty lists, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A frame or sum of subspaces collapsed below the independence threshold.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics that failed to converge or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A flag that does not lie in the image of the splitting-to-flag map.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Oseledets estimation produced an inconsistent block structure.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace oslab
