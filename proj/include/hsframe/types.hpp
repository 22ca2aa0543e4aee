#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hsframe {

using Index = Eigen::Index;
using Scalar = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// A d_K x d_K complex matrix viewed as a point of the Hilbert-Schmidt class.
using HSElement = Matrix;
/// Vector of the ambient space H.
using HVector = Vector;
/// Vector of the auxiliary space K.
using KVector = Vector;

/// Relative singular-value cutoff used for every rank and kernel decision.
inline constexpr double kDefaultRankTol = 1e-10;

// Error hierarchy. Callers that only care about "bad input" vs "numerics"
// can catch std::invalid_argument / std::runtime_error.

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs a frame but the lower bound vanishes.
struct NotAFrameError : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The sectional operator is singular on its section (rank_tol too loose).
struct SectionSingularError : NumericError {
  using NumericError::NumericError;
};

/// A certified inequality failed to hold; indicates a bug, not bad data.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace detail

}  // namespace hsframe
