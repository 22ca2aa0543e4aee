#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "types.hpp"

// Small dense linear-algebra toolkit shared by every module. Everything here
// works on complex double matrices; Hermitian inputs are assumed where noted.

namespace hsframe::linalg {

using Rng = std::mt19937_64;

/// Ascending eigenvalues and matching eigenvectors of a Hermitian matrix.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

inline HermitianEigen hermitian_eigen(const Matrix& h) {
  if (h.rows() == 0) return {RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const Matrix& h) {
  if (h.rows() == 0) return RealVector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

/// Full singular value decomposition; singular values are descending.
struct Svd {
  RealVector values;
  Matrix u;  // rows x rows
  Matrix v;  // cols x cols
};

inline Svd svd(const Matrix& m) {
  if (m.size() == 0) {
    return {RealVector(0), Matrix::Identity(m.rows(), m.rows()), Matrix::Identity(m.cols(), m.cols())};
  }
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) throw NumericError("SVD did not converge");
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("SVD did not converge");
  return solver.singularValues();
}

inline double spectral_norm(const Matrix& m) {
  const RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Numerical rank: singular values above rel_tol * largest.
inline Index numerical_rank(const RealVector& sigma, double rel_tol) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = rel_tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

/// Orthonormal basis for the column space of m via SVD.
inline Matrix orthonormal_range(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU);
  const Index r = numerical_rank(solver.singularValues(), rel_tol);
  return solver.matrixU().leftCols(r);
}

/// Orthonormal basis for the kernel of m via SVD.
inline Matrix null_space(const Matrix& m, double rel_tol) {
  const Svd d = svd(m);
  const Index r = numerical_rank(d.values, rel_tol);
  return d.v.rightCols(m.cols() - r);
}

/// Smallest eigenvalue of a Hermitian matrix (0x0 maps to +inf).
inline double min_eigenvalue(const Matrix& h) {
  if (h.rows() == 0) return std::numeric_limits<double>::infinity();
  return hermitian_eigenvalues(h)(0);
}

inline Scalar complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

/// Matrix of i.i.d. standard complex Gaussians, filled column by column.
inline Matrix random_gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = complex_normal(rng);
  return m;
}

inline Vector random_unit_vector(Index n, Rng& rng) {
  Vector v = random_gaussian(n, 1, rng).col(0);
  const double nrm = v.norm();
  return nrm > 0.0 ? Vector(v / nrm) : v;
}

/// rows x cols matrix with orthonormal columns (rows >= cols), Haar-like.
inline Matrix random_isometry(Index rows, Index cols, Rng& rng) {
  const Matrix g = random_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the phase so the distribution does not depend on Householder sign choices.
  const Matrix r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  for (Index c = 0; c < cols; ++c) {
    const Scalar d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

/// Solves h x = b for Hermitian positive definite h.
inline Matrix hpd_solve(const Matrix& h, const Matrix& b) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) throw NumericError("matrix is not positive definite");
  return llt.solve(b);
}

/// Relative closeness used by the identity checks: |a-b| <= tol * max(1, |a|, |b|).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace hsframe::linalg
