#pragma once

#include <cmath>
#include <string>

#include "types.hpp"

// Hilbert-Schmidt algebra over a finite-dimensional K: Frobenius inner
// product, rank-one operators and the isometric embedding K -> C2.

namespace hsframe {

/// [A, B] = trace(B^* A).
inline Scalar frob_inner(const HSElement& a, const HSElement& b) {
  detail::require_shape(a.rows() == a.cols() && b.rows() == b.cols(), "frob_inner: HS elements must be square");
  detail::require_shape(a.rows() == b.rows(), "frob_inner: dimension mismatch (" + std::to_string(a.rows()) +
                                                  " vs " + std::to_string(b.rows()) + ")");
  return (b.adjoint() * a).trace();
}

inline double hs_norm(const HSElement& a) { return a.norm(); }

/// (x (x) y)(z) = <z, y> x, i.e. the matrix x y^*.
inline HSElement rank_one(const KVector& x, const KVector& y) {
  detail::require_shape(x.size() == y.size(), "rank_one: vectors must share dimension d_K");
  return x * y.adjoint();
}

/// W x = x (x) y0. Isometric when y0 is a unit vector.
inline HSElement embed_vector(const KVector& x, const KVector& y0, double tol = 1e-9) {
  detail::require_shape(x.size() == y0.size(), "embed_vector: vectors must share dimension d_K");
  if (std::abs(y0.norm() - 1.0) > tol) throw PreconditionError("embed_vector: y0 must be a unit vector");
  return rank_one(x, y0);
}

/// Row-major flattening: entry (a, b) lands at a * d_K + b. Under this map the
/// Frobenius inner product becomes the Euclidean one: [A, B] = vec(B)^* vec(A).
inline Vector vectorize(const HSElement& a) {
  detail::require_shape(a.rows() == a.cols(), "vectorize: HS element must be square");
  const Index d = a.rows();
  Vector v(d * d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) v(r * d + c) = a(r, c);
  return v;
}

inline HSElement devectorize(const Vector& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  detail::require_shape(d * d == v.size(),
                        "devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
  HSElement a(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) a(r, c) = v(r * d + c);
  return a;
}

}  // namespace hsframe
