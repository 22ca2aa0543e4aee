#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "family.hpp"
#include "linalg.hpp"
#include "types.hpp"

// Analysis/synthesis operators, frame operator, optimal bounds,
// classification and duals of a finite HS-frame family.

namespace hsframe {

namespace detail {

// Per-index sums use a fixed pairwise tree over [lo, hi) so that results are
// bit-stable no matter how the terms are produced.
template <class Term>
Vector pairwise_sum(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo == 1) return term(lo);
  const std::size_t mid = lo + (hi - lo) / 2;
  Vector left = pairwise_sum(lo, mid, term);
  left += pairwise_sum(mid, hi, term);
  return left;
}

inline Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

}  // namespace detail

/// T^* f = {G_j f}_j.
inline CoefficientSequence analyze(const HSFrameFamily& family, const HVector& f) {
  detail::require_shape(f.size() == family.dim_h(), "analyze: vector length does not match d_H");
  std::vector<HSElement> blocks;
  blocks.reserve(family.size());
  for (const auto& g : family.maps()) blocks.push_back(g.apply(f));
  return CoefficientSequence(std::move(blocks));
}

/// T {A_j} = sum_j G_j^*(A_j), summed with a pairwise tree.
inline HVector synthesize(const HSFrameFamily& family, const CoefficientSequence& c) {
  detail::require_shape(c.size() == family.size(), "synthesize: coefficient count does not match family size");
  detail::require_shape(c.dim_k() == family.dim_k(), "synthesize: coefficient blocks have wrong d_K");
  return detail::pairwise_sum(0, family.size(), [&](std::size_t j) { return family.map(j).adjoint_apply(c[j]); });
}

/// Same sum accumulated sequentially along an explicit index order.
inline HVector synthesize(const HSFrameFamily& family, const CoefficientSequence& c,
                          std::span<const std::size_t> order) {
  detail::require_shape(c.size() == family.size() && order.size() == family.size(),
                        "synthesize: order/coefficients do not match family size");
  detail::require_shape(c.dim_k() == family.dim_k(), "synthesize: coefficient blocks have wrong d_K");
  HVector acc = HVector::Zero(family.dim_h());
  for (std::size_t j : order) acc += family.map(j).adjoint_apply(c[j]);
  return acc;
}

/// S = T T^* = sum_j G_j^* G_j as a Hermitian d_H x d_H matrix.
inline Matrix frame_operator(const HSFrameFamily& family) {
  const Matrix& phi = family.analysis_matrix();
  return detail::hermitian_part(phi.adjoint() * phi);
}

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Optimal bounds: extremal eigenvalues of S. The lower one is clamped at 0.
inline FrameBounds frame_bounds(const HSFrameFamily& family) {
  const RealVector ev = linalg::hermitian_eigenvalues(frame_operator(family));
  return {std::max(0.0, ev(0)), std::max(0.0, ev(ev.size() - 1))};
}

struct FrameReport {
  double lower_bound = 0.0;  // A; zero unless the family is a frame
  double upper_bound = 0.0;  // B
  bool bessel = true;
  bool frame = false;
  bool riesz = false;
  bool complete = false;
  std::optional<double> riesz_lower;
  std::optional<double> riesz_upper;
  double synthesis_norm = 0.0;       // ||T|| = sigma_max
  double pseudo_inverse_norm = 0.0;  // ||T^+|| = 1 / smallest nonzero sigma
  Index rank = 0;
  Index coefficient_dim = 0;
};

/// Classifies the family through the singular values of the synthesis matrix.
///
/// frame <=> rank T = d_H; riesz <=> frame and T injective (so J*d_K^2 = d_H).
/// Every finite family is Bessel.
inline FrameReport classify(const HSFrameFamily& family, double rank_tol = kDefaultRankTol) {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw PreconditionError("classify: rank_tol must lie in (0, 1)");
  FrameReport rep;
  const RealVector sigma = linalg::singular_values(family.synthesis_matrix());
  const FrameBounds fb = frame_bounds(family);
  rep.coefficient_dim = family.coefficient_dim();
  rep.rank = linalg::numerical_rank(sigma, rank_tol);
  rep.synthesis_norm = sigma.size() ? sigma(0) : 0.0;
  rep.upper_bound = fb.upper;
  rep.frame = rep.rank == family.dim_h();
  rep.complete = rep.frame;
  rep.lower_bound = rep.frame ? fb.lower : 0.0;
  rep.pseudo_inverse_norm = rep.rank > 0 ? 1.0 / sigma(rep.rank - 1) : 0.0;
  rep.riesz = rep.frame && rep.rank == rep.coefficient_dim;
  if (rep.riesz) {
    rep.riesz_lower = sigma(rep.rank - 1) * sigma(rep.rank - 1);
    rep.riesz_upper = sigma(0) * sigma(0);
  }
  return rep;
}

struct RieszInequalityResult {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool lower_positive = false;  // min ratio bounded away from zero
  bool riesz = false;           // lower_positive and the coefficient space matches d_H
  std::size_t samples = 0;
};

/// Evaluates ||T c||^2 / ||c||^2 on random coefficient sequences plus every
/// right singular vector of T (which covers the kernel when it is nontrivial).
inline RieszInequalityResult riesz_inequality_check(const HSFrameFamily& family, int trials, std::uint64_t seed,
                                                    double rank_tol = kDefaultRankTol) {
  if (trials < 1) throw PreconditionError("riesz_inequality_check: trials must be >= 1");
  const Matrix t = family.synthesis_matrix();
  const Index n = t.cols();
  linalg::Rng rng(seed);
  RieszInequalityResult res;
  res.min_ratio = std::numeric_limits<double>::infinity();
  auto visit = [&](const Vector& c) {
    const double cn = c.squaredNorm();
    if (cn == 0.0) return;
    const double r = (t * c).squaredNorm() / cn;
    res.min_ratio = std::min(res.min_ratio, r);
    res.max_ratio = std::max(res.max_ratio, r);
    ++res.samples;
  };
  for (int k = 0; k < trials; ++k) visit(linalg::random_gaussian(n, 1, rng).col(0));
  const linalg::Svd d = linalg::svd(t);
  for (Index k = 0; k < n; ++k) visit(d.v.col(k));
  res.lower_positive = res.max_ratio > 0.0 && res.min_ratio > rank_tol * rank_tol * res.max_ratio;
  res.riesz = res.lower_positive && n == family.dim_h();
  return res;
}

/// Orthonormal basis (columns) of ker T inside the stacked coefficient space.
inline Matrix synthesis_kernel(const HSFrameFamily& family, double rank_tol = kDefaultRankTol) {
  return linalg::null_space(family.synthesis_matrix(), rank_tol);
}

namespace detail {

inline void require_frame(const HSFrameFamily& family, double rank_tol, const char* who) {
  const RealVector sigma = linalg::singular_values(family.analysis_matrix());
  if (linalg::numerical_rank(sigma, rank_tol) != family.dim_h())
    throw NotAFrameError(std::string(who) + ": family is not a frame (lower bound zero)");
}

}  // namespace detail

/// Canonical dual {G_j S^{-1}}.
inline HSFrameFamily canonical_dual(const HSFrameFamily& family, double rank_tol = kDefaultRankTol) {
  detail::require_frame(family, rank_tol, "canonical_dual");
  const Matrix s = frame_operator(family);
  const Matrix s_inv = linalg::hpd_solve(s, Matrix::Identity(s.rows(), s.cols()));
  return HSFrameFamily::from_analysis_matrix(family.dim_k(), family.analysis_matrix() * s_inv);
}

/// f = sum_j S^{-1} G_j^* G_j f.
inline HVector reconstruct(const HSFrameFamily& family, const HVector& f, double rank_tol = kDefaultRankTol) {
  detail::require_shape(f.size() == family.dim_h(), "reconstruct: vector length does not match d_H");
  detail::require_frame(family, rank_tol, "reconstruct");
  Eigen::LLT<Matrix> llt(frame_operator(family));
  if (llt.info() != Eigen::Success) throw NumericError("reconstruct: frame operator not positive definite");
  return detail::pairwise_sum(0, family.size(), [&](std::size_t j) {
    const Matrix& b = family.map(j).block();
    return Vector(llt.solve(b.adjoint() * (b * f)));
  });
}

struct AlternateDualCheck {
  bool is_dual = false;
  double max_residual = 0.0;       // max over samples of ||identity(f) - f|| / ||f||
  double max_disagreement = 0.0;   // max over samples of the gap between both identities / ||f||
};

/// Tests f = sum G_j^* V_j f = sum V_j^* G_j f on random f.
inline AlternateDualCheck verify_alternate_dual(const HSFrameFamily& family, const HSFrameFamily& candidate,
                                                int trials, std::uint64_t seed, double tol = 1e-9) {
  detail::require_shape(family.size() == candidate.size() && family.dim_h() == candidate.dim_h() &&
                            family.dim_k() == candidate.dim_k(),
                        "verify_alternate_dual: families differ in size or dimensions");
  if (trials < 1) throw PreconditionError("verify_alternate_dual: trials must be >= 1");
  const Matrix& phi = family.analysis_matrix();
  const Matrix& psi = candidate.analysis_matrix();
  linalg::Rng rng(seed);
  AlternateDualCheck out;
  for (int k = 0; k < trials; ++k) {
    const Vector f = linalg::random_gaussian(family.dim_h(), 1, rng).col(0);
    const double fn = f.norm();
    const Vector first = phi.adjoint() * (psi * f);
    const Vector second = psi.adjoint() * (phi * f);
    out.max_residual = std::max({out.max_residual, (first - f).norm() / fn, (second - f).norm() / fn});
    out.max_disagreement = std::max(out.max_disagreement, (first - second).norm() / fn);
  }
  out.is_dual = out.max_residual <= tol && out.max_disagreement <= tol;
  return out;
}

struct HsNormBound {
  double hs_norm = 0.0;  // ||S||_HS
  double bound = 0.0;    // B * sqrt(max(count, dim H))
  bool holds = false;
};

/// ||S||_HS^2 = sum_n ||S e_n||^2 <= B^2 dim H over an orthonormal basis of H.
///
/// The count is only a valid index when count >= dim H (always true for scalar
/// frames), hence the max.
inline HsNormBound frame_operator_hs_norm_bound(const HSFrameFamily& family) {
  HsNormBound out;
  out.hs_norm = frame_operator(family).norm();
  const auto n = std::max<std::size_t>(family.size(), static_cast<std::size_t>(family.dim_h()));
  out.bound = frame_bounds(family).upper * std::sqrt(static_cast<double>(n));
  out.holds = out.hs_norm <= out.bound * (1.0 + 1e-12);
  return out;
}

}  // namespace hsframe
