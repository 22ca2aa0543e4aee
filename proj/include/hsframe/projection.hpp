#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "family.hpp"
#include "frame.hpp"
#include "linalg.hpp"
#include "types.hpp"

// Finite-section approximation of S^{-1} along nested prefixes J_n = {first n
// indices}: section spaces H_n, sectional operators S_n, orthogonal
// projections P_n, the plain and oversampled inverse approximations, and the
// diagnostics that track their convergence.
//
// S_n is singular on the complement of H_n, so it is only ever inverted after
// compression to an orthonormal basis Q_n of H_n: S_n^{-1} P_n = Q_n (Q_n^* S_n Q_n)^{-1} Q_n^*.

namespace hsframe {

/// Prefix lengths n_1 < n_2 < ... <= J_max.
class SectionSchedule {
 public:
  SectionSchedule() = default;
  SectionSchedule(std::vector<std::size_t> prefixes, std::size_t j_max) : prefixes_(std::move(prefixes)) {
    if (prefixes_.empty()) throw PreconditionError("schedule: must contain at least one prefix length");
    for (std::size_t k = 0; k < prefixes_.size(); ++k) {
      if (prefixes_[k] < 1) throw PreconditionError("schedule: prefix lengths start at 1");
      if (prefixes_[k] > j_max)
        throw PreconditionError("schedule: prefix length " + std::to_string(prefixes_[k]) + " exceeds family size " +
                                std::to_string(j_max));
      if (k > 0 && prefixes_[k] <= prefixes_[k - 1])
        throw PreconditionError("schedule: prefix lengths must be strictly increasing");
    }
  }

  /// 1, 2, ..., j_max.
  static SectionSchedule all(std::size_t j_max) {
    std::vector<std::size_t> p(j_max);
    for (std::size_t n = 0; n < j_max; ++n) p[n] = n + 1;
    return SectionSchedule(std::move(p), j_max);
  }

  /// Accepts "prefix:all" or a comma list such as "1,2,4,8".
  static SectionSchedule parse(const std::string& text, std::size_t j_max) {
    if (text == "prefix:all" || text == "all") return all(j_max);
    std::vector<std::size_t> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(item, &pos);
      } catch (const std::exception&) {
        throw PreconditionError("schedule: cannot parse '" + item + "'");
      }
      if (pos != item.size() || v < 1) throw PreconditionError("schedule: invalid entry '" + item + "'");
      p.push_back(static_cast<std::size_t>(v));
    }
    return SectionSchedule(std::move(p), j_max);
  }

  const std::vector<std::size_t>& prefixes() const { return prefixes_; }
  std::size_t size() const { return prefixes_.size(); }
  auto begin() const { return prefixes_.begin(); }
  auto end() const { return prefixes_.end(); }

 private:
  std::vector<std::size_t> prefixes_;
};

/// Orthonormal basis of H_n = span{G_j^*(C2) : j < n}.
struct SubspaceBasis {
  Matrix q;  // d_H x r, orthonormal columns
  Index rank = 0;
  std::size_t n = 0;
  double rank_tol = kDefaultRankTol;

  Matrix projector() const { return q * q.adjoint(); }
};

inline SubspaceBasis subspace_basis(const HSFrameFamily& family, std::size_t n, double rank_tol = kDefaultRankTol) {
  if (n < 1 || n > family.size()) throw PreconditionError("subspace_basis: n must lie in [1, J_max]");
  SubspaceBasis b;
  b.q = linalg::orthonormal_range(family.prefix_rows(n).adjoint(), rank_tol);
  b.rank = b.q.cols();
  b.n = n;
  b.rank_tol = rank_tol;
  return b;
}

/// S_n = sum_{j < n} G_j^* G_j on the ambient space (singular off H_n).
inline Matrix partial_frame_operator(const HSFrameFamily& family, std::size_t n) {
  const auto rows = family.prefix_rows(n);
  return detail::hermitian_part(rows.adjoint() * rows);
}

namespace detail {

inline void require_nonsingular_section(const Matrix& compressed, double rank_tol, std::size_t n) {
  if (compressed.rows() == 0) throw SectionSingularError("section n=" + std::to_string(n) + " is empty");
  const RealVector ev = linalg::hermitian_eigenvalues(compressed);
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (!(lo > 0.0) || lo <= rank_tol * rank_tol * hi)
    throw SectionSingularError("sectional operator at n=" + std::to_string(n) + " is numerically singular");
}

}  // namespace detail

/// Q_n^* S_n Q_n, the sectional operator expressed in the basis of H_n.
inline Matrix sectional_operator(const HSFrameFamily& family, std::size_t n, const SubspaceBasis& basis) {
  detail::require_shape(basis.q.rows() == family.dim_h(), "sectional_operator: basis has wrong ambient dimension");
  const Matrix compressed = detail::hermitian_part(basis.q.adjoint() * partial_frame_operator(family, n) * basis.q);
  detail::require_nonsingular_section(compressed, basis.rank_tol, n);
  return compressed;
}

/// P_n f = Q_n Q_n^* f.
inline HVector project(const SubspaceBasis& basis, const HVector& f) {
  detail::require_shape(f.size() == basis.q.rows(), "project: vector has wrong dimension");
  return basis.q * (basis.q.adjoint() * f);
}

/// One nested section: basis of H_n plus the factored sectional operator.
class Section {
 public:
  Section(const HSFrameFamily& family, std::size_t n, double rank_tol = kDefaultRankTol)
      : basis_(subspace_basis(family, n, rank_tol)),
        compressed_(sectional_operator(family, n, basis_)),
        llt_(compressed_) {
    if (llt_.info() != Eigen::Success) throw SectionSingularError("sectional operator is not positive definite");
  }

  const SubspaceBasis& basis() const { return basis_; }
  const Matrix& compressed() const { return compressed_; }
  std::size_t n() const { return basis_.n; }
  Index rank() const { return basis_.rank; }

  /// S_n^{-1} P_n v.
  HVector inverse_apply(const HVector& v) const {
    return basis_.q * Vector(llt_.solve(basis_.q.adjoint() * v));
  }

 private:
  SubspaceBasis basis_;
  Matrix compressed_;
  Eigen::LLT<Matrix> llt_;
};

/// P_n f through the frame formula sum_{j<n} S_n^{-1} G_j^* G_j f.
inline HVector project_by_frame_formula(const HSFrameFamily& family, const Section& section, const HVector& f) {
  return detail::pairwise_sum(0, section.n(), [&](std::size_t j) {
    const Matrix& b = family.map(j).block();
    return section.inverse_apply(b.adjoint() * (b * f));
  });
}

/// S_n^{-1} P_n f.
inline HVector plain_inverse_apply(const HSFrameFamily& family, std::size_t n, const HVector& f,
                                   double rank_tol = kDefaultRankTol) {
  detail::require_shape(f.size() == family.dim_h(), "plain_inverse_apply: vector has wrong dimension");
  return Section(family, n, rank_tol).inverse_apply(f);
}

/// Frame-level data shared by every section of one family: S, its factorization and bounds.
class FrameContext {
 public:
  explicit FrameContext(const HSFrameFamily& family, double rank_tol = kDefaultRankTol)
      : family_(family), rank_tol_(rank_tol), s_(frame_operator(family)), llt_(s_) {
    detail::require_frame(family, rank_tol, "projection");
    if (llt_.info() != Eigen::Success) throw NumericError("frame operator is not positive definite");
    const RealVector ev = linalg::hermitian_eigenvalues(s_);
    bounds_ = {ev(0), ev(ev.size() - 1)};
  }

  const HSFrameFamily& family() const { return family_; }
  double rank_tol() const { return rank_tol_; }
  const Matrix& frame_operator_matrix() const { return s_; }
  FrameBounds bounds() const { return bounds_; }
  HVector inverse_apply(const HVector& v) const { return llt_.solve(v); }

 private:
  const HSFrameFamily& family_;
  double rank_tol_;
  Matrix s_;
  Eigen::LLT<Matrix> llt_;
  FrameBounds bounds_;
};

/// Result of the oversampled solve together with its norm certificates.
struct OversampledSolve {
  HVector x;
  std::size_t m = 0;           // oversampling amount m(n)
  double lambda_min = 0.0;     // smallest eigenvalue of Q_n^* S_{n+m} Q_n
  double lambda_max = 0.0;     // largest eigenvalue of Q_n^* S_{n+m} Q_n = ||P_n S_{n+m}|| on H_n
  double inverse_norm = 0.0;   // ||(P_n S_{n+m})^{-1}|| on H_n
};

namespace detail {

struct OversamplingSearch {
  std::size_t m = 0;
  Matrix compressed;  // Q_n^* S_{n+m} Q_n
  double lambda_min = 0.0;
};

// Linear scan m = 0, 1, ... until lambda_min(Q^* S_{n+m} Q) >= A / lambda.
inline OversamplingSearch search_oversampling(const HSFrameFamily& family, const SubspaceBasis& basis, double lambda,
                                              double lower_bound) {
  if (!(lambda > 1.0)) throw PreconditionError("oversampling: lambda must exceed 1");
  const std::size_t n = basis.n;
  const double target = lower_bound / lambda;
  const Matrix qa = family.analysis_matrix() * basis.q;  // rows: G_j Q blocks
  const Index m_rows = family.block_rows();
  OversamplingSearch s;
  {
    const auto head = qa.topRows(static_cast<Index>(n) * m_rows);
    s.compressed = hermitian_part(head.adjoint() * head);
  }
  for (std::size_t m = 0;; ++m) {
    s.m = m;
    s.lambda_min = linalg::min_eigenvalue(s.compressed);
    if (s.lambda_min >= target) return s;
    if (n + m >= family.size()) break;
    const auto blk = qa.middleRows(static_cast<Index>(n + m) * m_rows, m_rows);
    s.compressed += hermitian_part(blk.adjoint() * blk);
  }
  throw ConsistencyError("oversampling: full family does not reach A/lambda on H_n");
}

}  // namespace detail

/// Smallest m >= 0 with lambda_min(Q_n^* S_{n+m} Q_n) >= A / lambda.
inline std::size_t find_oversampling(const HSFrameFamily& family, std::size_t n, double lambda, double lower_bound,
                                     double rank_tol = kDefaultRankTol) {
  return detail::search_oversampling(family, subspace_basis(family, n, rank_tol), lambda, lower_bound).m;
}

/// (P_n S_{n+m(n)})^{-1} P_n f, checking ||P_n S_{n+m}|| <= B and ||(P_n S_{n+m})^{-1}|| <= lambda / A.
inline OversampledSolve oversampled_inverse_apply(const FrameContext& ctx, const SubspaceBasis& basis, double lambda,
                                                  const HVector& f) {
  const FrameBounds fb = ctx.bounds();
  const detail::OversamplingSearch s = detail::search_oversampling(ctx.family(), basis, lambda, fb.lower);
  OversampledSolve out;
  out.m = s.m;
  const RealVector ev = linalg::hermitian_eigenvalues(s.compressed);
  out.lambda_min = ev(0);
  out.lambda_max = ev(ev.size() - 1);
  out.inverse_norm = 1.0 / out.lambda_min;
  const double slack = 1e-12 * std::max(1.0, fb.upper);
  if (out.lambda_max > fb.upper + slack)
    throw ConsistencyError("oversampled section exceeds the upper frame bound");
  if (out.inverse_norm > lambda / fb.lower + 1e-12 * std::max(1.0, lambda / fb.lower))
    throw ConsistencyError("oversampled section inverse exceeds lambda / A");
  Eigen::LLT<Matrix> llt(s.compressed);
  if (llt.info() != Eigen::Success) throw ConsistencyError("oversampled section is not positive definite");
  out.x = basis.q * Vector(llt.solve(basis.q.adjoint() * f));
  return out;
}

inline OversampledSolve oversampled_inverse_apply(const HSFrameFamily& family, std::size_t n, double lambda,
                                                  const HVector& f, double rank_tol = kDefaultRankTol) {
  detail::require_shape(f.size() == family.dim_h(), "oversampled_inverse_apply: vector has wrong dimension");
  const FrameContext ctx(family, rank_tol);
  return oversampled_inverse_apply(ctx, subspace_basis(family, n, rank_tol), lambda, f);
}

/// Diagnostics of one section of the sweep.
struct ConvergenceRecord {
  std::size_t n = 0;
  std::size_t m_n = 0;
  Index r_n = 0;
  double err_plain = 0.0;        // ||S_n^{-1} P_n f - S^{-1} f||
  double err_oversampled = 0.0;  // ||(P_n S_{n+m})^{-1} P_n f - S^{-1} f||
  double crit2 = 0.0;            // ||(S - S_n) S_n^{-1} P_n f||
  double crit3 = 0.0;            // sum_{j >= n} ||G_j S_n^{-1} P_n f||^2
  double strong_residual = 0.0;  // sum_{j < n} |<f, S_n^{-1} G_j^* G_j f - S^{-1} G_j^* G_j f>|^2
  double projection_error = 0.0; // ||P_n f - f||
  double section_lambda_min = 0.0;
  double section_lambda_max = 0.0;
  double section_inverse_norm = 0.0;
  bool singular = false;
};

inline ConvergenceRecord convergence_record(const FrameContext& ctx, std::size_t n, const HVector& f, double lambda,
                                            const HVector& truth) {
  const HSFrameFamily& family = ctx.family();
  ConvergenceRecord rec;
  rec.n = n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const Section section(family, n, ctx.rank_tol());
    rec.r_n = section.rank();
    const HVector x = section.inverse_apply(f);
    rec.err_plain = (x - truth).norm();
    rec.projection_error = (project(section.basis(), f) - f).norm();

    const Matrix& phi = family.analysis_matrix();
    const Index head_rows = static_cast<Index>(n) * family.block_rows();
    const auto tail = phi.bottomRows(phi.rows() - head_rows);
    const Vector tail_x = tail * x;
    rec.crit3 = tail_x.squaredNorm();
    rec.crit2 = (tail.adjoint() * tail_x).norm();

    double strong = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix& b = family.map(j).block();
      const HVector v = b.adjoint() * (b * f);
      const Scalar ip = (section.inverse_apply(v) - ctx.inverse_apply(v)).dot(f);
      strong += std::norm(ip);
    }
    rec.strong_residual = strong;

    const OversampledSolve os = oversampled_inverse_apply(ctx, section.basis(), lambda, f);
    rec.m_n = os.m;
    rec.err_oversampled = (os.x - truth).norm();
    rec.section_lambda_min = os.lambda_min;
    rec.section_lambda_max = os.lambda_max;
    rec.section_inverse_norm = os.inverse_norm;
  } catch (const SectionSingularError&) {
    rec.singular = true;
    rec.err_plain = rec.err_oversampled = rec.crit2 = rec.crit3 = rec.strong_residual = nan;
  }
  return rec;
}

/// Runs every section of the schedule against the full-family ground truth S^{-1} f.
inline std::vector<ConvergenceRecord> convergence_sweep(const HSFrameFamily& family, const SectionSchedule& schedule,
                                                        const HVector& f, double lambda = 2.0,
                                                        double rank_tol = kDefaultRankTol) {
  detail::require_shape(f.size() == family.dim_h(), "convergence_sweep: vector has wrong dimension");
  if (!(lambda > 1.0)) throw PreconditionError("convergence_sweep: lambda must exceed 1");
  const FrameContext ctx(family, rank_tol);
  const HVector truth = ctx.inverse_apply(f);
  std::vector<ConvergenceRecord> out;
  out.reserve(schedule.size());
  for (std::size_t n : schedule) out.push_back(convergence_record(ctx, n, f, lambda, truth));
  return out;
}

struct UniformBoundEntry {
  std::size_t n = 0;
  double value = 0.0;  // ||S_n^{-1} G_j^* G_j f||
  bool singular = false;
};

struct UniformBoundScan {
  double c_j = 0.0;
  std::vector<UniformBoundEntry> profile;
};

/// Profile of ||S_n^{-1} G_j^* G_j f|| over every n whose prefix contains index j (0-based).
inline UniformBoundScan uniform_bound_scan(const HSFrameFamily& family, std::size_t j, const HVector& f,
                                           double rank_tol = kDefaultRankTol) {
  if (j >= family.size()) throw PreconditionError("uniform_bound_scan: index out of range");
  detail::require_shape(f.size() == family.dim_h(), "uniform_bound_scan: vector has wrong dimension");
  detail::require_frame(family, rank_tol, "uniform_bound_scan");
  const Matrix& b = family.map(j).block();
  const HVector v = b.adjoint() * (b * f);
  UniformBoundScan scan;
  for (std::size_t n = j + 1; n <= family.size(); ++n) {
    UniformBoundEntry e;
    e.n = n;
    try {
      e.value = Section(family, n, rank_tol).inverse_apply(v).norm();
      scan.c_j = std::max(scan.c_j, e.value);
    } catch (const SectionSingularError&) {
      e.singular = true;
      e.value = std::numeric_limits<double>::quiet_NaN();
    }
    scan.profile.push_back(e);
  }
  return scan;
}

struct KernelConsistencyEntry {
  std::size_t n = 0;
  double statement1_residual = 0.0;  // ||sum_{j<n} S_n^{-1} G_j^*(A_j) - sum_j S^{-1} G_j^*(A_j)||
  double statement2_norm = 0.0;      // ||S_n^{-1} sum_{j<n} G_j^*(F_j)|| for the kernel part F
  double projection_residual = 0.0;  // ||P_n g - g||
  double split_error = 0.0;          // gap in: statement1 vector = (P_n g - g) + statement2 vector
};

struct KernelConsistencyReport {
  HVector g;                 // range part: c = T^* g + F
  CoefficientSequence kernel_part;
  double kernel_norm = 0.0;
  std::vector<KernelConsistencyEntry> profile;
  bool statement1_vanishes = false;
  bool statement2_vanishes = false;
  bool co_vanish = false;  // both vanish or both persist at the end of the schedule
  double tol = 0.0;
};

/// Splits c along range(T^*) (+) ker(T) and evaluates both limit statements along the schedule.
inline KernelConsistencyReport kernel_consistency(const HSFrameFamily& family, const CoefficientSequence& c,
                                                  const SectionSchedule& schedule, double rank_tol = kDefaultRankTol) {
  detail::require_shape(c.size() == family.size() && c.dim_k() == family.dim_k(),
                        "kernel_consistency: coefficients do not match the family");
  const FrameContext ctx(family, rank_tol);
  const Matrix& phi = family.analysis_matrix();
  const Vector cv = c.stacked();
  KernelConsistencyReport rep;
  rep.g = ctx.inverse_apply(phi.adjoint() * cv);
  const Vector kernel = cv - phi * rep.g;
  rep.kernel_part = CoefficientSequence::from_stacked(kernel, family.dim_k());
  rep.kernel_norm = kernel.norm();
  rep.tol = 1e-10 * std::max(1.0, cv.norm());
  for (std::size_t n : schedule) {
    const Section section(family, n, rank_tol);
    const Index rows = static_cast<Index>(n) * family.block_rows();
    const auto head = phi.topRows(rows);
    const HVector s1 = section.inverse_apply(head.adjoint() * cv.head(rows)) - rep.g;
    const HVector s2 = section.inverse_apply(head.adjoint() * kernel.head(rows));
    const HVector pg = project(section.basis(), rep.g) - rep.g;
    KernelConsistencyEntry e;
    e.n = n;
    e.statement1_residual = s1.norm();
    e.statement2_norm = s2.norm();
    e.projection_residual = pg.norm();
    e.split_error = (s1 - (pg + s2)).norm();
    rep.profile.push_back(e);
  }
  const auto& last = rep.profile.back();
  rep.statement1_vanishes = last.statement1_residual <= rep.tol;
  rep.statement2_vanishes = last.statement2_norm <= rep.tol;
  rep.co_vanish = rep.statement1_vanishes == rep.statement2_vanishes;
  return rep;
}

}  // namespace hsframe
