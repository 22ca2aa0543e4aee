#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "family.hpp"
#include "frame.hpp"
#include "linalg.hpp"
#include "types.hpp"

// Stability of HS-frames under perturbation: the invertibility lemma,
// condition checkers at analysis / synthesis / frame-operator level, the
// predicted bound formulas and constructors of certified perturbations.
//
// A condition has the shape ||L x|| <= sum_k c_k ||R_k x|| over a domain
// (H or the coefficient space). With at most one nonzero c_k it is a
// quadratic-form inequality c^2 R^* R - L^* L >= 0 and is certified exactly
// by an eigenvalue test; otherwise it is only checked on samples.

namespace hsframe {

struct PerturbationConstants {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu = 0.0;
  double nu = 0.0;  // frame-operator mode only
};

enum class ConditionMode { analysis, synthesis, frame_operator, synthesis_coefficient };

inline std::string to_string(ConditionMode m) {
  switch (m) {
    case ConditionMode::analysis: return "analysis";
    case ConditionMode::synthesis: return "synthesis";
    case ConditionMode::frame_operator: return "frame-operator";
    case ConditionMode::synthesis_coefficient: return "synthesis-coefficient";
  }
  return "unknown";
}

inline ConditionMode parse_condition_mode(const std::string& s) {
  if (s == "analysis") return ConditionMode::analysis;
  if (s == "synthesis") return ConditionMode::synthesis;
  if (s == "frame-operator") return ConditionMode::frame_operator;
  if (s == "synthesis-coefficient") return ConditionMode::synthesis_coefficient;
  throw PreconditionError("unknown condition mode '" + s + "'");
}

namespace detail {

inline void require_nonnegative(const PerturbationConstants& c) {
  if (!(c.lambda1 >= 0.0 && c.lambda2 >= 0.0 && c.mu >= 0.0 && c.nu >= 0.0))
    throw PreconditionError("perturbation constants must be nonnegative");
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Lower and upper bounds of the perturbed family,
///   A (1 - (l1 + l2 + mu/sqrt(A)) / (1 + l2))^2,  B (1 + (l1 + l2 + mu/sqrt(B)) / (1 - l2))^2.
///
/// The squares are expanded as 1 - s(2 - s) and 1 + t(2 + t), which avoids
/// rounding 1 - s before squaring.
inline FrameBounds predicted_bounds(double a, double b, double lambda1, double lambda2, double mu) {
  if (!(a > 0.0 && b >= a)) throw PreconditionError("predicted_bounds: need 0 < A <= B");
  detail::require_nonnegative({lambda1, lambda2, mu, 0.0});
  const double first = lambda1 + mu / std::sqrt(a);
  if (!(first < 1.0))
    throw PreconditionError("inadmissible constants: lambda1 + mu/sqrt(A) = " + detail::fmt(first) + " must be < 1");
  if (!(lambda2 < 1.0))
    throw PreconditionError("inadmissible constants: lambda2 = " + detail::fmt(lambda2) + " must be < 1");
  const double s = (lambda1 + lambda2 + mu / std::sqrt(a)) / (1.0 + lambda2);
  const double t = (lambda1 + lambda2 + mu / std::sqrt(b)) / (1.0 - lambda2);
  return {a * (1.0 - s * (2.0 - s)), b * (1.0 + t * (2.0 + t))};
}

/// Bounds A [1 - (M/A)^{1/2}]^2 and B [1 + (M/B)^{1/2}]^2 for an analysis deviation M < A.
inline FrameBounds predicted_bounds_simple(double a, double b, double m) {
  if (!(m >= 0.0 && m < a)) throw PreconditionError("predicted_bounds_simple: need 0 <= M < A");
  return predicted_bounds(a, b, 0.0, 0.0, std::sqrt(m));
}

/// Smallest M with sum_j ||(G_j - Gamma_j) f||^2 <= M ||f||^2.
inline double analysis_deviation(const HSFrameFamily& g, const HSFrameFamily& gamma) {
  detail::require_shape(g.size() == gamma.size() && g.dim_h() == gamma.dim_h() && g.dim_k() == gamma.dim_k(),
                        "analysis_deviation: families differ in size or dimensions");
  const double s = linalg::spectral_norm(g.analysis_matrix() - gamma.analysis_matrix());
  return s * s;
}

struct Admissibility {
  double first = 0.0;   // lambda1 + mu/sqrt(A) (+ nu sqrt(D)/A)
  double second = 0.0;  // lambda2
  bool ok = false;
  std::string violated;  // human-readable inequality when !ok
};

/// max(lambda1 + mu/sqrt(A), lambda2) < 1, with the nu sqrt(D)/A term in frame-operator mode.
inline Admissibility admissibility(ConditionMode mode, double a, double d, const PerturbationConstants& c) {
  Admissibility adm;
  adm.first = c.lambda1 + c.mu / std::sqrt(a);
  if (mode == ConditionMode::frame_operator) adm.first += c.nu * std::sqrt(d) / a;
  adm.second = c.lambda2;
  adm.ok = adm.first < 1.0 && adm.second < 1.0;
  if (!(adm.first < 1.0)) {
    adm.violated = (mode == ConditionMode::frame_operator ? "lambda1 + mu/sqrt(A) + nu*sqrt(D)/A = "
                                                          : "lambda1 + mu/sqrt(A) = ") +
                   detail::fmt(adm.first) + " must be < 1";
  } else if (!(adm.second < 1.0)) {
    adm.violated = "lambda2 = " + detail::fmt(adm.second) + " must be < 1";
  }
  return adm;
}

struct PerturbationVerdict {
  ConditionMode mode = ConditionMode::analysis;
  PerturbationConstants constants;
  bool certified = false;  // exact quadratic-form certificate succeeded
  bool satisfied = false;  // certified, or no sampled violation when no certificate applies
  double empirical_margin = 0.0;  // min over unit samples of RHS - LHS
  std::optional<Vector> witness;  // first violating sample
  std::optional<FrameBounds> predicted;
  FrameBounds reference;  // optimal (A, B) of G
  FrameBounds actual;     // optimal (A, B) of Gamma
  bool gamma_is_frame = false;
  bool within_prediction = true;  // actual inside [A' - 1e-9, B' + 1e-9] when predicted is set
  Admissibility admissible;
  std::size_t samples = 0;
};

namespace detail {

struct ConditionTerms {
  Matrix lhs;
  std::vector<std::pair<double, Matrix>> rhs;
};

inline ConditionTerms condition_terms(ConditionMode mode, const HSFrameFamily& g, const HSFrameFamily& gamma,
                                      const PerturbationConstants& c) {
  const Matrix& pg = g.analysis_matrix();
  const Matrix& pr = gamma.analysis_matrix();
  ConditionTerms t;
  switch (mode) {
    case ConditionMode::analysis:
      t.lhs = pg - pr;
      t.rhs = {{c.lambda1, pg}, {c.lambda2, pr}, {c.mu, Matrix::Identity(g.dim_h(), g.dim_h())}};
      break;
    case ConditionMode::synthesis:
    case ConditionMode::synthesis_coefficient:
      t.lhs = (pg - pr).adjoint();
      t.rhs = {{c.lambda1, pg.adjoint()},
               {c.lambda2, pr.adjoint()},
               {c.mu, Matrix::Identity(g.coefficient_dim(), g.coefficient_dim())}};
      break;
    case ConditionMode::frame_operator: {
      const Matrix sg = frame_operator(g);
      const Matrix sr = frame_operator(gamma);
      t.lhs = sg - sr;
      t.rhs = {{c.lambda1, sg}, {c.lambda2, sr}, {c.mu, pg}, {c.nu, pr}};
      break;
    }
  }
  return t;
}

struct ExactCheck {
  bool applicable = false;
  bool holds = false;
  Vector worst;  // eigenvector of the most negative direction
};

// With at most one active term: c^2 R^* R - L^* L must be positive semidefinite.
inline ExactCheck exact_quadratic_check(const ConditionTerms& t) {
  ExactCheck out;
  const std::pair<double, Matrix>* active = nullptr;
  int count = 0;
  for (const auto& term : t.rhs) {
    if (term.first != 0.0) {
      active = &term;
      ++count;
    }
  }
  if (count > 1) return out;
  out.applicable = true;
  const Matrix ll = hermitian_part(t.lhs.adjoint() * t.lhs);
  Matrix q = -ll;
  double scale = ll.norm();
  if (active) {
    const Matrix rr = hermitian_part(active->second.adjoint() * active->second) * (active->first * active->first);
    q += rr;
    scale += rr.norm();
  }
  const linalg::HermitianEigen e = linalg::hermitian_eigen(q);
  out.holds = e.values(0) >= -1e-12 * std::max(scale, std::numeric_limits<double>::min());
  out.worst = e.vectors.col(0);
  return out;
}

struct SampleStats {
  double margin = std::numeric_limits<double>::infinity();
  std::optional<Vector> witness;
  std::size_t count = 0;
};

inline void sample_condition(const ConditionTerms& t, const Vector& x_raw, SampleStats& st) {
  const double xn = x_raw.norm();
  if (xn == 0.0) return;
  const Vector x = x_raw / xn;
  const double lhs = (t.lhs * x).norm();
  double rhs = 0.0;
  for (const auto& term : t.rhs)
    if (term.first != 0.0) rhs += term.first * (term.second * x).norm();
  const double margin = rhs - lhs;
  st.margin = std::min(st.margin, margin);
  if (!st.witness && margin < -1e-12 * std::max(1.0, lhs)) st.witness = x;
  ++st.count;
}

}  // namespace detail

/// Checks one perturbation condition of G vs Gamma and compares predicted and actual bounds.
inline PerturbationVerdict check_condition(ConditionMode mode, const HSFrameFamily& g, const HSFrameFamily& gamma,
                                           const PerturbationConstants& constants, int trials, std::uint64_t seed,
                                           double rank_tol = kDefaultRankTol) {
  detail::require_shape(g.size() == gamma.size() && g.dim_h() == gamma.dim_h() && g.dim_k() == gamma.dim_k(),
                        "check_condition: families differ in size or dimensions");
  detail::require_nonnegative(constants);
  if (trials < 0) throw PreconditionError("check_condition: trials must be >= 0");
  if (mode != ConditionMode::frame_operator && constants.nu != 0.0)
    throw PreconditionError("check_condition: nu only enters the frame-operator condition");
  const FrameReport rep_g = classify(g, rank_tol);
  if (!rep_g.frame) throw NotAFrameError("check_condition: reference family is not a frame (lower bound zero)");

  PerturbationVerdict v;
  v.mode = mode;
  v.constants = constants;
  v.reference = {rep_g.lower_bound, rep_g.upper_bound};
  v.actual = frame_bounds(gamma);
  v.admissible = admissibility(mode, v.reference.lower, v.actual.upper, constants);
  if (!v.admissible.ok) throw PreconditionError("inadmissible constants: " + v.admissible.violated);
  v.gamma_is_frame = classify(gamma, rank_tol).frame;

  const detail::ConditionTerms terms = detail::condition_terms(mode, g, gamma, constants);
  const detail::ExactCheck exact = detail::exact_quadratic_check(terms);

  detail::SampleStats st;
  linalg::Rng rng(seed);
  const Index dim = terms.lhs.cols();
  for (int k = 0; k < trials; ++k) detail::sample_condition(terms, linalg::random_gaussian(dim, 1, rng).col(0), st);
  {
    const linalg::Svd d = linalg::svd(terms.lhs);
    for (Index k = 0; k < d.v.cols(); ++k) detail::sample_condition(terms, d.v.col(k), st);
  }
  for (const auto& term : terms.rhs) {
    if (term.first == 0.0 || term.second.cols() != dim) continue;
    const linalg::Svd d = linalg::svd(term.second);
    detail::sample_condition(terms, d.v.col(0), st);
    detail::sample_condition(terms, d.v.col(d.v.cols() - 1), st);
  }
  if (mode == ConditionMode::analysis || mode == ConditionMode::frame_operator) {
    const Matrix eg = linalg::hermitian_eigen(frame_operator(g)).vectors;
    const Matrix er = linalg::hermitian_eigen(frame_operator(gamma)).vectors;
    for (Index k = 0; k < eg.cols(); ++k) detail::sample_condition(terms, eg.col(k), st);
    for (Index k = 0; k < er.cols(); ++k) detail::sample_condition(terms, er.col(k), st);
  }
  if (exact.applicable) {
    detail::sample_condition(terms, exact.worst, st);
    v.certified = exact.holds;
    v.satisfied = exact.holds;
    if (!exact.holds && !st.witness) st.witness = exact.worst;
  } else {
    v.satisfied = !st.witness.has_value();
  }
  v.empirical_margin = st.margin;
  v.witness = st.witness;
  v.samples = st.count;

  if (mode == ConditionMode::analysis || mode == ConditionMode::synthesis) {
    v.predicted = predicted_bounds(v.reference.lower, v.reference.upper, constants.lambda1, constants.lambda2,
                                   constants.mu);
    v.within_prediction =
        v.actual.lower >= v.predicted->lower - 1e-9 && v.actual.upper <= v.predicted->upper + 1e-9;
  }
  return v;
}

enum class PerturbationKind { additive_analysis, scale, blockwise };

inline std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::additive_analysis: return "additive-analysis";
    case PerturbationKind::scale: return "scale";
    case PerturbationKind::blockwise: return "blockwise";
  }
  return "unknown";
}

inline PerturbationKind parse_perturbation_kind(const std::string& s) {
  if (s == "additive-analysis" || s == "additive") return PerturbationKind::additive_analysis;
  if (s == "scale") return PerturbationKind::scale;
  if (s == "blockwise") return PerturbationKind::blockwise;
  throw PreconditionError("unknown perturbation mode '" + s + "'");
}

struct PerturbedFamily {
  HSFrameFamily family;
  PerturbationConstants constants;     // certified for the analysis (and synthesis) condition
  std::vector<std::size_t> perturbed;  // indices whose maps changed
};

/// Manufactures Gamma from G together with constants it provably satisfies.
///
/// additive-analysis: Gamma = G - Delta with ||Delta|| = magnitude, constants (0, 0, magnitude).
/// scale:             Gamma_j = (1 - magnitude) G_j, constants (magnitude, 0, 0).
/// blockwise:         like additive, but Delta only touches a seeded subset of indices.
inline PerturbedFamily perturb_family(const HSFrameFamily& g, PerturbationKind kind, double magnitude,
                                      std::uint64_t seed) {
  if (!(magnitude >= 0.0)) throw PreconditionError("perturb_family: magnitude must be >= 0");
  PerturbedFamily out{g, {}, {}};
  if (magnitude == 0.0) return out;
  const Matrix& phi = g.analysis_matrix();
  const Index m = g.block_rows();
  linalg::Rng rng(seed);
  switch (kind) {
    case PerturbationKind::scale:
      out.family = HSFrameFamily::from_analysis_matrix(g.dim_k(), phi * (1.0 - magnitude));
      out.constants.lambda1 = magnitude;
      for (std::size_t j = 0; j < g.size(); ++j) out.perturbed.push_back(j);
      break;
    case PerturbationKind::additive_analysis:
    case PerturbationKind::blockwise: {
      Matrix delta = linalg::random_gaussian(phi.rows(), phi.cols(), rng);
      if (kind == PerturbationKind::blockwise) {
        std::bernoulli_distribution pick(0.5);
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (pick(rng)) out.perturbed.push_back(j);
        }
        if (out.perturbed.empty()) out.perturbed.push_back(static_cast<std::size_t>(seed % g.size()));
        Matrix masked = Matrix::Zero(phi.rows(), phi.cols());
        for (std::size_t j : out.perturbed) {
          const Index r = static_cast<Index>(j) * m;
          masked.middleRows(r, m) = delta.middleRows(r, m);
        }
        delta = std::move(masked);
      } else {
        for (std::size_t j = 0; j < g.size(); ++j) out.perturbed.push_back(j);
      }
      delta *= magnitude / linalg::spectral_norm(delta);
      out.family = HSFrameFamily::from_analysis_matrix(g.dim_k(), phi - delta);
      out.constants.mu = magnitude;
      break;
    }
  }
  return out;
}

enum class RieszStatus { preserved, violated, inconclusive };

inline std::string to_string(RieszStatus s) {
  switch (s) {
    case RieszStatus::preserved: return "preserved";
    case RieszStatus::violated: return "violated";
    case RieszStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct RieszStabilityVerdict {
  RieszStatus status = RieszStatus::inconclusive;
  PerturbationVerdict condition;
  FrameReport gamma_report;
  bool within_prediction = false;
};

/// Riesz basis G and a synthesis-level perturbation: Gamma must stay Riesz with bounds in the predicted interval.
inline RieszStabilityVerdict riesz_stability_check(const HSFrameFamily& g, const HSFrameFamily& gamma,
                                                   const PerturbationConstants& constants, int trials,
                                                   std::uint64_t seed, double rank_tol = kDefaultRankTol) {
  if (!classify(g, rank_tol).riesz) throw PreconditionError("riesz_stability_check: reference family is not Riesz");
  RieszStabilityVerdict out;
  out.condition = check_condition(ConditionMode::synthesis, g, gamma, constants, trials, seed, rank_tol);
  if (!out.condition.satisfied) return out;
  out.gamma_report = classify(gamma, rank_tol);
  if (out.gamma_report.riesz) {
    const FrameBounds& p = *out.condition.predicted;
    out.within_prediction =
        *out.gamma_report.riesz_lower >= p.lower - 1e-9 && *out.gamma_report.riesz_upper <= p.upper + 1e-9;
  }
  out.status = out.gamma_report.riesz && out.within_prediction ? RieszStatus::preserved : RieszStatus::violated;
  return out;
}

struct CCLemmaReport {
  bool certified = false;
  bool satisfied = false;
  bool invertible = false;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double empirical_margin = 0.0;      // min over unit samples of l1 + l2 ||Ux|| - ||Ux - x||
  bool sandwich_ok = false;
  double max_sandwich_violation = 0.0;  // relative
  std::size_t samples = 0;
};

/// Checks ||Ux - x|| <= l1 ||x|| + l2 ||Ux|| and, when it holds, the four norm sandwiches
///   (1-l1)/(1+l2) <= ||Ux||/||x|| <= (1+l1)/(1-l2),  (1-l2)/(1+l1) <= ||U^{-1}x||/||x|| <= (1+l2)/(1-l1).
///
/// Certificates: ||I - U|| <= l1 + l2 sigma_min(U) (always sufficient), or the
/// quadratic form l2^2 U^*U - (I-U)^*(I-U) >= 0 when l1 = 0.
inline CCLemmaReport cc_lemma_check(const Matrix& u, double lambda1, double lambda2, int trials, std::uint64_t seed) {
  if (!(lambda1 >= 0.0 && lambda1 < 1.0 && lambda2 >= 0.0 && lambda2 < 1.0))
    throw PreconditionError("cc_lemma_check: lambda1, lambda2 must lie in [0, 1)");
  detail::require_shape(u.rows() == u.cols() && u.rows() > 0, "cc_lemma_check: U must be square");
  if (trials < 0) throw PreconditionError("cc_lemma_check: trials must be >= 0");
  const Index d = u.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix diff = id - u;
  const linalg::Svd su = linalg::svd(u);
  const linalg::Svd sd = linalg::svd(diff);
  CCLemmaReport rep;
  rep.sigma_max = su.values(0);
  rep.sigma_min = su.values(d - 1);

  const double slack = 1e-12 * std::max(1.0, rep.sigma_max);
  if (sd.values(0) <= lambda1 + lambda2 * rep.sigma_min + slack) rep.certified = true;
  if (!rep.certified && lambda1 == 0.0) {
    detail::ConditionTerms t{diff, {{lambda2, u}}};
    rep.certified = detail::exact_quadratic_check(t).holds;
  }

  std::vector<Vector> xs;
  linalg::Rng rng(seed);
  for (int k = 0; k < trials; ++k) xs.push_back(linalg::random_unit_vector(d, rng));
  for (Index k = 0; k < d; ++k) {
    xs.push_back(su.v.col(k));
    xs.push_back(sd.v.col(k));
  }
  rep.empirical_margin = std::numeric_limits<double>::infinity();
  bool violated = false;
  for (const auto& x : xs) {
    const double ux = (u * x).norm();
    const double lhs = (u * x - x).norm();
    const double margin = lambda1 + lambda2 * ux - lhs;
    rep.empirical_margin = std::min(rep.empirical_margin, margin);
    if (margin < -1e-12 * std::max(1.0, lhs)) violated = true;
  }
  rep.samples = xs.size();
  rep.satisfied = rep.certified || !violated;
  if (!rep.satisfied) return rep;

  rep.invertible = rep.sigma_min > 0.0;
  if (!rep.invertible) return rep;
  const double lo_u = (1.0 - lambda1) / (1.0 + lambda2);
  const double hi_u = (1.0 + lambda1) / (1.0 - lambda2);
  const double lo_inv = (1.0 - lambda2) / (1.0 + lambda1);
  const double hi_inv = (1.0 + lambda2) / (1.0 - lambda1);
  Eigen::PartialPivLU<Matrix> lu(u);
  double worst = 0.0;
  auto excess = [](double value, double lo, double hi) {
    return std::max({0.0, (lo - value) / std::max(lo, 1e-300), (value - hi) / hi});
  };
  for (const auto& x : xs) {
    const double ux = (u * x).norm();
    const double uix = Vector(lu.solve(x)).norm();
    worst = std::max({worst, excess(ux, lo_u, hi_u), excess(uix, lo_inv, hi_inv)});
  }
  rep.max_sandwich_violation = worst;
  rep.sandwich_ok = worst <= 1e-10;
  return rep;
}

}  // namespace hsframe
