#include <gtest/gtest.h>

#include "support.hpp"

using namespace hsframe;
using namespace testing_support;

namespace {

HVector vec2(Scalar a, Scalar b) {
  HVector v(2);
  v << a, b;
  return v;
}

HSFrameFamily e1_e1_e2() { return from_scalar_frame({vec2(1, 0), vec2(1, 0), vec2(0, 1)}); }

HSFrameFamily e1_e2_diag() {
  const double r = 1.0 / std::sqrt(2.0);
  return from_scalar_frame({vec2(1, 0), vec2(0, 1), vec2(r, r)});
}

double op_norm(const Matrix& m) { return linalg::spectral_norm(m); }

}  // namespace

TEST(Schedule, ParseAndValidate) {
  EXPECT_EQ(SectionSchedule::parse("prefix:all", 3).prefixes(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(SectionSchedule::parse("1,4,6", 6).prefixes(), (std::vector<std::size_t>{1, 4, 6}));
  EXPECT_THROW(SectionSchedule::parse("1,7", 6), PreconditionError);
  EXPECT_THROW(SectionSchedule::parse("2,2", 6), PreconditionError);
  EXPECT_THROW(SectionSchedule::parse("0,1", 6), PreconditionError);
  EXPECT_THROW(SectionSchedule::parse("1,x", 6), PreconditionError);
}

TEST(SubspaceBasis, Examples) {
  const SubspaceBasis b = subspace_basis(onb_family(2), 1);
  EXPECT_EQ(b.rank, 1);
  EXPECT_NEAR(std::abs(b.q(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(b.q(1, 0)), 0.0, 1e-15);

  const auto fam = random_family(6, 2, 3, SpectrumSpec::geometric(0.5), 2);
  const SubspaceBasis full = subspace_basis(fam, 3);
  EXPECT_EQ(full.rank, 6);
  EXPECT_LE((full.q.adjoint() * full.q - Matrix::Identity(6, 6)).norm(), 1e-10);

  EXPECT_EQ(subspace_basis(e1_e1_e2(), 2).rank, 1);
  EXPECT_THROW(subspace_basis(e1_e1_e2(), 0), PreconditionError);
  EXPECT_THROW(subspace_basis(e1_e1_e2(), 4), PreconditionError);
}

TEST(SubspaceBasis, Nesting) {
  const auto fam = decaying_family(10, 1, 20, 0.5, 3);
  for (std::size_t n = 1; n < fam.size(); ++n) {
    const Matrix p = subspace_basis(fam, n).projector();
    const Matrix p1 = subspace_basis(fam, n + 1).projector();
    EXPECT_LE(op_norm(p * p1 - p), 1e-10);
    EXPECT_LE(op_norm(p1 * p - p), 1e-10);
  }
}

TEST(SectionalOperator, Examples) {
  const auto onb = onb_family(4);
  EXPECT_LE((sectional_operator(onb, 3, subspace_basis(onb, 3)) - Matrix::Identity(3, 3)).norm(), 1e-15);

  const auto d = e1_e1_e2();
  const Matrix s2 = sectional_operator(d, 2, subspace_basis(d, 2));
  ASSERT_EQ(s2.rows(), 1);
  EXPECT_NEAR(s2(0, 0).real(), 2.0, 1e-15);

  const auto fam = random_family(5, 1, 9, SpectrumSpec::explicit_list({5, 4, 3, 2, 1}), 7);
  const RealVector ev = linalg::hermitian_eigenvalues(sectional_operator(fam, 9, subspace_basis(fam, 9)));
  const RealVector full = linalg::hermitian_eigenvalues(frame_operator(fam));
  EXPECT_LE((ev - full).norm(), 1e-12);
}

TEST(SectionalOperator, EmptySectionIsSingular) {
  const auto fam = from_scalar_frame({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
  EXPECT_THROW(sectional_operator(fam, 1, subspace_basis(fam, 1)), SectionSingularError);
}

TEST(Project, ExamplesAndFrameFormula) {
  const auto fam = e1_e2_diag();
  const SubspaceBasis b = subspace_basis(fam, 1);
  EXPECT_LE((project(b, vec2(1, 1)) - vec2(1, 0)).norm(), 1e-15);
  EXPECT_LE((project(b, vec2(3, 0)) - vec2(3, 0)).norm(), 1e-15);
  EXPECT_LE(project(b, vec2(0, 2)).norm(), 1e-15);

  const auto dec = decaying_family(8, 2, 12, 0.5, 4);
  const HVector f = random_vector(8, 5);
  for (std::size_t n = 1; n <= dec.size(); ++n) {
    const Section s(dec, n);
    const HVector p = project(s.basis(), f);
    EXPECT_LE((p - project_by_frame_formula(dec, s, f)).norm(), 1e-9 * f.norm()) << n;
    EXPECT_LE((project(s.basis(), p) - p).norm(), 1e-12 * f.norm());
    EXPECT_LE((s.basis().projector() - s.basis().projector().adjoint()).norm(), 1e-14);
  }
}

TEST(PlainInverse, Examples) {
  const auto onb = onb_family(3);
  const HVector f = random_vector(3, 1);
  const SubspaceBasis b = subspace_basis(onb, 2);
  EXPECT_LE((plain_inverse_apply(onb, 2, f) - project(b, f)).norm(), 1e-15);

  const auto fam = random_family(5, 1, 8, SpectrumSpec::geometric(0.6), 3);
  const HVector g = random_vector(5, 2);
  EXPECT_LE((plain_inverse_apply(fam, 8, g) - FrameContext(fam).inverse_apply(g)).norm(), 1e-12 * g.norm());

  EXPECT_LE((plain_inverse_apply(e1_e1_e2(), 2, vec2(4, 7)) - vec2(2, 0)).norm(), 1e-15);
}

TEST(PlainInverse, MatchesOracleSectionSolve) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 5; ++t) {
    oracle::ScalarFrame of;
    for (int j = 0; j < 9; ++j) of.vectors.push_back(random_oracle_vector(4, rng));
    const auto fam = from_oracle(of);
    const oracle::Vec x = random_oracle_vector(4, rng);
    for (std::size_t n = 1; n <= 9; ++n) {
      const HVector lib = plain_inverse_apply(fam, n, from_oracle(x));
      const HVector ref = from_oracle(oracle::section_inverse_apply(of, n, x));
      EXPECT_LE((lib - ref).norm(), 1e-10 * std::max(1.0, ref.norm())) << n;
    }
  }
}

TEST(ConvergenceSweep, OnbFamily) {
  const auto onb = onb_family(5);
  const HVector f = random_vector(5, 3);
  const auto recs = convergence_sweep(onb, SectionSchedule::all(5), f);
  for (const auto& r : recs) {
    EXPECT_NEAR(r.err_plain, f.tail(static_cast<Index>(5 - r.n)).norm(), 1e-14);
    // S_n^{-1} P_n f = P_n f already lies in H_n, so (S - S_n) annihilates it.
    EXPECT_NEAR(r.crit2, 0.0, 1e-15);
    EXPECT_NEAR(r.crit3, 0.0, 1e-30);
    EXPECT_EQ(r.m_n, 0u);
    EXPECT_FALSE(r.singular);
  }
}

TEST(ConvergenceSweep, FullSectionIsExact) {
  for (const auto& fc : family_pool()) {
    const HVector f = random_vector(fc.family.dim_h(), 9);
    const auto recs =
        convergence_sweep(fc.family, SectionSchedule({fc.family.size()}, fc.family.size()), f);
    EXPECT_LE(recs.back().err_plain, 1e-10 * std::max(1.0, f.norm() / fc.expected.lower)) << fc.label;
    EXPECT_LE(recs.back().err_oversampled, 1e-10 * std::max(1.0, f.norm() / fc.expected.lower)) << fc.label;
  }
}

TEST(ConvergenceSweep, ThreeVectorClosedForm) {
  // S^{-1} f = (1/2, 1/2); n = 1 gives (1, 0), n = 2 gives (1, 1), n = 3 is exact.
  const auto recs = convergence_sweep(e1_e2_diag(), SectionSchedule::all(3), vec2(1, 1));
  EXPECT_NEAR(recs[0].err_plain, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(recs[1].err_plain, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(recs[2].err_plain, 0.0, 1e-15);
  EXPECT_GT(recs[0].err_plain, recs[2].err_plain);
}

TEST(ConvergenceSweep, SingularSectionFlaggedAndSweepContinues) {
  const auto fam = from_scalar_frame({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
  const auto recs = convergence_sweep(fam, SectionSchedule::all(3), vec2(1, 2));
  EXPECT_TRUE(recs[0].singular);
  EXPECT_TRUE(std::isnan(recs[0].err_plain));
  EXPECT_FALSE(recs[1].singular);
  EXPECT_NEAR(recs[2].err_plain, 0.0, 1e-15);
}

TEST(ConvergenceSweep, ProofChainInequalities) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto fam = decaying_family(12, 1 + seed % 2, 48, 0.5, seed);
    const FrameBounds fb = frame_bounds(fam);
    const HVector f = random_vector(12, 100 + seed);
    const double fn = f.norm();
    const double slack = 1e-12 * fn / fb.lower;
    for (const auto& r : convergence_sweep(fam, SectionSchedule::all(fam.size()), f)) {
      ASSERT_FALSE(r.singular);
      EXPECT_LE(r.err_plain, (r.projection_error + r.crit2) / fb.lower + slack) << r.n;
      // Sharp form sqrt(B) and the looser B form (B >= 1 here).
      EXPECT_LE(r.crit2, std::sqrt(fb.upper) * std::sqrt(r.crit3) + slack) << r.n;
      EXPECT_LE(r.crit2, fb.upper * std::sqrt(r.crit3) + slack) << r.n;
      const double strong_floor = std::pow(1e-12 * fb.upper * fn * fn / fb.lower, 2) * static_cast<double>(r.n);
      EXPECT_LE(r.strong_residual, fb.upper * fb.upper * r.err_plain * r.err_plain * fn * fn + strong_floor) << r.n;
      EXPECT_GE(r.section_lambda_min, fb.lower / 2.0 - 1e-12) << r.n;
      EXPECT_LE(r.section_lambda_max, fb.upper + 1e-12) << r.n;
      EXPECT_LE(r.section_inverse_norm, 2.0 / fb.lower + 1e-12) << r.n;
    }
  }
}

TEST(ConvergenceSweep, DecayingFamilyCrit3DecaysGeometrically) {
  const auto fam = decaying_family(6, 1, 30, 0.5, 8);
  const auto recs = convergence_sweep(fam, SectionSchedule::all(30), random_vector(6, 1));
  // Tail energy after the head shrinks roughly by 4 per index; compare across 10 steps.
  const double early = recs[9].crit3;
  const double late = recs[19].crit3;
  EXPECT_LT(late, early * 1e-3);
  EXPECT_LE(recs.back().err_oversampled, 1e-10);
}

TEST(ConvergenceSweep, OversampledErrorMonotoneOnGeometricSpectrum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fam = random_family(8, 1, 16, SpectrumSpec::geometric(0.5), seed);
    const auto recs = convergence_sweep(fam, SectionSchedule::all(16), random_vector(8, 50 + seed));
    for (std::size_t k = 1; k < recs.size(); ++k)
      EXPECT_LE(recs[k].err_oversampled, recs[k - 1].err_oversampled + 1e-12) << "seed " << seed << " n " << k + 1;
    EXPECT_LE(recs.back().err_oversampled, 1e-10);
  }
}

TEST(UniformBound, Examples) {
  const auto onb = onb_family(4);
  const HVector f = random_vector(4, 2);
  const UniformBoundScan s = uniform_bound_scan(onb, 1, f);
  ASSERT_EQ(s.profile.size(), 3u);
  for (const auto& e : s.profile) EXPECT_NEAR(e.value, std::abs(f(1)), 1e-15);

  const auto fam = random_family(5, 1, 9, SpectrumSpec::geometric(0.7), 4);
  const HVector g = random_vector(5, 6);
  const UniformBoundScan u = uniform_bound_scan(fam, 3, g);
  const Matrix& b = fam.map(3).block();
  const HVector v = b.adjoint() * (b * g);
  EXPECT_NEAR(u.profile.back().value, FrameContext(fam).inverse_apply(v).norm(), 1e-12);

  const UniformBoundScan m = uniform_bound_scan(e1_e2_diag(), 2, vec2(1, 0));
  ASSERT_EQ(m.profile.size(), 1u);
  EXPECT_NEAR(m.c_j, std::sqrt(0.125), 1e-15);
}

TEST(UniformBound, AgainstDirectSolves) {
  std::mt19937_64 rng(31);
  oracle::ScalarFrame of;
  for (int j = 0; j < 7; ++j) of.vectors.push_back(random_oracle_vector(3, rng));
  const auto fam = from_oracle(of);
  const oracle::Vec f = random_oracle_vector(3, rng);
  const std::size_t j = 2;
  const oracle::Vec v = oracle::scale(of.vectors[j], oracle::inner(f, of.vectors[j]));
  const UniformBoundScan u = uniform_bound_scan(fam, j, from_oracle(f));
  double cmax = 0.0;
  for (const auto& e : u.profile) {
    const double ref = oracle::norm(oracle::section_inverse_apply(of, e.n, v));
    EXPECT_LE(std::abs(e.value - ref), 1e-10 * std::max(1.0, ref)) << e.n;
    cmax = std::max(cmax, ref);
  }
  EXPECT_LE(std::abs(u.c_j - cmax), 1e-10 * std::max(1.0, cmax));
}

TEST(Oversampling, Examples) {
  const auto onb = onb_family(4);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_EQ(find_oversampling(onb, n, 2.0, 1.0), 0u);
  EXPECT_EQ(find_oversampling(e1_e2_diag(), 1, 2.0, 1.0), 0u);

  // G_1 is tiny: H_1 = span e1 needs the second map before lambda_min reaches A/2.
  const auto tiny = from_scalar_frame({vec2(0.01, 0), vec2(1, 0), vec2(0, 1)});
  const double a = frame_bounds(tiny).lower;
  EXPECT_EQ(find_oversampling(tiny, 1, 2.0, a), 1u);

  // lambda_min(Q_1^* S_{1+m} Q_1) grows with m.
  const auto geo = random_family(6, 1, 14, SpectrumSpec::geometric(0.5), 5);
  const SubspaceBasis b = subspace_basis(geo, 2);
  double prev = 0.0;
  for (std::size_t m = 0; m + 2 <= geo.size(); ++m) {
    const double lm = linalg::min_eigenvalue(Matrix(b.q.adjoint() * partial_frame_operator(geo, 2 + m) * b.q));
    EXPECT_GE(lm, prev - 1e-15);
    prev = lm;
  }
  EXPECT_THROW(find_oversampling(onb, 1, 1.0, 1.0), PreconditionError);
}

TEST(Oversampling, InverseApplyExamples) {
  const auto onb = onb_family(3);
  const HVector f = random_vector(3, 4);
  EXPECT_LE((oversampled_inverse_apply(onb, 2, 2.0, f).x - project(subspace_basis(onb, 2), f)).norm(), 1e-15);

  const auto fam = random_family(4, 2, 3, SpectrumSpec::geometric(0.5), 1);
  const HVector g = random_vector(4, 8);
  EXPECT_LE((oversampled_inverse_apply(fam, 3, 2.0, g).x - FrameContext(fam).inverse_apply(g)).norm(), 1e-10);

  const OversampledSolve s = oversampled_inverse_apply(e1_e2_diag(), 2, 2.0, vec2(1, 1));
  EXPECT_EQ(s.m, 0u);
  EXPECT_LE((s.x - vec2(1, 1)).norm(), 1e-15);
  const auto recs = convergence_sweep(e1_e2_diag(), SectionSchedule({2}, 3), vec2(1, 1));
  EXPECT_LE(recs[0].err_oversampled, recs[0].err_plain + 1e-15);
}

TEST(KernelConsistency, RangeSequence) {
  const auto fam = random_family(4, 1, 7, SpectrumSpec::geometric(0.6), 2);
  const HVector g = random_vector(4, 3);
  const KernelConsistencyReport r = kernel_consistency(fam, analyze(fam, g), SectionSchedule::all(7));
  EXPECT_LE(r.kernel_norm, 1e-12);
  EXPECT_LE((r.g - g).norm(), 1e-12);
  for (const auto& e : r.profile) EXPECT_NEAR(e.statement1_residual, e.projection_residual, 1e-12);
  EXPECT_TRUE(r.statement1_vanishes && r.statement2_vanishes && r.co_vanish);
}

TEST(KernelConsistency, KernelSequenceOfRepeatedVector) {
  const auto fam = e1_e1_e2();
  const CoefficientSequence c({HSElement::Constant(1, 1, 1.0), HSElement::Constant(1, 1, -1.0), HSElement::Zero(1, 1)});
  const KernelConsistencyReport r = kernel_consistency(fam, c, SectionSchedule::all(3));
  EXPECT_NEAR(r.kernel_norm, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.profile[0].statement2_norm, 1.0, 1e-15);
  EXPECT_NEAR(r.profile[1].statement2_norm, 0.0, 1e-15);
  EXPECT_NEAR(r.profile[2].statement2_norm, 0.0, 1e-15);
  for (const auto& e : r.profile) EXPECT_NEAR(e.statement1_residual, e.statement2_norm, 1e-15);
  EXPECT_TRUE(r.co_vanish);
}

TEST(KernelConsistency, ZeroSequence) {
  const KernelConsistencyReport r =
      kernel_consistency(e1_e1_e2(), CoefficientSequence::zero(3, 1), SectionSchedule::all(3));
  for (const auto& e : r.profile) {
    EXPECT_EQ(e.statement1_residual, 0.0);
    EXPECT_EQ(e.statement2_norm, 0.0);
  }
  EXPECT_TRUE(r.co_vanish);
}
