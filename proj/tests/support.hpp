#pragma once

// Shared fixtures: conversions to the oracle's plain types and the seeded
// pool of families used by the property suites.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hsframe/hsframe.hpp"
#include "oracle/brute_force.hpp"

namespace testing_support {

using namespace hsframe;

inline oracle::Vec to_oracle(const Vector& v) {
  oracle::Vec out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

inline Vector from_oracle(const oracle::Vec& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

inline oracle::ImageFamily to_oracle(const HSFrameFamily& f) {
  oracle::ImageFamily out;
  out.dim_h = static_cast<std::size_t>(f.dim_h());
  out.dim_k = static_cast<std::size_t>(f.dim_k());
  for (const auto& g : f.maps()) {
    std::vector<oracle::Mat> imgs;
    for (Index i = 0; i < f.dim_h(); ++i) {
      const HSElement e = g.image(i);
      oracle::Mat m = oracle::zeros(out.dim_k, out.dim_k);
      for (Index r = 0; r < e.rows(); ++r)
        for (Index c = 0; c < e.cols(); ++c) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = e(r, c);
      imgs.push_back(std::move(m));
    }
    out.images.push_back(std::move(imgs));
  }
  return out;
}

inline HSFrameFamily from_oracle(const oracle::ScalarFrame& f) {
  std::vector<HVector> vs;
  for (const auto& v : f.vectors) vs.push_back(from_oracle(v));
  return from_scalar_frame(vs);
}

inline oracle::Vec random_oracle_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  oracle::Vec v(n);
  for (auto& z : v) {
    const double re = nd(rng);
    z = oracle::cplx(re, nd(rng));
  }
  return v;
}

inline HVector random_vector(Index n, std::uint64_t seed) {
  linalg::Rng rng(seed);
  return linalg::random_gaussian(n, 1, rng).col(0);
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct FamilyCase {
  std::string label;
  HSFrameFamily family;
  FrameBounds expected;  // exact bounds by construction
  bool riesz = false;
};

/// 100 seeded frames: d_H <= 16, d_K <= 3, count <= 40, A/B >= 1e-6.
///
/// Mix of spectrum-shaped random frames, Riesz bases and g-frame embeddings.
inline std::vector<FamilyCase> family_pool(std::uint64_t master_seed = 20241015) {
  std::mt19937_64 rng(master_seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<FamilyCase> pool;
  for (int k = 0; k < 100; ++k) {
    const std::uint64_t seed = rng();
    const int kind = k % 5;
    FamilyCase fc;
    if (kind == 3) {
      // Riesz basis: count * d_K^2 == d_H.
      static const int shapes[][2] = {{1, 3}, {1, 7}, {1, 12}, {1, 16}, {2, 4}, {2, 8}, {2, 12}, {2, 16}, {3, 9}};
      const auto& s = shapes[pick(0, 8)];
      const Index dk = s[0];
      const Index dh = s[1];
      const auto count = static_cast<std::size_t>(dh / (dk * dk));
      std::vector<double> spec;
      for (Index i = 0; i < dh; ++i) spec.push_back(uni(0.25, 4.0));
      fc.family = riesz_family(dh, dk, count, SpectrumSpec::explicit_list(spec), seed);
      fc.expected = {*std::min_element(spec.begin(), spec.end()), *std::max_element(spec.begin(), spec.end())};
      fc.riesz = true;
      fc.label = "riesz";
    } else if (kind == 4) {
      // Embedded g-frame with random rank-one blocks, followed by an ONB so the family is complete.
      const Index dh = pick(2, 16);
      const int blocks = pick(1, 3);
      GFrameSpec spec;
      linalg::Rng r(seed);
      for (int b = 0; b < blocks; ++b) spec.blocks.push_back(linalg::random_gaussian(1, dh, r));
      const Index dk = std::max<Index>(blocks, 1);
      Matrix big(blocks, dh);
      for (int b = 0; b < blocks; ++b) big.row(b) = spec.blocks[static_cast<std::size_t>(b)];
      HSFrameFamily head = from_g_frame(spec, KVector::Unit(dk, 0));
      std::vector<HSMap> maps = head.maps();
      const HSFrameFamily onb = onb_family(dh, dk);
      for (const auto& m : onb.maps()) maps.push_back(m);
      fc.family = HSFrameFamily(dh, dk, std::move(maps));
      const RealVector ev = linalg::hermitian_eigenvalues(Matrix::Identity(dh, dh) + Matrix(big.adjoint() * big));
      fc.expected = {ev(0), ev(ev.size() - 1)};
      fc.label = "g-frame";
    } else {
      const Index dk = pick(1, 3);
      const Index dh = pick(2, 16);
      const int min_count = static_cast<int>((dh + dk * dk - 1) / (dk * dk));
      const auto count = static_cast<std::size_t>(pick(min_count, std::min(40, min_count + 12)));
      SpectrumSpec spec;
      if (kind == 0) spec = SpectrumSpec::flat(uni(0.5, 3.0));
      if (kind == 1) spec = SpectrumSpec::geometric(uni(0.45, 0.95));
      if (kind == 2) {
        std::vector<double> v;
        for (Index i = 0; i < dh; ++i) v.push_back(uni(0.1, 5.0));
        spec = SpectrumSpec::explicit_list(v);
      }
      const auto ev = spec.resolve(dh);
      fc.family = random_family(dh, dk, count, spec, seed);
      fc.expected = {ev.back(), ev.front()};
      fc.riesz = static_cast<Index>(count) * dk * dk == dh;
      fc.label = kind == 0 ? "flat" : kind == 1 ? "geometric" : "explicit";
    }
    pool.push_back(std::move(fc));
  }
  return pool;
}

}  // namespace testing_support
