#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "family.hpp"
#include "hs_core.hpp"
#include "linalg.hpp"
#include "types.hpp"

// Families with known structure: classical scalar frames, g-frame embeddings,
// random frames with an exact frame-operator spectrum, Riesz bases and
// families with geometrically decaying tails.

namespace hsframe {

/// Prescribed eigenvalues of the frame operator.
struct SpectrumSpec {
  enum class Kind { flat, geometric, explicit_values };
  Kind kind = Kind::flat;
  double level = 1.0;   // flat value, or the largest eigenvalue for geometric
  double ratio = 0.5;   // geometric ratio
  std::vector<double> values;

  static SpectrumSpec flat(double level = 1.0) { return {Kind::flat, level, 0.5, {}}; }
  static SpectrumSpec geometric(double ratio) { return {Kind::geometric, 1.0, ratio, {}}; }
  static SpectrumSpec explicit_list(std::vector<double> v) { return {Kind::explicit_values, 1.0, 0.5, std::move(v)}; }

  /// "flat", "flat:2", "geometric:0.5", "explicit:2,1".
  static SpectrumSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto number = [&](const std::string& s) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw PreconditionError("spectrum: cannot parse number '" + s + "'");
      }
    };
    if (kind == "flat") return flat(arg.empty() ? 1.0 : number(arg));
    if (kind == "geometric") {
      if (arg.empty()) throw PreconditionError("spectrum: geometric needs a ratio, e.g. geometric:0.5");
      return geometric(number(arg));
    }
    if (kind == "explicit") {
      std::vector<double> v;
      std::stringstream ss(arg);
      std::string item;
      while (std::getline(ss, item, ',')) v.push_back(number(item));
      return explicit_list(std::move(v));
    }
    throw PreconditionError("spectrum: unknown kind '" + kind + "'");
  }

  /// Eigenvalues for dimension n, in descending order.
  std::vector<double> resolve(Index n) const {
    std::vector<double> out;
    switch (kind) {
      case Kind::flat: out.assign(static_cast<std::size_t>(n), level); break;
      case Kind::geometric:
        if (!(ratio > 0.0 && ratio <= 1.0)) throw PreconditionError("spectrum: geometric ratio must lie in (0, 1]");
        for (Index k = 0; k < n; ++k) out.push_back(level * std::pow(ratio, static_cast<double>(k)));
        break;
      case Kind::explicit_values:
        if (static_cast<Index>(values.size()) != n)
          throw PreconditionError("spectrum: explicit list has " + std::to_string(values.size()) +
                                  " values, need " + std::to_string(n));
        out = values;
        break;
    }
    for (double v : out)
      if (!(v > 0.0)) throw PreconditionError("spectrum: all values must be positive");
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }
};

/// Scalar family (d_K = 1): G_j f = <f, f_j> as a 1x1 HS element.
inline HSFrameFamily from_scalar_frame(const std::vector<HVector>& vectors) {
  if (vectors.empty()) throw PreconditionError("from_scalar_frame: need at least one vector");
  const Index d = vectors.front().size();
  std::vector<HSMap> maps;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    detail::require_shape(vectors[j].size() == d && d > 0,
                          "from_scalar_frame: vector " + std::to_string(j) + " has inconsistent dimension");
    maps.emplace_back(1, Matrix(vectors[j].adjoint()));
  }
  return HSFrameFamily(d, 1, std::move(maps));
}

/// Blocks Lambda_j (d_{K_j} x d_H) of a g-frame.
struct GFrameSpec {
  std::vector<Matrix> blocks;

  Index dim_h() const { return blocks.empty() ? 0 : blocks.front().cols(); }
  Index total_dim() const {
    Index s = 0;
    for (const auto& b : blocks) s += b.rows();
    return s;
  }
};

/// Embeds a g-frame: G_j f = W(iota_j Lambda_j f) = (iota_j Lambda_j f) (x) y0 with K = (+)_j K_j.
///
/// d_K is the length of y0 and must be at least sum_j d_{K_j}.
inline HSFrameFamily from_g_frame(const GFrameSpec& spec, const KVector& y0) {
  if (spec.blocks.empty()) throw PreconditionError("from_g_frame: need at least one block");
  const Index d_h = spec.dim_h();
  const Index d_k = y0.size();
  detail::require_shape(d_h > 0, "from_g_frame: blocks need at least one column");
  detail::require_shape(spec.total_dim() <= d_k,
                        "from_g_frame: sum of block dimensions exceeds d_K = " + std::to_string(d_k));
  if (std::abs(y0.norm() - 1.0) > 1e-9) throw PreconditionError("from_g_frame: y0 must be a unit vector");
  std::vector<HSMap> maps;
  Index offset = 0;
  for (std::size_t j = 0; j < spec.blocks.size(); ++j) {
    const Matrix& lam = spec.blocks[j];
    detail::require_shape(lam.cols() == d_h, "from_g_frame: block " + std::to_string(j) + " has wrong d_H");
    // vec(x y0^*) row-major: entry (a, b) = x_a conj(y0_b), with x = iota_j Lambda_j f.
    Matrix block = Matrix::Zero(d_k * d_k, d_h);
    for (Index a = 0; a < lam.rows(); ++a)
      for (Index b = 0; b < d_k; ++b) block.row((offset + a) * d_k + b) = std::conj(y0(b)) * lam.row(a);
    maps.emplace_back(d_k, std::move(block));
    offset += lam.rows();
  }
  return HSFrameFamily(d_h, d_k, std::move(maps));
}

/// Default embedding: smallest d_K and y0 = e_1.
inline HSFrameFamily from_g_frame(const GFrameSpec& spec) {
  const Index d_k = std::max<Index>(1, spec.total_dim());
  return from_g_frame(spec, KVector::Unit(d_k, 0));
}

/// Orthonormal basis of H, each vector embedded as its own map (Parseval, count = d_H).
inline HSFrameFamily onb_family(Index dim_h, Index dim_k = 1) {
  if (dim_h < 1 || dim_k < 1) throw PreconditionError("onb_family: dimensions must be positive");
  if (dim_k == 1) {
    std::vector<HVector> vs;
    for (Index i = 0; i < dim_h; ++i) vs.push_back(HVector::Unit(dim_h, i));
    return from_scalar_frame(vs);
  }
  // Each map only uses the first coordinate of K, so any d_K >= 1 works.
  std::vector<HSMap> maps;
  for (Index i = 0; i < dim_h; ++i) {
    Matrix block = Matrix::Zero(dim_k * dim_k, dim_h);
    block(0, i) = 1.0;
    maps.emplace_back(dim_k, std::move(block));
  }
  return HSFrameFamily(dim_h, dim_k, std::move(maps));
}

/// Random frame whose frame operator has exactly the prescribed spectrum.
///
/// The stacked analysis matrix is U diag(sqrt(spectrum)) V^* with U an isometry
/// and V unitary, both drawn from complex Gaussians.
inline HSFrameFamily random_family(Index dim_h, Index dim_k, std::size_t count, const SpectrumSpec& spectrum,
                                   std::uint64_t seed) {
  if (dim_h < 1 || dim_k < 1 || count < 1) throw PreconditionError("random_family: dimensions must be positive");
  const Index rows = static_cast<Index>(count) * dim_k * dim_k;
  if (rows < dim_h)
    throw PreconditionError("random_family: count*d_K^2 = " + std::to_string(rows) + " < d_H = " +
                            std::to_string(dim_h) + " cannot be a frame");
  const std::vector<double> ev = spectrum.resolve(dim_h);
  linalg::Rng rng(seed);
  const Matrix u = linalg::random_isometry(rows, dim_h, rng);
  const Matrix v = linalg::random_isometry(dim_h, dim_h, rng);
  RealVector root(dim_h);
  for (Index k = 0; k < dim_h; ++k) root(k) = std::sqrt(ev[static_cast<std::size_t>(k)]);
  return HSFrameFamily::from_analysis_matrix(dim_k, u * root.asDiagonal() * v.adjoint());
}

/// Random Riesz basis: square synthesis matrix whose squared singular values are the spectrum.
inline HSFrameFamily riesz_family(Index dim_h, Index dim_k, std::size_t count, const SpectrumSpec& spectrum,
                                  std::uint64_t seed) {
  if (dim_h < 1 || dim_k < 1 || count < 1) throw PreconditionError("riesz_family: dimensions must be positive");
  const Index rows = static_cast<Index>(count) * dim_k * dim_k;
  if (rows != dim_h)
    throw PreconditionError("riesz_family: count*d_K^2 = " + std::to_string(rows) + " must equal d_H = " +
                            std::to_string(dim_h));
  return random_family(dim_h, dim_k, count, spectrum, seed);
}

/// Parseval head of ceil(d_H / d_K^2) maps followed by random maps with
/// ||G_j||_F = tail_ratio^k for the k-th tail map (k = 1, 2, ...).
inline HSFrameFamily decaying_family(Index dim_h, Index dim_k, std::size_t count, double tail_ratio,
                                     std::uint64_t seed) {
  if (dim_h < 1 || dim_k < 1) throw PreconditionError("decaying_family: dimensions must be positive");
  if (!(tail_ratio > 0.0 && tail_ratio < 1.0)) throw PreconditionError("decaying_family: tail_ratio must lie in (0, 1)");
  const Index m = dim_k * dim_k;
  const auto head = static_cast<std::size_t>((dim_h + m - 1) / m);
  if (count < head)
    throw PreconditionError("decaying_family: count must be at least the head size " + std::to_string(head));
  linalg::Rng rng(seed);
  Matrix phi(static_cast<Index>(count) * m, dim_h);
  phi.topRows(static_cast<Index>(head) * m) = linalg::random_isometry(static_cast<Index>(head) * m, dim_h, rng);
  for (std::size_t j = head; j < count; ++j) {
    Matrix block = linalg::random_gaussian(m, dim_h, rng);
    block *= std::pow(tail_ratio, static_cast<double>(j - head + 1)) / block.norm();
    phi.middleRows(static_cast<Index>(j) * m, m) = block;
  }
  return HSFrameFamily::from_analysis_matrix(dim_k, phi);
}

}  // namespace hsframe
