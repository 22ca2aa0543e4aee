#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hs_core.hpp"
#include "types.hpp"

namespace hsframe {

/// One frame element G: H -> C2, stored as its vectorized matrix.
///
/// The block has d_K^2 rows and d_H columns; column i is vectorize(G(e_i)).
/// With that layout G f = devectorize(block * f) and the Frobenius adjoint is
/// simply G^* A = block^* vectorize(A).
class HSMap {
 public:
  HSMap() = default;

  /// images[i] = G(e_i), all d_K x d_K.
  explicit HSMap(const std::vector<HSElement>& images) {
    detail::require_shape(!images.empty(), "HSMap: need at least one image (d_H >= 1)");
    dim_k_ = images.front().rows();
    detail::require_shape(dim_k_ >= 1, "HSMap: d_K must be positive");
    block_.resize(dim_k_ * dim_k_, static_cast<Index>(images.size()));
    for (std::size_t i = 0; i < images.size(); ++i) {
      detail::require_shape(images[i].rows() == dim_k_ && images[i].cols() == dim_k_,
                            "HSMap: image " + std::to_string(i) + " is not " + std::to_string(dim_k_) + "x" +
                                std::to_string(dim_k_));
      block_.col(static_cast<Index>(i)) = vectorize(images[i]);
    }
  }

  HSMap(Index dim_k, Matrix block) : dim_k_(dim_k), block_(std::move(block)) {
    detail::require_shape(dim_k_ >= 1 && block_.rows() == dim_k_ * dim_k_ && block_.cols() >= 1,
                          "HSMap: block must have d_K^2 rows and d_H >= 1 columns");
  }

  Index dim_h() const { return block_.cols(); }
  Index dim_k() const { return dim_k_; }
  const Matrix& block() const { return block_; }

  HSElement image(Index i) const { return devectorize(block_.col(i)); }

  HSElement apply(const HVector& f) const {
    detail::require_shape(f.size() == dim_h(), "HSMap::apply: vector has wrong dimension");
    return devectorize(block_ * f);
  }

  HVector adjoint_apply(const HSElement& a) const {
    detail::require_shape(a.rows() == dim_k_ && a.cols() == dim_k_, "HSMap::adjoint_apply: wrong HS dimension");
    return block_.adjoint() * vectorize(a);
  }

  friend bool operator==(const HSMap& a, const HSMap& b) {
    return a.dim_k_ == b.dim_k_ && a.block_.rows() == b.block_.rows() && a.block_.cols() == b.block_.cols() &&
           a.block_ == b.block_;
  }

 private:
  Index dim_k_ = 0;
  Matrix block_;
};

/// Element of the direct sum of C2 copies: one HS element per frame index.
class CoefficientSequence {
 public:
  CoefficientSequence() = default;
  explicit CoefficientSequence(std::vector<HSElement> blocks) : blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
      detail::require_shape(b.rows() == b.cols() && b.rows() == blocks_.front().rows(),
                            "CoefficientSequence: blocks must share one square shape");
    }
  }

  static CoefficientSequence zero(std::size_t count, Index dim_k) {
    return CoefficientSequence(std::vector<HSElement>(count, HSElement::Zero(dim_k, dim_k)));
  }

  /// Inverse of stacked(): consecutive d_K^2 chunks become blocks.
  static CoefficientSequence from_stacked(const Vector& v, Index dim_k) {
    const Index m = dim_k * dim_k;
    detail::require_shape(m > 0 && v.size() % m == 0, "CoefficientSequence: stacked length not a multiple of d_K^2");
    std::vector<HSElement> blocks;
    blocks.reserve(static_cast<std::size_t>(v.size() / m));
    for (Index j = 0; j < v.size() / m; ++j) blocks.push_back(devectorize(v.segment(j * m, m)));
    return CoefficientSequence(std::move(blocks));
  }

  std::size_t size() const { return blocks_.size(); }
  Index dim_k() const { return blocks_.empty() ? 0 : blocks_.front().rows(); }
  const HSElement& operator[](std::size_t j) const { return blocks_[j]; }
  const std::vector<HSElement>& blocks() const { return blocks_; }

  Vector stacked() const {
    const Index m = dim_k() * dim_k();
    Vector v(static_cast<Index>(blocks_.size()) * m);
    for (std::size_t j = 0; j < blocks_.size(); ++j) v.segment(static_cast<Index>(j) * m, m) = vectorize(blocks_[j]);
    return v;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

 private:
  std::vector<HSElement> blocks_;
};

/// Finite ordered family {G_j} sharing d_H and d_K. Immutable after construction.
///
/// Also keeps the stacked analysis matrix: the J*d_K^2 x d_H matrix obtained by
/// stacking the blocks of all maps. Its adjoint is the synthesis matrix.
class HSFrameFamily {
 public:
  HSFrameFamily() = default;

  HSFrameFamily(Index dim_h, Index dim_k, std::vector<HSMap> maps)
      : dim_h_(dim_h), dim_k_(dim_k), maps_(std::move(maps)) {
    detail::require_shape(dim_h_ >= 1 && dim_k_ >= 1, "HSFrameFamily: dimensions must be positive");
    detail::require_shape(!maps_.empty(), "HSFrameFamily: family must have at least one map");
    for (std::size_t j = 0; j < maps_.size(); ++j) {
      detail::require_shape(maps_[j].dim_h() == dim_h_ && maps_[j].dim_k() == dim_k_,
                            "HSFrameFamily: map j=" + std::to_string(j) + " has inconsistent dimensions");
    }
    const Index m = block_rows();
    analysis_.resize(static_cast<Index>(maps_.size()) * m, dim_h_);
    for (std::size_t j = 0; j < maps_.size(); ++j) analysis_.middleRows(static_cast<Index>(j) * m, m) = maps_[j].block();
  }

  /// Splits a stacked analysis matrix (count*d_K^2 x d_H) into maps.
  static HSFrameFamily from_analysis_matrix(Index dim_k, const Matrix& stacked) {
    const Index m = dim_k * dim_k;
    detail::require_shape(m > 0 && stacked.rows() > 0 && stacked.rows() % m == 0,
                          "HSFrameFamily: stacked rows not a positive multiple of d_K^2");
    std::vector<HSMap> maps;
    for (Index j = 0; j < stacked.rows() / m; ++j) maps.emplace_back(dim_k, stacked.middleRows(j * m, m));
    return HSFrameFamily(stacked.cols(), dim_k, std::move(maps));
  }

  Index dim_h() const { return dim_h_; }
  Index dim_k() const { return dim_k_; }
  std::size_t size() const { return maps_.size(); }
  Index block_rows() const { return dim_k_ * dim_k_; }
  /// Dimension of the coefficient space: J * d_K^2.
  Index coefficient_dim() const { return static_cast<Index>(maps_.size()) * block_rows(); }

  const HSMap& map(std::size_t j) const { return maps_[j]; }
  const std::vector<HSMap>& maps() const { return maps_; }

  const Matrix& analysis_matrix() const { return analysis_; }
  Matrix synthesis_matrix() const { return analysis_.adjoint(); }

  /// Rows of the analysis matrix belonging to the first n maps.
  auto prefix_rows(std::size_t n) const { return analysis_.topRows(static_cast<Index>(n) * block_rows()); }

  friend bool operator==(const HSFrameFamily& a, const HSFrameFamily& b) {
    return a.dim_h_ == b.dim_h_ && a.dim_k_ == b.dim_k_ && a.maps_ == b.maps_;
  }

 private:
  Index dim_h_ = 0;
  Index dim_k_ = 0;
  std::vector<HSMap> maps_;
  Matrix analysis_;
};

}  // namespace hsframe
