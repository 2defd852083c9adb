#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shapbox/distribution.hpp"
#include "shapbox/feature_space.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

/// An axis-aligned box of product distributions: feature i's probability
/// ranges over [lo[i], hi[i]] ⊆ [0, 1].  A feature with lo == hi is
/// "degenerate" — pinned to a single value.
///
/// Vertex order.  The extrema of any multilinear function over the box are
/// attained at vertices, so several callers enumerate them; the order is part
/// of the library contract (ties between equal extrema go to the first vertex
/// in this order).  Vertices are numbered 0 .. 2^d - 1 where d is the number
/// of non-degenerate features; bit (d-1-j) of the vertex number selects the
/// j-th non-degenerate feature (in feature-space order), with 0 = lo and
/// 1 = hi.  Numeric order of vertex numbers is therefore lexicographic order
/// over the non-degenerate coordinates, lo before hi.
class Hyperrectangle {
 public:
  Hyperrectangle(FeatureSpacePtr space, std::vector<Rational> lo, std::vector<Rational> hi)
      : space_(std::move(space)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (!space_) throw Error("hyperrectangle requires a feature space");
    if (lo_.size() != space_->size() || hi_.size() != space_->size())
      throw Error("bound count does not match the feature space");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (lo_[i] < 0 || hi_[i] > 1)
        throw Error("hyperrectangle bounds must lie in [0, 1]");
      if (lo_[i] > hi_[i])
        throw Error("hyperrectangle has lo > hi for feature \"" + space_->name(i) + "\"");
    }
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (lo_[i] != hi_[i]) free_features_.push_back(i);
  }

  /// The box that pins every feature to the given distribution (a single
  /// point).
  static Hyperrectangle point(const ProductDistribution& p) {
    return Hyperrectangle(p.space_ptr(), p.probs(), p.probs());
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }
  const std::vector<Rational>& lo() const { return lo_; }
  const std::vector<Rational>& hi() const { return hi_; }
  const Rational& lo(std::size_t i) const { return lo_.at(i); }
  const Rational& hi(std::size_t i) const { return hi_.at(i); }

  bool degenerate(std::size_t i) const { return lo_.at(i) == hi_.at(i); }

  /// Indices of non-degenerate features, in feature-space order.
  const std::vector<std::size_t>& free_features() const { return free_features_; }
  std::size_t free_count() const { return free_features_.size(); }

  /// Number of vertices (2^free_count) as an exact integer.
  Integer vertex_count() const {
    Integer one = 1;
    return one << free_features_.size();
  }

  bool contains(const ProductDistribution& p) const {
    require_same_space(*space_, p.space(), "Hyperrectangle::contains");
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (p.prob(i) < lo_[i] || p.prob(i) > hi_[i]) return false;
    return true;
  }

  /// The vertex with the given number (see the class comment for the
  /// numbering).  Degenerate features take their pinned value.
  ProductDistribution vertex(std::uint64_t number) const {
    const std::size_t d = free_features_.size();
    if (d < kMaxFeatures && (number >> d) != 0)
      throw Error("vertex number out of range");
    std::vector<Rational> p = lo_;
    for (std::size_t j = 0; j < d; ++j)
      if ((number >> (d - 1 - j)) & 1) p[free_features_[j]] = hi_[free_features_[j]];
    return ProductDistribution(space_, std::move(p));
  }

  bool operator==(const Hyperrectangle& other) const {
    return *space_ == *other.space_ && lo_ == other.lo_ && hi_ == other.hi_;
  }

 private:
  FeatureSpacePtr space_;
  std::vector<Rational> lo_, hi_;
  std::vector<std::size_t> free_features_;
};

}  // namespace shapbox
