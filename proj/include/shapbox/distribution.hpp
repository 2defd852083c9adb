#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shapbox/feature_space.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

/// A product distribution over the entities of a feature space: feature i is 1
/// with probability p[i], independently of all other features.
class ProductDistribution {
 public:
  ProductDistribution(FeatureSpacePtr space, std::vector<Rational> probs)
      : space_(std::move(space)), probs_(std::move(probs)) {
    if (!space_) throw Error("distribution requires a feature space");
    if (probs_.size() != space_->size())
      throw Error("probability count does not match the feature space");
    for (const Rational& p : probs_)
      if (p < 0 || p > 1) throw Error("feature probabilities must lie in [0, 1]");
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }
  const std::vector<Rational>& probs() const { return probs_; }
  const Rational& prob(std::size_t feature) const { return probs_.at(feature); }

  /// P(feature i takes value v).
  Rational prob_of_value(std::size_t feature, int v) const {
    return v ? probs_.at(feature) : Rational(1) - probs_.at(feature);
  }

  /// Probability of drawing exactly this entity: the product of per-feature
  /// marginals.
  Rational entity_probability(const Entity& e) const {
    require_same_space(*space_, e.space(), "entity_probability");
    Rational result = 1;
    for (std::size_t i = 0; i < space_->size(); ++i) result *= prob_of_value(i, e.value(i));
    return result;
  }

  bool operator==(const ProductDistribution& other) const {
    return *space_ == *other.space_ && probs_ == other.probs_;
  }

 private:
  FeatureSpacePtr space_;
  std::vector<Rational> probs_;
};

/// Probability that a random entity equals `target`, conditioned on agreeing
/// with `anchor` on the features of `fixed_mask`.  Under a product
/// distribution this is the product of the marginals of the free features.
/// Throws if `target` and `anchor` disagree on a fixed feature (the
/// conditioning event would exclude `target` outright).
inline Rational conditional_probability(const ProductDistribution& dist, const Entity& target,
                                        const Entity& anchor, std::uint64_t fixed_mask) {
  require_same_space(dist.space(), target.space(), "conditional_probability");
  require_same_space(dist.space(), anchor.space(), "conditional_probability");
  if (fixed_mask & ~dist.space().full_mask())
    throw Error("conditional_probability: fixed set outside the feature space");
  if ((target.bits() ^ anchor.bits()) & fixed_mask)
    throw Error("conditional_probability: target disagrees with the anchor on a fixed feature");
  Rational result = 1;
  for (std::size_t i = 0; i < dist.space().size(); ++i) {
    if ((fixed_mask >> i) & 1) continue;
    result *= dist.prob_of_value(i, target.value(i));
  }
  return result;
}

}  // namespace shapbox
