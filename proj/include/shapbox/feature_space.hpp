#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shapbox/error.hpp"

namespace shapbox {

/// Maximum number of features.  Sets of features are stored as 64-bit masks
/// throughout (bit i = feature at position i), which keeps subset algebra O(1).
inline constexpr std::size_t kMaxFeatures = 64;

/// An ordered, immutable list of distinct feature names.  The position of a
/// name is its index everywhere else in the library; objects built over
/// different spaces never mix.
class FeatureSpace {
 public:
  explicit FeatureSpace(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw Error("feature space must contain at least one feature");
    if (names_.size() > kMaxFeatures)
      throw GuardError("feature space exceeds " + std::to_string(kMaxFeatures) + " features");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw Error("feature names must be non-empty");
      if (!index_.emplace(names_[i], i).second)
        throw Error("duplicate feature name \"" + names_[i] + "\"");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const {
    if (i >= names_.size()) throw Error("feature index out of range");
    return names_[i];
  }
  const std::vector<std::string>& names() const { return names_; }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown feature \"" + name + "\"");
    return it->second;
  }

  /// Mask with one bit per feature, all set.
  std::uint64_t full_mask() const {
    return names_.size() == kMaxFeatures ? ~std::uint64_t{0}
                                         : (std::uint64_t{1} << names_.size()) - 1;
  }

  bool operator==(const FeatureSpace& other) const { return names_ == other.names_; }
  bool operator!=(const FeatureSpace& other) const { return !(*this == other); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using FeatureSpacePtr = std::shared_ptr<const FeatureSpace>;

inline FeatureSpacePtr make_space(std::vector<std::string> names) {
  return std::make_shared<const FeatureSpace>(std::move(names));
}

inline FeatureSpacePtr make_space(std::initializer_list<const char*> names) {
  return make_space(std::vector<std::string>(names.begin(), names.end()));
}

/// Throws unless the two spaces have identical name sequences.
inline void require_same_space(const FeatureSpace& a, const FeatureSpace& b,
                               const char* context) {
  if (&a != &b && a != b)
    throw SpaceMismatchError(std::string("feature space mismatch in ") + context);
}

/// A complete assignment of {0,1} values to every feature of a space, stored
/// as a bitmask (bit i = value of feature i).
class Entity {
 public:
  Entity(FeatureSpacePtr space, std::uint64_t bits) : space_(std::move(space)), bits_(bits) {
    if (!space_) throw Error("entity requires a feature space");
    if (bits_ & ~space_->full_mask()) throw Error("entity bits outside the feature space");
  }

  Entity(FeatureSpacePtr space, const std::vector<int>& values)
      : Entity(pack(std::move(space), values)) {}

  static Entity pack(FeatureSpacePtr space, const std::vector<int>& values) {
    if (!space) throw Error("entity requires a feature space");
    if (values.size() != space->size())
      throw Error("entity value count does not match the feature space");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != 0 && values[i] != 1) throw Error("entity values must be 0 or 1");
      if (values[i]) bits |= std::uint64_t{1} << i;
    }
    return Entity(std::move(space), bits);
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }
  std::uint64_t bits() const { return bits_; }

  int value(std::size_t feature) const {
    if (feature >= space_->size()) throw Error("feature index out of range");
    return static_cast<int>((bits_ >> feature) & 1);
  }

  Entity with_value(std::size_t feature, int v) const {
    if (feature >= space_->size()) throw Error("feature index out of range");
    std::uint64_t bits = bits_;
    if (v)
      bits |= std::uint64_t{1} << feature;
    else
      bits &= ~(std::uint64_t{1} << feature);
    return Entity(space_, bits);
  }

  std::vector<int> values() const {
    std::vector<int> v(space_->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>((bits_ >> i) & 1);
    return v;
  }

  bool operator==(const Entity& other) const {
    return *space_ == *other.space_ && bits_ == other.bits_;
  }

 private:
  FeatureSpacePtr space_;
  std::uint64_t bits_;
};

}  // namespace shapbox
