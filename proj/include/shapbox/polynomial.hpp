#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shapbox/distribution.hpp"
#include "shapbox/feature_space.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

/// Shapley coefficient c(i, n) = i! (n-i-1)! / n! — the weight of a coalition
/// of size i among n players.  Defined for 0 <= i <= n-1.
inline Rational shapley_coefficient(unsigned i, unsigned n) {
  if (n == 0 || i > n - 1) throw Error("shapley_coefficient requires 0 <= i <= n-1");
  return Rational(factorial(i) * factorial(n - i - 1), factorial(n));
}

/// Precomputed row of Shapley coefficients for a fixed player count.
class ShapleyCoefficients {
 public:
  explicit ShapleyCoefficients(unsigned n) : n_(n) {
    if (n == 0) throw Error("ShapleyCoefficients requires n >= 1");
    c_.reserve(n);
    const Integer n_fact = factorial(n);
    for (unsigned i = 0; i < n; ++i)
      c_.emplace_back(factorial(i) * factorial(n - i - 1), n_fact);
  }

  unsigned players() const { return n_; }
  const Rational& operator[](unsigned i) const { return c_.at(i); }

 private:
  unsigned n_;
  std::vector<Rational> c_;
};

/// A multilinear polynomial over the probability variables of a feature
/// space: a finite sum of terms coeff * prod_{i in mask} p_i, with each
/// variable appearing at degree at most one.  Monomials are identified by
/// their feature bitmask; zero coefficients are never stored.
class MultilinearPolynomial {
 public:
  /// Hard cap on stored monomials; operations that would exceed it throw
  /// GuardError.  2^20 monomials is far beyond anything the decision
  /// procedures can consume anyway (they cap vertex enumeration separately).
  static constexpr std::size_t kMaxMonomials = std::size_t{1} << 20;

  explicit MultilinearPolynomial(FeatureSpacePtr space) : space_(std::move(space)) {
    if (!space_) throw Error("polynomial requires a feature space");
  }

  static MultilinearPolynomial constant(FeatureSpacePtr space, Rational value) {
    MultilinearPolynomial f(std::move(space));
    f.add_term(0, std::move(value));
    return f;
  }

  /// The polynomial p_i.
  static MultilinearPolynomial variable(FeatureSpacePtr space, std::size_t feature) {
    MultilinearPolynomial f(std::move(space));
    if (feature >= f.space().size()) throw Error("feature index out of range");
    f.add_term(std::uint64_t{1} << feature, 1);
    return f;
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }

  bool is_zero() const { return terms_.empty(); }
  std::size_t monomial_count() const { return terms_.size(); }
  const std::map<std::uint64_t, Rational>& terms() const { return terms_; }

  /// Coefficient of the monomial with the given feature mask (0 if absent).
  Rational coefficient(std::uint64_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Adds coeff * prod_{i in mask} p_i.
  void add_term(std::uint64_t mask, const Rational& coeff) {
    if (mask & ~space_->full_mask()) throw Error("monomial outside the feature space");
    if (coeff == 0) return;
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
      terms_.emplace(mask, coeff);
      if (terms_.size() > kMaxMonomials)
        throw GuardError("polynomial exceeds " + std::to_string(kMaxMonomials) + " monomials");
    } else {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    }
  }

  MultilinearPolynomial& operator+=(const MultilinearPolynomial& other) {
    require_same_space(*space_, other.space(), "polynomial addition");
    for (const auto& [mask, coeff] : other.terms_) add_term(mask, coeff);
    return *this;
  }

  MultilinearPolynomial& operator-=(const MultilinearPolynomial& other) {
    require_same_space(*space_, other.space(), "polynomial subtraction");
    for (const auto& [mask, coeff] : other.terms_) add_term(mask, -coeff);
    return *this;
  }

  friend MultilinearPolynomial operator+(MultilinearPolynomial a,
                                         const MultilinearPolynomial& b) {
    a += b;
    return a;
  }

  friend MultilinearPolynomial operator-(MultilinearPolynomial a,
                                         const MultilinearPolynomial& b) {
    a -= b;
    return a;
  }

  /// Multiplies every term by a constant.
  MultilinearPolynomial& operator*=(const Rational& factor) {
    if (factor == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [mask, coeff] : terms_) coeff *= factor;
    return *this;
  }

  /// Multiplies by the affine form (a + b * p_feature).  Throws
  /// MultilinearityError if b != 0 and the variable already occurs in some
  /// term — the product would contain p_feature squared.
  void multiply_affine(std::size_t feature, const Rational& a, const Rational& b) {
    if (feature >= space_->size()) throw Error("feature index out of range");
    const std::uint64_t bit = std::uint64_t{1} << feature;
    if (b == 0) {
      *this *= a;
      return;
    }
    for (const auto& kv : terms_)
      if (kv.first & bit)
        throw MultilinearityError("multiplying by p_" + space_->name(feature) +
                                  " would square an existing variable");
    std::map<std::uint64_t, Rational> result;
    for (const auto& [mask, coeff] : terms_) {
      if (a != 0) result[mask] += coeff * a;
      result[mask | bit] += coeff * b;
    }
    for (auto it = result.begin(); it != result.end();)
      it = it->second == 0 ? result.erase(it) : std::next(it);
    if (result.size() > kMaxMonomials)
      throw GuardError("polynomial exceeds " + std::to_string(kMaxMonomials) + " monomials");
    terms_ = std::move(result);
  }

  /// Substitutes a constant for one variable, producing a polynomial without
  /// it.
  void substitute(std::size_t feature, const Rational& value) {
    if (feature >= space_->size()) throw Error("feature index out of range");
    const std::uint64_t bit = std::uint64_t{1} << feature;
    std::map<std::uint64_t, Rational> result;
    for (const auto& [mask, coeff] : terms_) {
      if (mask & bit) {
        if (value == 0) continue;
        auto& slot = result[mask & ~bit];
        slot += coeff * value;
      } else {
        result[mask] += coeff;
      }
    }
    for (auto it = result.begin(); it != result.end();)
      it = it->second == 0 ? result.erase(it) : std::next(it);
    terms_ = std::move(result);
  }

  /// Evaluates at a full assignment of probabilities.
  Rational evaluate(const std::vector<Rational>& p) const {
    if (p.size() != space_->size())
      throw Error("evaluation point does not match the feature space");
    Rational total = 0;
    for (const auto& [mask, coeff] : terms_) {
      Rational term = coeff;
      std::uint64_t m = mask;
      while (m) {
        const int i = std::countr_zero(m);
        term *= p[static_cast<std::size_t>(i)];
        m &= m - 1;
      }
      total += term;
    }
    return total;
  }

  Rational evaluate(const ProductDistribution& dist) const {
    require_same_space(*space_, dist.space(), "polynomial evaluation");
    return evaluate(dist.probs());
  }

  /// Mask of variables that actually occur in some term.
  std::uint64_t support() const {
    std::uint64_t s = 0;
    for (const auto& kv : terms_) s |= kv.first;
    return s;
  }

  /// Text rendering: monomials sorted by size (largest first), then
  /// lexicographically by feature indices; rational coefficients in num/den
  /// form.  Example: "-2/3*p_x*p_y*p_z + 1/2*p_x*p_z + 1/2*p_y*p_z".
  std::string render() const {
    if (terms_.empty()) return "0";
    std::vector<std::uint64_t> masks;
    masks.reserve(terms_.size());
    for (const auto& kv : terms_) masks.push_back(kv.first);
    std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
      const int pa = std::popcount(a), pb = std::popcount(b);
      if (pa != pb) return pa > pb;
      // Lexicographic comparison of ascending index sequences: the lowest
      // differing variable decides.
      const std::uint64_t diff = a ^ b;
      if (diff == 0) return false;
      return ((a >> std::countr_zero(diff)) & 1) != 0;  // a holds the smaller leading index
    });
    std::string out;
    bool first = true;
    for (std::uint64_t mask : masks) {
      const Rational& coeff = terms_.at(mask);
      const bool negative = coeff < 0;
      const Rational magnitude = negative ? Rational(-coeff) : coeff;
      if (first) {
        if (negative) out += "-";
        first = false;
      } else {
        out += negative ? " - " : " + ";
      }
      std::string vars;
      std::uint64_t m = mask;
      while (m) {
        const int i = std::countr_zero(m);
        if (!vars.empty()) vars += "*";
        vars += "p_" + space_->name(static_cast<std::size_t>(i));
        m &= m - 1;
      }
      if (vars.empty()) {
        out += to_fraction_string(magnitude);
      } else if (magnitude == 1) {
        out += vars;
      } else {
        out += to_fraction_string(magnitude) + "*" + vars;
      }
    }
    return out;
  }

  bool operator==(const MultilinearPolynomial& other) const {
    return *space_ == *other.space_ && terms_ == other.terms_;
  }

 private:
  FeatureSpacePtr space_;
  std::map<std::uint64_t, Rational> terms_;
};

/// Elementary symmetric polynomial of degree k in the affine forms
/// (a_j + b_j * p_{vars[j]}): the sum over all k-subsets of the product of the
/// chosen forms.  Degree 0 yields the constant 1.
inline MultilinearPolynomial elementary_symmetric(
    FeatureSpacePtr space, const std::vector<std::size_t>& vars,
    const std::vector<std::pair<Rational, Rational>>& affine, std::size_t k) {
  if (vars.size() != affine.size())
    throw Error("elementary_symmetric: variable/form count mismatch");
  if (k > vars.size()) return MultilinearPolynomial(space);
  // DP over the variables: table[j] = elementary symmetric of degree j among
  // the forms seen so far.
  std::vector<MultilinearPolynomial> table;
  table.reserve(k + 1);
  table.push_back(MultilinearPolynomial::constant(space, 1));
  for (std::size_t j = 1; j <= k; ++j) table.emplace_back(space);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    for (std::size_t j = std::min(k, v + 1); j >= 1; --j) {
      MultilinearPolynomial with = table[j - 1];
      with.multiply_affine(vars[v], affine[v].first, affine[v].second);
      table[j] += with;
    }
  }
  return table[k];
}

}  // namespace shapbox
