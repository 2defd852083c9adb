#pragma once

#include <bit>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "shapbox/distribution.hpp"
#include "shapbox/feature_space.hpp"
#include "shapbox/model.hpp"
#include "shapbox/polynomial.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

template <class M>
concept ModelLike = requires(const M& m, const Entity& e) {
  { m.evaluate(e) } -> std::convertible_to<bool>;
  { m.space() } -> std::convertible_to<const FeatureSpace&>;
};

/// Conditional expectation of the model given that a random entity agrees
/// with `e` on the features of `fixed_mask`: the weighted fraction of
/// completions the model accepts.  Enumerates all 2^(free) completions.
template <ModelLike M>
Rational expected_value_given(const M& model, const ProductDistribution& dist, const Entity& e,
                              std::uint64_t fixed_mask) {
  require_same_space(model.space(), dist.space(), "expected_value_given");
  require_same_space(model.space(), e.space(), "expected_value_given");
  const std::uint64_t full = model.space().full_mask();
  if (fixed_mask & ~full) throw Error("fixed set outside the feature space");
  const std::uint64_t free = full & ~fixed_mask;
  if (std::popcount(free) > 24)
    throw GuardError("expected_value_given would enumerate more than 2^24 completions");

  const std::size_t n = model.space().size();
  Rational total = 0;
  // Iterate every subset of the free features as the set of 1-valued ones.
  std::uint64_t sub = free;
  while (true) {
    const std::uint64_t bits = (e.bits() & fixed_mask) | sub;
    const Entity completed(e.space_ptr(), bits);
    if (model.evaluate(completed)) {
      Rational weight = 1;
      for (std::size_t i = 0; i < n; ++i) {
        if ((free >> i) & 1) weight *= dist.prob_of_value(i, (sub >> i) & 1 ? 1 : 0);
      }
      total += weight;
    }
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
  return total;
}

/// SHAP score of `feature` for entity `e`, straight from the definition: the
/// Shapley value of the coalition game v(S) = E[M | agreement with e on S].
/// Exponential in the feature count; guarded at 16 features.
template <ModelLike M>
Rational shap_brute_force(const M& model, const ProductDistribution& dist, const Entity& e,
                          std::size_t feature) {
  require_same_space(model.space(), dist.space(), "shap_brute_force");
  require_same_space(model.space(), e.space(), "shap_brute_force");
  const std::size_t n = model.space().size();
  if (feature >= n) throw Error("feature index out of range");
  if (n > 16) throw GuardError("shap_brute_force supports at most 16 features");

  const ShapleyCoefficients c(static_cast<unsigned>(n));
  const std::uint64_t xbit = std::uint64_t{1} << feature;
  const std::uint64_t others = model.space().full_mask() & ~xbit;

  Rational total = 0;
  std::uint64_t s = others;
  while (true) {
    const unsigned size = static_cast<unsigned>(std::popcount(s));
    const Rational with_x = expected_value_given(model, dist, e, s | xbit);
    const Rational without_x = expected_value_given(model, dist, e, s);
    total += c[size] * (with_x - without_x);
    if (s == 0) break;
    s = (s - 1) & others;
  }
  return total;
}

namespace detail {

/// Sum over coalition sizes outside a path's fixed features:
/// H(t) = sum_{r=0}^{n-1-m} C(n-1-m, r) * c(t+r, n), where m features besides
/// the explained one are fixed by the path.  H(t) is the total Shapley weight
/// a coalition picks up from the t fixed agreeing features plus any subset of
/// the n-1-m untested ones.
inline std::vector<Rational> path_weight_table(const ShapleyCoefficients& c, unsigned n,
                                               unsigned m, unsigned d) {
  std::vector<Rational> h(d + 1, Rational(0));
  const unsigned outside = n - 1 - m;
  for (unsigned t = 0; t <= d; ++t)
    for (unsigned r = 0; r <= outside; ++r) h[t] += Rational(binomial(outside, r)) * c[t + r];
  return h;
}

}  // namespace detail

/// SHAP score of `feature` via the accepting-path decomposition: each
/// accepting path contributes independently, and within a path the sum over
/// coalitions factors into elementary symmetric sums of the agreeing tested
/// features.  Polynomial in the tree size and feature count.
inline Rational shap_tree_eval(const DecisionTree& tree, const ProductDistribution& dist,
                               const Entity& e, std::size_t feature) {
  require_same_space(tree.space(), dist.space(), "shap_tree_eval");
  require_same_space(tree.space(), e.space(), "shap_tree_eval");
  const std::size_t n = tree.space().size();
  if (feature >= n) throw Error("feature index out of range");

  const ShapleyCoefficients c(static_cast<unsigned>(n));
  const std::uint64_t xbit = std::uint64_t{1} << feature;

  Rational total = 0;
  for (const PathAssignment& path : tree.accepting_paths()) {
    // Paths that never test the explained feature are independent of it and
    // contribute nothing.
    if (!(path.fixed & xbit)) continue;
    const std::uint64_t tested = path.fixed & ~xbit;  // B: other tested features
    const unsigned m = static_cast<unsigned>(std::popcount(tested));

    // Split B into D (path branch agrees with e) and the rest; collect
    // P(feature takes the path's branch) for each.
    Rational disagree_product = 1;  // product of q_y over B \ D
    std::vector<Rational> agree_probs;  // q_y for y in D
    for (std::size_t y = 0; y < n; ++y) {
      if (!((tested >> y) & 1)) continue;
      const int branch = (path.values >> y) & 1 ? 1 : 0;
      const Rational q = dist.prob_of_value(y, branch);
      if (branch == e.value(y))
        agree_probs.push_back(q);
      else
        disagree_product *= q;
    }
    const unsigned d = static_cast<unsigned>(agree_probs.size());

    // Elementary symmetric sums es[j] over the agreeing probabilities.
    std::vector<Rational> es(d + 1, Rational(0));
    es[0] = 1;
    for (unsigned v = 0; v < d; ++v)
      for (unsigned j = std::min(d, v + 1); j >= 1; --j) es[j] += es[j - 1] * agree_probs[v];

    const std::vector<Rational> h =
        detail::path_weight_table(c, static_cast<unsigned>(n), m, d);
    Rational coalition_sum = 0;
    for (unsigned t = 0; t <= d; ++t) coalition_sum += h[t] * es[d - t];

    const int branch_x = (path.values >> feature) & 1 ? 1 : 0;
    const Rational q_x = dist.prob_of_value(feature, branch_x);
    const Rational x_factor = Rational(branch_x == e.value(feature) ? 1 : 0) - q_x;

    total += x_factor * disagree_product * coalition_sum;
  }
  return total;
}

/// The SHAP score of `feature` as a symbolic multilinear polynomial in the
/// feature probabilities: evaluating it at any product distribution gives
/// shap_tree_eval's answer there.  Same path decomposition, carried out over
/// polynomials instead of numbers.
inline MultilinearPolynomial shap_polynomial(const DecisionTree& tree, const Entity& e,
                                             std::size_t feature) {
  require_same_space(tree.space(), e.space(), "shap_polynomial");
  const std::size_t n = tree.space().size();
  if (feature >= n) throw Error("feature index out of range");

  const FeatureSpacePtr space = tree.space_ptr();
  const ShapleyCoefficients c(static_cast<unsigned>(n));
  const std::uint64_t xbit = std::uint64_t{1} << feature;

  MultilinearPolynomial total(space);
  for (const PathAssignment& path : tree.accepting_paths()) {
    if (!(path.fixed & xbit)) continue;
    const std::uint64_t tested = path.fixed & ~xbit;
    const unsigned m = static_cast<unsigned>(std::popcount(tested));

    // P(feature y takes the path's branch) as an affine form in p_y:
    // branch 1 -> p_y, branch 0 -> 1 - p_y.
    std::vector<std::size_t> agree_vars, disagree_vars;
    std::vector<std::pair<Rational, Rational>> agree_forms;
    for (std::size_t y = 0; y < n; ++y) {
      if (!((tested >> y) & 1)) continue;
      const int branch = (path.values >> y) & 1 ? 1 : 0;
      if (branch == e.value(y)) {
        agree_vars.push_back(y);
        agree_forms.emplace_back(Rational(branch ? 0 : 1), Rational(branch ? 1 : -1));
      } else {
        disagree_vars.push_back(y);
      }
    }
    const unsigned d = static_cast<unsigned>(agree_vars.size());

    // es[j]: elementary symmetric polynomial of degree j in the agreeing
    // forms, built by the usual one-variable-at-a-time recurrence.
    std::vector<MultilinearPolynomial> es;
    es.reserve(d + 1);
    es.push_back(MultilinearPolynomial::constant(space, 1));
    for (unsigned j = 1; j <= d; ++j) es.emplace_back(space);
    for (unsigned v = 0; v < d; ++v) {
      for (unsigned j = std::min(d, v + 1); j >= 1; --j) {
        MultilinearPolynomial with = es[j - 1];
        with.multiply_affine(agree_vars[v], agree_forms[v].first, agree_forms[v].second);
        es[j] += with;
      }
    }

    const std::vector<Rational> h =
        detail::path_weight_table(c, static_cast<unsigned>(n), m, d);
    MultilinearPolynomial path_poly(space);
    for (unsigned t = 0; t <= d; ++t) {
      MultilinearPolynomial term = es[d - t];
      term *= h[t];
      path_poly += term;
    }

    for (std::size_t y : disagree_vars) {
      const int branch = (path.values >> y) & 1 ? 1 : 0;
      path_poly.multiply_affine(y, Rational(branch ? 0 : 1), Rational(branch ? 1 : -1));
    }

    const int branch_x = (path.values >> feature) & 1 ? 1 : 0;
    const Rational indicator(branch_x == e.value(feature) ? 1 : 0);
    // indicator - q_x as an affine form in p_x.
    if (branch_x)
      path_poly.multiply_affine(feature, indicator, Rational(-1));
    else
      path_poly.multiply_affine(feature, indicator - 1, Rational(1));

    total += path_poly;
  }
  return total;
}

}  // namespace shapbox
