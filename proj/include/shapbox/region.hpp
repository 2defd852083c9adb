#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "shapbox/hyperrectangle.hpp"
#include "shapbox/model.hpp"
#include "shapbox/polynomial.hpp"
#include "shapbox/shap.hpp"

namespace shapbox {

/// Every decision procedure here enumerates box vertices; past this many
/// the call is refused rather than left to run for hours.
inline constexpr std::size_t kMaxVertexBits = 24;

/// Above this many monomials the symbolic route stops paying off and
/// interval computation falls back to per-vertex tree evaluation.
inline constexpr std::size_t kPolynomialRouteLimit = 4096;

/// One extremum of a function over a box: the value and the vertex attaining
/// it (by number in the box's vertex order; ties always resolve to the first
/// such vertex).
struct BoxExtremum {
  Rational value;
  std::uint64_t vertex = 0;
};

struct BoxRange {
  BoxExtremum min, max;
};

namespace detail {

/// Dense evaluation limit: boxes with more free features than this are split
/// recursively to bound the working-set size.
inline constexpr std::size_t kDenseBits = 18;

/// Evaluates a multilinear polynomial at every vertex of a box with few free
/// features.  Returns the 2^d values in vertex order.  Works by the affine
/// change of variables p = lo + (hi-lo)*t followed by a subset-sum (zeta)
/// transform, so the whole sweep costs O(d * 2^d) rational additions.
inline std::vector<Rational> vertex_values_dense(const MultilinearPolynomial& f,
                                                 const Hyperrectangle& box) {
  const std::vector<std::size_t>& free = box.free_features();
  const std::size_t d = free.size();

  // Feature index -> bit position in the vertex number (first free feature is
  // the most significant bit).
  std::vector<int> bit_of(box.space().size(), -1);
  for (std::size_t j = 0; j < d; ++j) bit_of[free[j]] = static_cast<int>(d - 1 - j);

  std::vector<Rational> a(std::size_t{1} << d, Rational(0));
  for (const auto& [mask, coeff] : f.terms()) {
    std::uint64_t tmask = 0;
    std::uint64_t m = mask;
    bool degenerate_var = false;
    while (m) {
      const int i = std::countr_zero(m);
      if (bit_of[static_cast<std::size_t>(i)] < 0) {
        degenerate_var = true;  // caller substitutes these away first
        break;
      }
      tmask |= std::uint64_t{1} << bit_of[static_cast<std::size_t>(i)];
      m &= m - 1;
    }
    if (degenerate_var)
      throw Error("vertex_values_dense: polynomial still mentions a pinned feature");
    a[tmask] += coeff;
  }

  // Substitute p_j = lo_j + w_j * t_j one variable at a time.
  for (std::size_t j = 0; j < d; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << (d - 1 - j);
    const Rational& lo = box.lo(free[j]);
    const Rational w = box.hi(free[j]) - lo;
    for (std::uint64_t mask = 0; mask < a.size(); ++mask) {
      if (!(mask & bit)) continue;
      if (lo != 0 && a[mask] != 0) a[mask ^ bit] += lo * a[mask];
      a[mask] *= w;
    }
  }

  // Subset-sum transform: afterwards a[mask] = f at the vertex with that
  // number.
  for (std::size_t b = 0; b < d; ++b) {
    const std::uint64_t bit = std::uint64_t{1} << b;
    for (std::uint64_t mask = 0; mask < a.size(); ++mask)
      if (mask & bit) {
        if (a[mask ^ bit] != 0) a[mask] += a[mask ^ bit];
      }
  }
  return a;
}

inline BoxRange scan_range(const std::vector<Rational>& values) {
  BoxRange r;
  r.min = {values[0], 0};
  r.max = {values[0], 0};
  for (std::uint64_t k = 1; k < values.size(); ++k) {
    if (values[k] < r.min.value) r.min = {values[k], k};
    if (values[k] > r.max.value) r.max = {values[k], k};
  }
  return r;
}

/// Recursive range computation; splits on the first free feature until the
/// dense sweep fits.  `g` no longer mentions any pinned feature.
inline BoxRange polynomial_range_rec(const MultilinearPolynomial& g,
                                     const Hyperrectangle& box) {
  const std::size_t d = box.free_count();
  if (d <= kDenseBits) return scan_range(vertex_values_dense(g, box));

  const std::size_t split = box.free_features().front();
  BoxRange result;
  for (int side = 0; side < 2; ++side) {
    const Rational& pin = side ? box.hi(split) : box.lo(split);
    std::vector<Rational> lo = box.lo(), hi = box.hi();
    lo[split] = hi[split] = pin;
    MultilinearPolynomial sub = g;
    sub.substitute(split, pin);
    const BoxRange part =
        polynomial_range_rec(sub, Hyperrectangle(box.space_ptr(), std::move(lo), std::move(hi)));
    const std::uint64_t prefix = side ? std::uint64_t{1} << (d - 1) : 0;
    const BoxExtremum part_min{part.min.value, part.min.vertex | prefix};
    const BoxExtremum part_max{part.max.value, part.max.vertex | prefix};
    if (side == 0) {
      result = BoxRange{part_min, part_max};
    } else {
      // The low branch owns the smaller vertex numbers, so ties keep it.
      if (part_min.value < result.min.value) result.min = part_min;
      if (part_max.value > result.max.value) result.max = part_max;
    }
  }
  return result;
}

inline void check_vertex_guard(const Hyperrectangle& box, const char* what) {
  if (box.free_count() > kMaxVertexBits)
    throw GuardError(std::string(what) + " would enumerate more than 2^" +
                     std::to_string(kMaxVertexBits) + " vertices");
}

}  // namespace detail

/// Exact minimum and maximum of a multilinear polynomial over a box.  Both
/// extrema are attained at vertices (the function is affine in each
/// coordinate separately), so vertex enumeration decides them; ties report
/// the first vertex in the box's vertex order.
inline BoxRange polynomial_range(const MultilinearPolynomial& f, const Hyperrectangle& box) {
  require_same_space(f.space(), box.space(), "polynomial_range");
  detail::check_vertex_guard(box, "polynomial_range");
  MultilinearPolynomial g = f;
  for (std::size_t i = 0; i < box.space().size(); ++i)
    if (box.degenerate(i)) g.substitute(i, box.lo(i));
  return detail::polynomial_range_rec(g, box);
}

/// Evaluates a multilinear polynomial at every vertex, in vertex order.
/// Guarded more tightly than polynomial_range because the result is
/// materialized.
inline std::vector<Rational> polynomial_vertex_values(const MultilinearPolynomial& f,
                                                      const Hyperrectangle& box) {
  require_same_space(f.space(), box.space(), "polynomial_vertex_values");
  if (box.free_count() > detail::kDenseBits)
    throw GuardError("polynomial_vertex_values supports at most 2^" +
                     std::to_string(detail::kDenseBits) + " vertices");
  MultilinearPolynomial g = f;
  for (std::size_t i = 0; i < box.space().size(); ++i)
    if (box.degenerate(i)) g.substitute(i, box.lo(i));
  return detail::vertex_values_dense(g, box);
}

/// The exact range of a feature's SHAP score over a box of product
/// distributions, with vertices attaining each end.
struct ShapInterval {
  Rational lo, hi;
  ProductDistribution argmin, argmax;
};

/// Computes the SHAP interval by vertex enumeration: through the symbolic
/// polynomial when it stays small, otherwise by evaluating the tree at every
/// vertex.
inline ShapInterval shap_interval(const DecisionTree& tree, const Entity& e,
                                  std::size_t feature, const Hyperrectangle& box) {
  require_same_space(tree.space(), box.space(), "shap_interval");
  require_same_space(tree.space(), e.space(), "shap_interval");
  detail::check_vertex_guard(box, "shap_interval");

  std::optional<MultilinearPolynomial> poly;
  try {
    poly = shap_polynomial(tree, e, feature);
  } catch (const GuardError&) {
    // Symbolic representation too large; fall back to per-vertex evaluation.
  }

  BoxRange range;
  if (poly && poly->monomial_count() <= kPolynomialRouteLimit) {
    range = polynomial_range(*poly, box);
  } else {
    const std::uint64_t count = std::uint64_t{1} << box.free_count();
    ProductDistribution first = box.vertex(0);
    Rational v0 = shap_tree_eval(tree, first, e, feature);
    range.min = {v0, 0};
    range.max = {std::move(v0), 0};
    for (std::uint64_t k = 1; k < count; ++k) {
      const Rational v = shap_tree_eval(tree, box.vertex(k), e, feature);
      if (v < range.min.value) range.min = {v, k};
      if (v > range.max.value) range.max = {v, k};
    }
  }
  return ShapInterval{range.min.value, range.max.value, box.vertex(range.min.vertex),
                      box.vertex(range.max.vertex)};
}

/// Verdict of a one-sided threshold query, with the vertex certifying a
/// positive answer.
struct ThresholdVerdict {
  bool answer = false;
  std::optional<ProductDistribution> witness;  // attains the threshold when answer
  Rational best;                               // the relevant extremum
};

/// Is there a distribution in the box whose SHAP score reaches at least q?
inline ThresholdVerdict region_max_shap(const DecisionTree& tree, const Entity& e,
                                        std::size_t feature, const Hyperrectangle& box,
                                        const Rational& q) {
  const ShapInterval iv = shap_interval(tree, e, feature, box);
  ThresholdVerdict v;
  v.best = iv.hi;
  v.answer = iv.hi >= q;
  if (v.answer) v.witness = iv.argmax;
  return v;
}

/// Is there a distribution in the box whose SHAP score is at most q?
inline ThresholdVerdict region_min_shap(const DecisionTree& tree, const Entity& e,
                                        std::size_t feature, const Hyperrectangle& box,
                                        const Rational& q) {
  const ShapInterval iv = shap_interval(tree, e, feature, box);
  ThresholdVerdict v;
  v.best = iv.lo;
  v.answer = iv.lo <= q;
  if (v.answer) v.witness = iv.argmin;
  return v;
}

/// Verdict of the sign-ambiguity query: can the SHAP score be strictly
/// positive somewhere in the box and strictly negative elsewhere?
struct AmbiguityVerdict {
  bool answer = false;
  std::optional<ProductDistribution> positive_witness;
  std::optional<ProductDistribution> negative_witness;
  Rational lo, hi;
};

inline AmbiguityVerdict region_ambiguity(const DecisionTree& tree, const Entity& e,
                                         std::size_t feature, const Hyperrectangle& box) {
  const ShapInterval iv = shap_interval(tree, e, feature, box);
  AmbiguityVerdict v;
  v.lo = iv.lo;
  v.hi = iv.hi;
  v.answer = iv.hi > 0 && iv.lo < 0;
  if (v.answer) {
    v.positive_witness = iv.argmax;
    v.negative_witness = iv.argmin;
  }
  return v;
}

/// Verdict of the irrelevancy query: is there a distribution in the box where
/// the SHAP score is exactly zero?  Decided by the intermediate-value
/// argument (the score is continuous on a connected box, so lo <= 0 <= hi is
/// equivalent); a witness is reported only when an interval endpoint is
/// itself exactly zero, i.e. when a vertex attains it.
struct IrrelevancyVerdict {
  bool answer = false;
  std::optional<ProductDistribution> witness;
  Rational lo, hi;
};

namespace detail {

inline IrrelevancyVerdict irrelevancy_from_interval(const Rational& lo, const Rational& hi,
                                                    const ProductDistribution& argmin,
                                                    const ProductDistribution& argmax) {
  IrrelevancyVerdict v;
  v.lo = lo;
  v.hi = hi;
  v.answer = lo <= 0 && 0 <= hi;
  if (v.answer) {
    if (lo == 0)
      v.witness = argmin;
    else if (hi == 0)
      v.witness = argmax;
  }
  return v;
}

}  // namespace detail

inline IrrelevancyVerdict region_irrelevancy(const DecisionTree& tree, const Entity& e,
                                             std::size_t feature, const Hyperrectangle& box) {
  const ShapInterval iv = shap_interval(tree, e, feature, box);
  return detail::irrelevancy_from_interval(iv.lo, iv.hi, iv.argmin, iv.argmax);
}

/// The same decision queries for a raw multilinear objective over a box —
/// the form produced by the satisfiability gadget.  The objective's
/// variables must all belong to the box's feature space.

inline ThresholdVerdict polynomial_region_max(const MultilinearPolynomial& f,
                                              const Hyperrectangle& box, const Rational& q) {
  const BoxRange range = polynomial_range(f, box);
  ThresholdVerdict v;
  v.best = range.max.value;
  v.answer = range.max.value >= q;
  if (v.answer) v.witness = box.vertex(range.max.vertex);
  return v;
}

inline ThresholdVerdict polynomial_region_min(const MultilinearPolynomial& f,
                                              const Hyperrectangle& box, const Rational& q) {
  const BoxRange range = polynomial_range(f, box);
  ThresholdVerdict v;
  v.best = range.min.value;
  v.answer = range.min.value <= q;
  if (v.answer) v.witness = box.vertex(range.min.vertex);
  return v;
}

inline AmbiguityVerdict polynomial_region_ambiguity(const MultilinearPolynomial& f,
                                                    const Hyperrectangle& box) {
  const BoxRange range = polynomial_range(f, box);
  AmbiguityVerdict v;
  v.lo = range.min.value;
  v.hi = range.max.value;
  v.answer = v.hi > 0 && v.lo < 0;
  if (v.answer) {
    v.positive_witness = box.vertex(range.max.vertex);
    v.negative_witness = box.vertex(range.min.vertex);
  }
  return v;
}

inline IrrelevancyVerdict polynomial_region_irrelevancy(const MultilinearPolynomial& f,
                                                        const Hyperrectangle& box) {
  const BoxRange range = polynomial_range(f, box);
  return detail::irrelevancy_from_interval(range.min.value, range.max.value,
                                           box.vertex(range.min.vertex),
                                           box.vertex(range.max.vertex));
}

/// Verdict of the dominance query: does `feature`'s SHAP score stay >= the
/// other feature's everywhere in the box?  A negative answer carries a
/// distribution where the order flips strictly.
struct DominanceVerdict {
  bool answer = false;
  std::optional<ProductDistribution> counterexample;  // set when answer is false
  Rational min_difference;
};

inline DominanceVerdict feature_dominance(const DecisionTree& tree, const Entity& e,
                                          std::size_t feature, std::size_t other,
                                          const Hyperrectangle& box) {
  require_same_space(tree.space(), box.space(), "feature_dominance");
  require_same_space(tree.space(), e.space(), "feature_dominance");
  if (feature >= tree.space().size() || other >= tree.space().size())
    throw Error("feature index out of range");
  if (feature == other) throw Error("feature_dominance requires two distinct features");
  detail::check_vertex_guard(box, "feature_dominance");

  std::optional<MultilinearPolynomial> diff;
  try {
    diff = shap_polynomial(tree, e, feature) - shap_polynomial(tree, e, other);
  } catch (const GuardError&) {
  }

  BoxRange range;
  if (diff && diff->monomial_count() <= kPolynomialRouteLimit) {
    range = polynomial_range(*diff, box);
  } else {
    const std::uint64_t count = std::uint64_t{1} << box.free_count();
    for (std::uint64_t k = 0; k < count; ++k) {
      const ProductDistribution p = box.vertex(k);
      const Rational v =
          shap_tree_eval(tree, p, e, feature) - shap_tree_eval(tree, p, e, other);
      if (k == 0 || v < range.min.value) range.min = {v, k};
      if (k == 0 || v > range.max.value) range.max = {v, k};
    }
  }

  DominanceVerdict v;
  v.min_difference = range.min.value;
  v.answer = range.min.value >= 0;
  if (!v.answer) v.counterexample = box.vertex(range.min.vertex);
  return v;
}

/// SHAP scores of every feature at every vertex of the box: scores[x][k] is
/// feature x's score at vertex k.  The shared backbone of ranking analysis
/// and the experiment pipeline.
inline std::vector<std::vector<Rational>> shap_vertex_scores(const DecisionTree& tree,
                                                             const Entity& e,
                                                             const Hyperrectangle& box) {
  require_same_space(tree.space(), box.space(), "shap_vertex_scores");
  require_same_space(tree.space(), e.space(), "shap_vertex_scores");
  if (box.free_count() > detail::kDenseBits)
    throw GuardError("shap_vertex_scores supports at most 2^" +
                     std::to_string(detail::kDenseBits) + " vertices");

  const std::size_t n = tree.space().size();
  std::vector<std::vector<Rational>> scores;
  scores.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::optional<MultilinearPolynomial> poly;
    try {
      poly = shap_polynomial(tree, e, x);
    } catch (const GuardError&) {
    }
    if (poly && poly->monomial_count() <= kPolynomialRouteLimit) {
      scores.push_back(polynomial_vertex_values(*poly, box));
    } else {
      const std::uint64_t count = std::uint64_t{1} << box.free_count();
      std::vector<Rational> column;
      column.reserve(count);
      for (std::uint64_t k = 0; k < count; ++k)
        column.push_back(shap_tree_eval(tree, box.vertex(k), e, x));
      scores.push_back(std::move(column));
    }
  }
  return scores;
}

/// The ranking induced by a score vector: feature indices sorted by
/// descending score, ties broken toward the lower feature index.
inline std::vector<std::size_t> ranking_of(const std::vector<Rational>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

/// One distinct top-k prefix observed among the box's vertices.
struct RankingPrefix {
  std::vector<std::size_t> features;  // the prefix, most important first
  std::uint64_t first_vertex = 0;     // first vertex (in vertex order) showing it
  std::uint64_t vertex_count = 0;     // how many vertices show it
};

/// A pairwise certificate entry: `above` dominates `below` across the box.
struct DominanceFact {
  std::size_t above = 0;
  std::size_t below = 0;
  Rational min_difference;
};

/// Sensitivity of the top-k ranking to the choice of distribution inside the
/// box.
struct RankingSensitivity {
  std::size_t k = 0;
  std::vector<RankingPrefix> prefixes;  // in order of first appearance
  bool unanimous = false;
  /// When unanimous: adjacent-pair dominance facts for the prefix, plus
  /// prefix-last over every feature outside it — together they certify the
  /// prefix on the whole box, not just its vertices.
  std::vector<DominanceFact> certificate;
};

/// Sensitivity analysis over a precomputed score matrix (scores[x][k] =
/// feature x's score at vertex k).
inline std::vector<RankingSensitivity> sensitivity_from_scores(
    const std::vector<std::vector<Rational>>& scores,
    const std::vector<std::size_t>& prefix_lengths) {
  const std::size_t n = scores.size();
  if (n == 0) throw Error("sensitivity_from_scores needs at least one feature");
  const std::uint64_t count = scores.front().size();

  std::vector<std::vector<std::size_t>> rankings;
  rankings.reserve(count);
  std::vector<Rational> at_vertex(n);
  for (std::uint64_t k = 0; k < count; ++k) {
    for (std::size_t x = 0; x < n; ++x) at_vertex[x] = scores[x][k];
    rankings.push_back(ranking_of(at_vertex));
  }

  // Exact minimum of scores[a] - scores[b] over all vertices, for the
  // certificate.
  auto min_difference = [&](std::size_t a, std::size_t b) {
    Rational best = scores[a][0] - scores[b][0];
    for (std::uint64_t k = 1; k < count; ++k) {
      Rational d = scores[a][k] - scores[b][k];
      if (d < best) best = d;
    }
    return best;
  };

  std::vector<RankingSensitivity> out;
  out.reserve(prefix_lengths.size());
  for (std::size_t k_len : prefix_lengths) {
    RankingSensitivity sens;
    sens.k = std::min(k_len, n);
    for (std::uint64_t k = 0; k < count; ++k) {
      std::vector<std::size_t> prefix(rankings[k].begin(),
                                      rankings[k].begin() + static_cast<long>(sens.k));
      auto it = std::find_if(sens.prefixes.begin(), sens.prefixes.end(),
                             [&](const RankingPrefix& p) { return p.features == prefix; });
      if (it == sens.prefixes.end())
        sens.prefixes.push_back(RankingPrefix{std::move(prefix), k, 1});
      else
        ++it->vertex_count;
    }
    sens.unanimous = sens.prefixes.size() == 1;
    if (sens.unanimous) {
      const std::vector<std::size_t>& prefix = sens.prefixes.front().features;
      std::vector<char> in_prefix(n, 0);
      for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
        sens.certificate.push_back(
            DominanceFact{prefix[i], prefix[i + 1], min_difference(prefix[i], prefix[i + 1])});
      }
      for (std::size_t f : prefix) in_prefix[f] = 1;
      if (!prefix.empty()) {
        const std::size_t last = prefix.back();
        for (std::size_t g = 0; g < n; ++g)
          if (!in_prefix[g])
            sens.certificate.push_back(DominanceFact{last, g, min_difference(last, g)});
      }
    }
    out.push_back(std::move(sens));
  }
  return out;
}

inline std::vector<RankingSensitivity> ranking_sensitivity(
    const DecisionTree& tree, const Entity& e, const Hyperrectangle& box,
    const std::vector<std::size_t>& prefix_lengths) {
  return sensitivity_from_scores(shap_vertex_scores(tree, e, box), prefix_lengths);
}

}  // namespace shapbox
