#pragma once

// Shared test helpers: independent oracles (deliberately written along
// different routes than the library code under test) and seeded random
// instance generators.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "shapbox/shapbox.hpp"

namespace testsupport {

using namespace shapbox;

// ---------------------------------------------------------------------------
// Conditional-expectation oracle: direct enumeration over all 2^n entities.
// The library computes it by enumerating only the free features; this walks
// the whole entity space and conditions by filtering, a different route.
inline Rational expected_value_oracle(const Model& m, const ProductDistribution& dist,
                                      const Entity& e, std::uint64_t fixed_mask) {
  const std::size_t n = model_space(m).size();
  Rational weighted = 0, total = 0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
    if ((w & fixed_mask) != (e.bits() & fixed_mask)) continue;
    Rational prob = 1;
    for (std::size_t i = 0; i < n; ++i)
      prob *= dist.prob_of_value(i, static_cast<int>((w >> i) & 1));
    total += prob;
    if (evaluate(m, Entity(model_space_ptr(m), w))) weighted += prob;
  }
  if (total != 0) return weighted / total;
  // The conditioning event has probability zero: some fixed feature pins a
  // value the distribution forbids.  The conditional law then degenerates to
  // the forced product - the fixed features held at e, the rest drawn as
  // usual - which is the continuous extension the library computes.
  Rational forced = 0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
    if ((w & fixed_mask) != (e.bits() & fixed_mask)) continue;
    Rational prob = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!((fixed_mask >> i) & 1)) prob *= dist.prob_of_value(i, static_cast<int>((w >> i) & 1));
    if (evaluate(m, Entity(model_space_ptr(m), w))) forced += prob;
  }
  return forced;
}

// SHAP oracle by the permutation average: mean over all n! feature orders of
// the marginal contribution of x given its predecessors.  Equivalent to the
// coalition-weighted definition but computed along an entirely different
// formula (no binomial coefficients involved).
inline Rational permutation_shap_oracle(const Model& m, const ProductDistribution& dist,
                                        const Entity& e, std::size_t x) {
  const std::size_t n = model_space(m).size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rational sum = 0;
  unsigned long permutations = 0;
  do {
    std::uint64_t before = 0;
    for (std::size_t i : order) {
      if (i == x) break;
      before |= std::uint64_t{1} << i;
    }
    const std::uint64_t with_x = before | (std::uint64_t{1} << x);
    sum += expected_value_oracle(m, dist, e, with_x) -
           expected_value_oracle(m, dist, e, before);
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / permutations;
}

// ---------------------------------------------------------------------------
// Random instance generators.  All draws go through draw_below so instances
// are reproducible across standard library implementations.

inline Rational random_probability(std::mt19937_64& rng, std::uint64_t max_denominator = 8) {
  const std::uint64_t den = 1 + draw_below(rng, max_denominator);
  const std::uint64_t num = draw_below(rng, den + 1);
  return Rational(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
}

inline ProductDistribution random_distribution(std::mt19937_64& rng, FeatureSpacePtr space) {
  std::vector<Rational> probs;
  probs.reserve(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) probs.push_back(random_probability(rng));
  return ProductDistribution(std::move(space), std::move(probs));
}

inline Hyperrectangle random_box(std::mt19937_64& rng, FeatureSpacePtr space) {
  std::vector<Rational> lo, hi;
  for (std::size_t i = 0; i < space->size(); ++i) {
    Rational a = random_probability(rng);
    Rational b = random_probability(rng);
    if (b < a) std::swap(a, b);
    if (draw_below(rng, 5) == 0) b = a;  // occasional degenerate coordinate
    lo.push_back(std::move(a));
    hi.push_back(std::move(b));
  }
  return Hyperrectangle(std::move(space), std::move(lo), std::move(hi));
}

inline Entity random_entity(std::mt19937_64& rng, FeatureSpacePtr space) {
  const std::uint64_t bits = draw_below(rng, std::uint64_t{1} << space->size());
  return Entity(std::move(space), bits);
}

inline FeatureSpacePtr small_space(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
  return make_space(std::move(names));
}

// A random truth-table model: each of the 2^n entities accepted with
// probability 1/2.
inline TruthTableModel random_truth_table(std::mt19937_64& rng, FeatureSpacePtr space) {
  std::vector<std::uint64_t> accepted;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << space->size()); ++w)
    if (draw_below(rng, 2) == 0) accepted.push_back(w);
  return TruthTableModel(std::move(space), std::move(accepted));
}

// A random decision tree grown by recursive random splitting: at each node,
// either emit a random leaf or split on a random unused feature.
inline DecisionTree random_tree(std::mt19937_64& rng, FeatureSpacePtr space) {
  DecisionTree::Builder builder(space);
  const std::size_t n = space->size();
  auto grow = [&](auto&& self, std::uint64_t used, std::size_t depth) -> std::int32_t {
    std::vector<std::size_t> unused;
    for (std::size_t i = 0; i < n; ++i)
      if (!((used >> i) & 1)) unused.push_back(i);
    const bool must_leaf = unused.empty();
    if (must_leaf || draw_below(rng, 3) == 0 || depth >= 4)
      return builder.leaf(draw_below(rng, 2) == 1);
    const std::size_t f = unused[draw_below(rng, unused.size())];
    const std::uint64_t used_next = used | (std::uint64_t{1} << f);
    const std::int32_t zero = self(self, used_next, depth + 1);
    const std::int32_t one = self(self, used_next, depth + 1);
    return builder.node(f, zero, one);
  };
  return builder.finish(grow(grow, 0, 0));
}

// A random multilinear polynomial with small integer coefficients.
inline MultilinearPolynomial random_polynomial(std::mt19937_64& rng, FeatureSpacePtr space) {
  MultilinearPolynomial f(space);
  const std::uint64_t masks = std::uint64_t{1} << space->size();
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    if (draw_below(rng, 2) == 0) continue;
    const long coeff = static_cast<long>(draw_below(rng, 9)) - 4;  // -4 .. 4
    if (coeff != 0) f.add_term(mask, Rational(coeff));
  }
  return f;
}

// A random point strictly inside the box (convex combination of lo and hi
// with a random rational weight per coordinate).
inline ProductDistribution random_interior_point(std::mt19937_64& rng,
                                                 const Hyperrectangle& box) {
  std::vector<Rational> p;
  p.reserve(box.space().size());
  for (std::size_t i = 0; i < box.space().size(); ++i) {
    const Rational t = random_probability(rng, 16);
    p.push_back(box.lo(i) + t * (box.hi(i) - box.lo(i)));
  }
  return ProductDistribution(box.space_ptr(), std::move(p));
}

// ---------------------------------------------------------------------------
// Brute-force combinatorial oracles.

inline bool sat_oracle(const Cnf3Formula& formula) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << formula.variables()); ++a)
    if (formula.satisfied_by(a)) return true;
  return false;
}

inline bool vertex_cover_oracle(const VertexCoverInstance& instance) {
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << instance.nodes()); ++s)
    if (static_cast<std::size_t>(std::popcount(s)) <= instance.k() && instance.covers(s))
      return true;
  return false;
}

// ---------------------------------------------------------------------------
// Best-rational-approximation oracle: exhaustive scan over denominators.
// For each denominator b, the best numerator is floor(sqrt(v) * b) or its
// successor; candidates are compared by the exact midpoint rule.

inline Integer integer_sqrt_floor(const Integer& n) {
  if (n < 0) throw Error("negative");
  Integer r = boost::multiprecision::sqrt(n);
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Is |sqrt(v) - r| < |sqrt(v) - s|?  Decided via the midpoint m = (r+s)/2:
// sqrt(v) > m iff v > m^2 (all quantities non-negative).
inline bool strictly_closer_to_sqrt(const Rational& r, const Rational& s, const Rational& v) {
  const Rational m = (r + s) / 2;
  const int side = v > m * m ? 1 : (v < m * m ? -1 : 0);
  if (side == 0) return false;  // equidistant
  return side > 0 ? r > s : r < s;
}

inline Rational sqrt_best_approx_oracle(const Rational& v, unsigned long max_denominator) {
  Rational best;
  bool have = false;
  for (unsigned long b = 1; b <= max_denominator; ++b) {
    const Integer scaled = numerator(v) * Integer(b) * Integer(b);
    const Integer floor_num = integer_sqrt_floor(scaled / denominator(v));
    for (int delta = 0; delta <= 1; ++delta) {
      const Rational candidate(floor_num + delta, Integer(b));
      if (!have || strictly_closer_to_sqrt(candidate, best, v)) {
        best = candidate;
        have = true;
      }
    }
  }
  return best;
}

}  // namespace testsupport
