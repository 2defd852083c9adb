#pragma once

#include <utility>

#include "shapbox/error.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

namespace detail {

/// Sign of sqrt(d)/b - m for integers d >= 0, b > 0 and rational m: squares
/// both sides, so every comparison is exact integer arithmetic.
inline int compare_sqrt_to_rational(const Integer& d, const Integer& b, const Rational& m) {
  if (m < 0) return d == 0 && m == 0 ? 0 : 1;
  // sqrt(d)/b vs m  <=>  d * den(m)^2 vs num(m)^2 * b^2
  const Integer lhs = d * denominator(m) * denominator(m);
  const Integer rhs = numerator(m) * numerator(m) * b * b;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

/// Chooses the better of two approximations to x (given by an exact
/// comparator against rationals); ties prefer the smaller denominator, then
/// the smaller numerator.
template <class CompareToX>
Rational closer_to(const Rational& r, const Rational& s, CompareToX&& compare) {
  // |x-r| < |x-s|  <=>  (r-s) * (2x-(r+s)) > 0: x sits on r's side of the
  // midpoint exactly when it is strictly closer to r.
  if (r == s) return r;
  const Rational midpoint_doubled = r + s;
  const int x_vs_mid = compare(midpoint_doubled / 2);
  const bool r_greater = r > s;
  const int side = r_greater ? x_vs_mid : -x_vs_mid;  // >0 when r is closer
  if (side > 0) return r;
  if (side < 0) return s;
  // Equidistant: prefer the structurally smaller candidate.
  if (denominator(r) != denominator(s)) return denominator(r) < denominator(s) ? r : s;
  return numerator(r) < numerator(s) ? r : s;
}

}  // namespace detail

/// The best rational approximation to sqrt(value) among all rationals with
/// denominator at most max_denominator: no other such rational is strictly
/// closer (equidistant candidates resolve to the smaller denominator, then
/// the smaller numerator).  Exact when sqrt(value) itself is rational and
/// fits the bound.  Runs on the continued fraction of the target, so the
/// denominator bound can be astronomically large.
inline Rational sqrt_best_approx(const Rational& value, const Integer& max_denominator) {
  if (value < 0) throw Error("sqrt_best_approx requires a non-negative value");
  if (max_denominator < 1) throw Error("sqrt_best_approx requires a positive denominator bound");

  // x = sqrt(num/den) = sqrt(num*den) / den.
  const Integer d = numerator(value) * denominator(value);
  const Integer b = denominator(value);
  const Integer root = boost::multiprecision::sqrt(d);  // floor sqrt
  const bool perfect = root * root == d;

  auto compare_to_x = [&](const Rational& m) {
    if (perfect) {
      const Rational x(root, b);
      return x < m ? -1 : (x > m ? 1 : 0);
    }
    return detail::compare_sqrt_to_rational(d, b, m);
  };

  // Continued-fraction state.  For the irrational case the tail after k
  // partial quotients is (p + sqrt(d)) / q, maintained exactly; q divides
  // d - p^2 throughout.  For the rational case we run the Euclidean
  // algorithm on root/b instead.
  Integer cf_p = 0, cf_q = b;          // irrational state
  Integer eu_num = root, eu_den = b;   // rational state (x = eu_num/eu_den)

  auto next_partial_quotient = [&]() -> Integer {
    if (perfect) {
      const Integer a = eu_num / eu_den;  // floor, both positive
      const Integer rem = eu_num - a * eu_den;
      eu_num = eu_den;
      eu_den = rem;  // 0 signals exact termination
      return a;
    }
    const Integer a = (cf_p + root) / cf_q;
    const Integer p_next = a * cf_q - cf_p;
    const Integer q_next = (d - p_next * p_next) / cf_q;
    cf_p = p_next;
    cf_q = q_next;
    return a;
  };

  // Convergents h/k; (h1, k1) is the most recent, seeded with the formal
  // (-2)-th and (-1)-th convergents so that h2 = a*h1 + h0 starts correctly.
  Integer h0 = 0, k0 = 1;
  Integer h1 = 1, k1 = 0;
  bool have_convergent = false;

  while (true) {
    if (perfect && eu_den == 0) {
      // The expansion ended: x itself is the last convergent and it fits.
      return Rational(h1, k1);
    }
    const Integer a = next_partial_quotient();
    const Integer h2 = a * h1 + h0;
    const Integer k2 = a * k1 + k0;
    if (k2 > max_denominator) {
      // The next convergent is out of reach.  The only remaining candidates
      // for best approximation are the current convergent and the largest
      // in-bound semiconvergent on top of it.
      if (!have_convergent) {
        // Not even the first convergent fits (impossible: k = 1 always fits).
        throw Error("sqrt_best_approx: internal convergent bound error");
      }
      const Rational convergent(h1, k1);
      const Integer j = (max_denominator - k0) / k1;
      if (j <= 0) return convergent;
      const Rational semiconvergent(j * h1 + h0, j * k1 + k0);
      return detail::closer_to(convergent, semiconvergent, compare_to_x);
    }
    h0 = std::exchange(h1, h2);
    k0 = std::exchange(k1, k2);
    have_convergent = true;
  }
}

}  // namespace shapbox
