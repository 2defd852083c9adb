#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "shapbox/error.hpp"

namespace shapbox {

/// Arbitrary-precision integers and rationals.  Rationals are always kept in
/// canonical form (coprime numerator/denominator, positive denominator) by the
/// backend, so == is exact structural equality.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// n! as an exact integer.
inline Integer factorial(unsigned n) {
  Integer r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Binomial coefficient C(n, k) as an exact integer; 0 when k > n.
inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  Integer r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;  // exact: r is always a binomial coefficient here
  }
  return r;
}

/// Parses a rational from text.  Accepted forms, with optional surrounding
/// whitespace and an optional leading sign:
///
///   "3/4"        fraction of two decimal integers (denominator unsigned)
///   "42"         integer
///   "0.125"      decimal fraction
///   "2.5e-3"     decimal fraction with exponent
///
/// Throws ParseError (with byte offset) on malformed input or a zero
/// denominator.
inline Rational parse_rational(std::string_view text) {
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto fail = [&](const std::string& msg, std::size_t at) -> Rational {
    throw ParseError("cannot parse rational \"" + std::string(text) + "\": " + msg, at);
  };

  while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t end = n;
  while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (i == end) return fail("empty input", i);

  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }

  auto read_digits = [&](std::size_t& pos) -> std::string {
    std::size_t start = pos;
    while (pos < end && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return std::string(text.substr(start, pos - start));
  };

  const std::string int_part = read_digits(i);

  // Fraction form: digits '/' digits.
  if (i < end && text[i] == '/') {
    if (int_part.empty()) return fail("expected numerator digits", i);
    ++i;
    const std::size_t den_at = i;
    const std::string den_part = read_digits(i);
    if (den_part.empty()) return fail("expected denominator digits", den_at);
    if (i != end) return fail("trailing characters", i);
    Integer num(int_part), den(den_part);
    if (den == 0) return fail("zero denominator", den_at);
    if (negative) num = -num;
    return Rational(num, den);
  }

  // Decimal form: digits [. digits] [e|E [sign] digits].
  std::string frac_part;
  if (i < end && text[i] == '.') {
    ++i;
    frac_part = read_digits(i);
  }
  if (int_part.empty() && frac_part.empty()) return fail("expected digits", i);

  long exponent = 0;
  if (i < end && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < end && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    const std::size_t exp_at = i;
    const std::string exp_part = read_digits(i);
    if (exp_part.empty()) return fail("expected exponent digits", exp_at);
    if (exp_part.size() > 6) return fail("exponent out of range", exp_at);
    exponent = std::atol(exp_part.c_str());
    if (exp_negative) exponent = -exponent;
  }
  if (i != end) return fail("trailing characters", i);

  Integer num(int_part.empty() ? "0" : int_part);
  for (char c : frac_part) {
    num *= 10;
    num += c - '0';
  }
  Integer den = 1;
  long shift = exponent - static_cast<long>(frac_part.size());
  for (long k = 0; k < shift; ++k) num *= 10;
  for (long k = 0; k > shift; --k) den *= 10;
  if (negative) num = -num;
  return Rational(num, den);
}

/// Canonical text form: "num/den", or just "num" for integers.
inline std::string to_fraction_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Decimal rendering with 17 significant digits (enough to round-trip an IEEE
/// double).
inline std::string to_decimal_string(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", to_double(r));
  return buf;
}

/// Clamps r into [lo, hi].
inline Rational clamp(const Rational& r, const Rational& lo, const Rational& hi) {
  if (r < lo) return lo;
  if (r > hi) return hi;
  return r;
}

}  // namespace shapbox
