#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace shapbox;

namespace {
const FeatureSpacePtr kSpace = make_space({"x", "y", "z"});
}

TEST_CASE("product distributions validate probabilities", "[distribution]") {
  const ProductDistribution d(kSpace, {Rational(1, 2), Rational(1, 2), Rational(3, 4)});
  CHECK(d.prob(2) == Rational(3, 4));
  CHECK(d.prob_of_value(2, 1) == Rational(3, 4));
  CHECK(d.prob_of_value(2, 0) == Rational(1, 4));

  CHECK_THROWS_AS(ProductDistribution(kSpace, {Rational(1, 2), Rational(1, 2)}), Error);
  CHECK_THROWS_AS(
      ProductDistribution(kSpace, {Rational(-1, 2), Rational(1, 2), Rational(1, 2)}), Error);
  CHECK_THROWS_AS(
      ProductDistribution(kSpace, {Rational(3, 2), Rational(1, 2), Rational(1, 2)}), Error);
}

TEST_CASE("entity probability is the product of per-feature factors", "[distribution]") {
  const ProductDistribution d(kSpace, {Rational(1, 2), Rational(1, 3), Rational(3, 4)});
  // P(1,0,1) = 1/2 * 2/3 * 3/4 = 1/4
  CHECK(d.entity_probability(Entity(kSpace, std::uint64_t{0b101})) == Rational(1, 4));

  // Probabilities over all entities sum to 1.
  Rational total = 0;
  for (std::uint64_t w = 0; w < 8; ++w) total += d.entity_probability(Entity(kSpace, w));
  CHECK(total == 1);
}

TEST_CASE("conditional probability fixes the conditioned features", "[distribution]") {
  const ProductDistribution d(kSpace, {Rational(1, 2), Rational(1, 3), Rational(3, 4)});
  const Entity anchor(kSpace, std::uint64_t{0b011});  // x=1, y=1, z=0

  // Conditioning on {x}: target must agree on x, remaining factors multiply.
  const Entity target(kSpace, std::uint64_t{0b001});  // x=1, y=0, z=0
  CHECK(conditional_probability(d, target, anchor, 0b001) ==
        Rational(2, 3) * Rational(1, 4));

  // Disagreement on a conditioned feature is an error.
  const Entity bad(kSpace, std::uint64_t{0b000});
  CHECK_THROWS_AS(conditional_probability(d, bad, anchor, 0b001), Error);

  // Conditioning on everything leaves probability 1.
  CHECK(conditional_probability(d, anchor, anchor, 0b111) == 1);
}

TEST_CASE("conditional probabilities agree with the enumeration oracle", "[distribution]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + draw_below(rng, 4);
    const FeatureSpacePtr space = testsupport::small_space(n);
    const ProductDistribution d = testsupport::random_distribution(rng, space);
    const Entity e = testsupport::random_entity(rng, space);
    const TruthTableModel m = testsupport::random_truth_table(rng, space);
    const std::uint64_t fixed = draw_below(rng, std::uint64_t{1} << n);

    // The library's expected value (via free-feature enumeration) must match
    // the filter-everything oracle, including when the conditioning event has
    // probability zero and both fall back to the forced product.
    CHECK(expected_value_given(m, d, e, fixed) ==
          testsupport::expected_value_oracle(m, d, e, fixed));
  }
}
