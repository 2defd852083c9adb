#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace shapbox;

namespace {
const FeatureSpacePtr kSpace = make_space({"x", "y", "z"});

Hyperrectangle example_box_1() {
  return Hyperrectangle(kSpace, {Rational(1, 3), Rational(1), Rational(1, 3)},
                        {Rational(1, 2), Rational(1), Rational(2, 3)});
}
}  // namespace

TEST_CASE("hyperrectangles validate their bounds", "[box]") {
  CHECK_NOTHROW(example_box_1());
  // lo > hi
  CHECK_THROWS_AS(Hyperrectangle(kSpace, {Rational(1, 2), Rational(0), Rational(0)},
                                 {Rational(1, 3), Rational(1), Rational(1)}),
                  Error);
  // outside [0,1]
  CHECK_THROWS_AS(Hyperrectangle(kSpace, {Rational(-1, 3), Rational(0), Rational(0)},
                                 {Rational(1, 2), Rational(1), Rational(1)}),
                  Error);
  CHECK_THROWS_AS(Hyperrectangle(kSpace, {Rational(0), Rational(0), Rational(0)},
                                 {Rational(3, 2), Rational(1), Rational(1)}),
                  Error);
  // arity mismatch
  CHECK_THROWS_AS(Hyperrectangle(kSpace, {Rational(0)}, {Rational(1)}), Error);
}

TEST_CASE("degenerate coordinates are excluded from the vertex set", "[box]") {
  const Hyperrectangle box = example_box_1();
  CHECK(box.degenerate(1));
  CHECK_FALSE(box.degenerate(0));
  CHECK(box.free_features() == std::vector<std::size_t>{0, 2});
  CHECK(box.free_count() == 2);
  CHECK(box.vertex_count() == 4);

  const Hyperrectangle point = Hyperrectangle::point(
      ProductDistribution(kSpace, {Rational(1, 2), Rational(1, 2), Rational(3, 4)}));
  CHECK(point.free_count() == 0);
  CHECK(point.vertex_count() == 1);
}

TEST_CASE("vertex order is the documented bit contract", "[box]") {
  // Bit (d-1-j) of the vertex number selects hi for the j-th free feature,
  // so vertices enumerate in lexicographic order over the free coordinates.
  const Hyperrectangle box = example_box_1();
  const std::vector<std::vector<Rational>> expected = {
      {Rational(1, 3), Rational(1), Rational(1, 3)},
      {Rational(1, 3), Rational(1), Rational(2, 3)},
      {Rational(1, 2), Rational(1), Rational(1, 3)},
      {Rational(1, 2), Rational(1), Rational(2, 3)},
  };
  for (std::uint64_t k = 0; k < 4; ++k) {
    const ProductDistribution v = box.vertex(k);
    CHECK(v.probs() == expected[k]);
  }
  CHECK_THROWS_AS(box.vertex(4), Error);
}

TEST_CASE("containment checks every coordinate", "[box]") {
  const Hyperrectangle box = example_box_1();
  CHECK(box.contains(ProductDistribution(kSpace, {Rational(2, 5), Rational(1), Rational(1, 2)})));
  CHECK_FALSE(
      box.contains(ProductDistribution(kSpace, {Rational(2, 5), Rational(1, 2), Rational(1, 2)})));
  CHECK_FALSE(
      box.contains(ProductDistribution(kSpace, {Rational(1, 4), Rational(1), Rational(1, 2)})));

  // Every vertex lies in the box.
  for (std::uint64_t k = 0; k < 4; ++k) CHECK(box.contains(box.vertex(k)));
}

TEST_CASE("random boxes contain their vertices and interior points", "[box]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + draw_below(rng, 5);
    const Hyperrectangle box = testsupport::random_box(rng, testsupport::small_space(n));
    const std::uint64_t count = std::uint64_t{1} << box.free_count();
    for (std::uint64_t k = 0; k < count; ++k) CHECK(box.contains(box.vertex(k)));
    for (int p = 0; p < 5; ++p)
      CHECK(box.contains(testsupport::random_interior_point(rng, box)));
  }
}
