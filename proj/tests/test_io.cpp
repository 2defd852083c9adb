#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "support.hpp"

using namespace shapbox;

namespace {
const FeatureSpacePtr kSpace = make_space({"x", "y", "z"});
}

TEST_CASE("json parsing reports the failure offset", "[io]") {
  CHECK_THROWS_AS(parse_json("{\"a\": }"), ParseError);
  CHECK_NOTHROW(parse_json("{\"a\": 1}"));
  CHECK_THROWS_AS(read_json_file("/nonexistent/definitely/missing.json"), Error);
}

TEST_CASE("rationals load from strings and integers only", "[io]") {
  CHECK(load_rational(Json("3/4"), "t") == Rational(3, 4));
  CHECK(load_rational(Json("0.25"), "t") == Rational(1, 4));
  CHECK(load_rational(Json(-7), "t") == Rational(-7));
  CHECK_THROWS_AS(load_rational(Json(0.25), "t"), ParseError);
  CHECK_THROWS_AS(load_rational(Json("1/0"), "t"), ParseError);
  CHECK_THROWS_AS(load_rational(Json::array(), "t"), ParseError);
}

TEST_CASE("feature spaces round-trip", "[io]") {
  const Json j = feature_space_to_json(*kSpace);
  const FeatureSpacePtr back = load_feature_space(j, "t");
  CHECK(*back == *kSpace);
  CHECK_THROWS_AS(load_feature_space(Json("x"), "t"), ParseError);
  CHECK_THROWS_AS(load_feature_space(Json::array({"x", "x"}), "t"), ParseError);
  CHECK_THROWS_AS(load_feature_space(Json::array({1, 2}), "t"), ParseError);
}

TEST_CASE("regions round-trip and validate", "[io]") {
  const Hyperrectangle box(kSpace, {Rational(1, 3), Rational(1), Rational(1, 3)},
                           {Rational(1, 2), Rational(1), Rational(2, 3)});
  const Hyperrectangle back = load_region(region_to_json(box));
  CHECK(back == box);

  CHECK_THROWS_AS(load_region(Json{{"features", {"x"}}, {"lo", {"0"}}}), ParseError);
  CHECK_THROWS_AS(
      load_region(Json{{"features", {"x"}}, {"lo", {"0", "0"}}, {"hi", {"1", "1"}}}),
      ParseError);
  CHECK_THROWS_AS(load_region(Json{{"features", {"x"}}, {"lo", {"1"}}, {"hi", {"0"}}}),
                  ParseError);
  CHECK_THROWS_AS(load_region(Json{{"features", {"x"}}, {"lo", {"0"}}, {"hi", {"2"}}}),
                  ParseError);
  // Float bounds are rejected, not silently approximated.
  CHECK_THROWS_AS(load_region(Json{{"features", {"x"}}, {"lo", {0.1}}, {"hi", {"1"}}}),
                  ParseError);
}

TEST_CASE("distributions load from both accepted forms", "[io]") {
  const ProductDistribution d(kSpace, {Rational(1, 2), Rational(1, 2), Rational(3, 4)});
  CHECK(load_distribution(distribution_to_json(d)) == d);

  // Degenerate box form.
  const Json box{{"features", {"x", "y", "z"}},
                 {"lo", {"1/2", "1/2", "3/4"}},
                 {"hi", {"1/2", "1/2", "3/4"}}};
  CHECK(load_distribution(box) == d);

  // A box with freedom is not a distribution.
  const Json wide{{"features", {"x", "y", "z"}},
                  {"lo", {"1/2", "1/2", "0"}},
                  {"hi", {"1/2", "1/2", "3/4"}}};
  CHECK_THROWS_AS(load_distribution(wide), ParseError);
  CHECK_THROWS_AS(load_distribution(Json{{"features", {"x"}}, {"probs", {"2"}}}), ParseError);
}

TEST_CASE("decision trees round-trip", "[io]") {
  const DecisionTree tree =
      to_decision_tree(TruthTableModel(kSpace, {0b000, 0b100, 0b010, 0b001}));
  const DecisionTree back = load_decision_tree(decision_tree_to_json(tree));
  CHECK(back == tree);

  CHECK_THROWS_AS(load_decision_tree(Json{{"features", {"x"}}}), ParseError);
  CHECK_THROWS_AS(
      load_decision_tree(Json{{"features", {"x"}}, {"root", Json{{"leaf", 2}}}}),
      ParseError);
  CHECK_THROWS_AS(load_decision_tree(Json{
                      {"features", {"x"}},
                      {"root", Json{{"test", "y"},
                                    {"zero", Json{{"leaf", 0}}},
                                    {"one", Json{{"leaf", 1}}}}}}),
                  ParseError);
  // A feature repeating along a path is rejected at load time.
  const Json inner{{"test", "x"}, {"zero", Json{{"leaf", 0}}}, {"one", Json{{"leaf", 1}}}};
  CHECK_THROWS_AS(
      load_decision_tree(Json{{"features", {"x"}},
                              {"root", Json{{"test", "x"},
                                            {"zero", inner},
                                            {"one", Json{{"leaf", 1}}}}}}),
      ParseError);
}

TEST_CASE("truth tables round-trip", "[io]") {
  const TruthTableModel table(kSpace, {0b000, 0b100, 0b010, 0b001});
  const TruthTableModel back = load_truth_table(truth_table_to_json(table));
  CHECK(back.space() == table.space());
  CHECK(back.accepted() == table.accepted());

  CHECK_THROWS_AS(load_truth_table(Json{{"features", {"x"}}, {"accepted", {{0, 1}}}}),
                  ParseError);
  CHECK_THROWS_AS(load_truth_table(Json{{"features", {"x"}}, {"accepted", {{2}}}}),
                  ParseError);
  // Duplicate rows are a table error surfaced as a parse error.
  CHECK_THROWS_AS(load_truth_table(Json{{"features", {"x"}}, {"accepted", {{1}, {1}}}}),
                  ParseError);
}

TEST_CASE("the model loader dispatches on the document shape", "[io]") {
  const DecisionTree tree =
      to_decision_tree(TruthTableModel(kSpace, {0b000, 0b100, 0b010, 0b001}));
  const Model as_tree = load_model(decision_tree_to_json(tree));
  CHECK(std::holds_alternative<DecisionTree>(as_tree));
  const Model as_table = load_model(truth_table_to_json(TruthTableModel(kSpace, {0b001})));
  CHECK(std::holds_alternative<TruthTableModel>(as_table));
  CHECK_THROWS_AS(load_model(Json{{"features", {"x"}}}), ParseError);
}

TEST_CASE("polynomials round-trip", "[io]") {
  MultilinearPolynomial f(kSpace);
  f.add_term(0b101, Rational(1, 2));
  f.add_term(0b110, Rational(1, 2));
  f.add_term(0b111, Rational(-2, 3));
  const MultilinearPolynomial back = load_polynomial(polynomial_to_json(f));
  CHECK(back == f);

  CHECK_THROWS_AS(load_polynomial(Json{{"features", {"x"}}, {"terms", "no"}}), ParseError);
  CHECK_THROWS_AS(
      load_polynomial(Json{
          {"features", {"x"}},
          {"terms", {Json{{"monomial", {"y"}}, {"coeff", "1"}}}}}),
      ParseError);
  CHECK_THROWS_AS(
      load_polynomial(Json{
          {"features", {"x"}},
          {"terms", {Json{{"monomial", {"x", "x"}}, {"coeff", "1"}}}}}),
      ParseError);
  CHECK_THROWS_AS(
      load_polynomial(Json{
          {"features", {"x"}},
          {"terms", {Json{{"monomial", {"x"}}, {"coeff", 0.5}}}}}),
      ParseError);
}

TEST_CASE("entities load from json and bit strings", "[io]") {
  const Entity e(kSpace, std::uint64_t{0b101});
  const Entity back = load_entity(entity_to_json(e), kSpace);
  CHECK(back == e);

  CHECK_THROWS_AS(load_entity(Json{{"values", {0, 1}}}, kSpace), ParseError);
  CHECK_THROWS_AS(load_entity(Json{{"values", {0, 1, 2}}}, kSpace), ParseError);
  CHECK_THROWS_AS(load_entity(Json{{"features", {"a", "b", "c"}},
                                   {"values", {0, 0, 0}}},
                              kSpace),
                  ParseError);

  CHECK(parse_entity_bits("101", kSpace) == e);
  CHECK(parse_entity_bits("000", kSpace).bits() == 0);
  CHECK_THROWS_AS(parse_entity_bits("10", kSpace), ParseError);
  try {
    parse_entity_bits("1x0", kSpace);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.position == 1);
  }
}

TEST_CASE("json files write and read back", "[io]") {
  const std::string path = "shapbox_io_test_tmp.json";
  const Json doc{{"features", {"x", "y", "z"}}, {"probs", {"1/2", "1/2", "3/4"}}};
  write_json_file(path, doc);
  const Json back = read_json_file(path);
  CHECK(back == doc);
  CHECK(load_distribution(back).prob(2) == Rational(3, 4));
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_json_file("/nonexistent/dir/file.json", doc), Error);
}
