#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace shapbox;

namespace {
const FeatureSpacePtr kSpace = make_space({"x", "y", "z"});

TruthTableModel example_table() {
  // Accepts 000, 001, 010, 100 (value vectors over x, y, z).
  return TruthTableModel(kSpace, {0b000, 0b100, 0b010, 0b001});
}
}  // namespace

TEST_CASE("truth tables evaluate membership", "[model]") {
  const TruthTableModel m = example_table();
  CHECK(m.evaluate(Entity(kSpace, std::uint64_t{0b000})));
  CHECK(m.evaluate(Entity(kSpace, std::uint64_t{0b100})));  // z = 1
  CHECK_FALSE(m.evaluate(Entity(kSpace, std::uint64_t{0b011})));
  CHECK_FALSE(m.evaluate(Entity(kSpace, std::uint64_t{0b111})));

  CHECK_THROWS_AS(TruthTableModel(kSpace, {0b000, 0b000}), Error);  // duplicate
  CHECK_THROWS_AS(TruthTableModel(kSpace, {0b1000}), Error);        // out of range
}

TEST_CASE("decision tree builder validates structure", "[model]") {
  {
    DecisionTree::Builder b(kSpace);
    const auto yes = b.leaf(true);
    const auto no = b.leaf(false);
    const auto root = b.node(0, no, yes);
    const DecisionTree t = b.finish(root);
    CHECK(t.node_count() == 3);
    CHECK(t.depth() == 1);
    CHECK(t.evaluate(Entity(kSpace, std::uint64_t{0b001})));
    CHECK_FALSE(t.evaluate(Entity(kSpace, std::uint64_t{0b000})));
  }
  {
    // A node used as both children of its parent: reachable twice.
    DecisionTree::Builder b(kSpace);
    const auto leaf = b.leaf(true);
    CHECK_THROWS_AS(b.finish(b.node(0, leaf, leaf)), Error);
  }
  {
    // Unreachable node.
    DecisionTree::Builder b(kSpace);
    const auto stray = b.leaf(true);
    (void)stray;
    const auto yes = b.leaf(true);
    const auto no = b.leaf(false);
    CHECK_THROWS_AS(b.finish(b.node(0, no, yes)), Error);
  }
  {
    // Feature repeated along a path.
    DecisionTree::Builder b(kSpace);
    const auto yes = b.leaf(true);
    const auto no = b.leaf(false);
    const auto inner = b.node(0, no, yes);
    const auto lone = b.leaf(false);
    CHECK_THROWS_AS(b.finish(b.node(0, lone, inner)), Error);
  }
}

TEST_CASE("accepting paths fix exactly the tested features", "[model]") {
  // Tree: test z; z=0 -> test x (x=1 accepts); z=1 -> accept.
  DecisionTree::Builder b(kSpace);
  const auto rej = b.leaf(false);
  const auto acc1 = b.leaf(true);
  const auto x_node = b.node(0, rej, acc1);
  const auto acc2 = b.leaf(true);
  const DecisionTree t = b.finish(b.node(2, x_node, acc2));

  const std::vector<PathAssignment> paths = t.accepting_paths();
  REQUIRE(paths.size() == 2);
  // Zero-branch-first order: (z=0, x=1) before (z=1).
  CHECK(paths[0].fixed == 0b101);
  CHECK(paths[0].values == 0b001);
  CHECK(paths[1].fixed == 0b100);
  CHECK(paths[1].values == 0b100);
}

TEST_CASE("truth table converts to an equivalent tree", "[model]") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + draw_below(rng, 4);
    const FeatureSpacePtr space = testsupport::small_space(n);
    const TruthTableModel table = testsupport::random_truth_table(rng, space);
    const DecisionTree tree = to_decision_tree(table);
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
      const Entity e(space, w);
      CHECK(tree.evaluate(e) == table.evaluate(e));
    }
  }
}

TEST_CASE("negation flips every prediction", "[model]") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + draw_below(rng, 4);
    const FeatureSpacePtr space = testsupport::small_space(n);
    const TruthTableModel table = testsupport::random_truth_table(rng, space);
    const TruthTableModel flipped_table = negated(table);
    const DecisionTree tree = to_decision_tree(table);
    const DecisionTree flipped_tree = negated(tree);
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
      const Entity e(space, w);
      CHECK(flipped_table.evaluate(e) == !table.evaluate(e));
      CHECK(flipped_tree.evaluate(e) == !tree.evaluate(e));
    }
  }
}

TEST_CASE("dummy features never affect evaluation", "[model]") {
  const TruthTableModel table = example_table();
  const TruthTableModel extended = with_dummy_feature(table, "w");
  CHECK(extended.space().size() == 4);
  const FeatureSpacePtr wide = extended.space_ptr();
  for (std::uint64_t w = 0; w < 16; ++w) {
    const Entity e(wide, w);
    const Entity narrow(kSpace, w & 0b111);
    CHECK(extended.evaluate(e) == table.evaluate(narrow));
  }

  const DecisionTree tree = to_decision_tree(table);
  const DecisionTree tree_ext = with_dummy_feature(tree, "w");
  CHECK(tree_ext.space().size() == 4);
  for (std::uint64_t w = 0; w < 16; ++w) {
    const Entity e(tree_ext.space_ptr(), w);
    const Entity narrow(kSpace, w & 0b111);
    CHECK(tree_ext.evaluate(e) == tree.evaluate(narrow));
  }

  CHECK_THROWS_AS(with_dummy_feature(table, "x"), Error);  // name collision
}

TEST_CASE("constant trees and model variant helpers", "[model]") {
  const DecisionTree always = DecisionTree::constant(kSpace, true);
  CHECK(always.node_count() == 1);
  CHECK(always.evaluate(Entity(kSpace, std::uint64_t{0})));

  const Model m1 = example_table();
  const Model m2 = to_decision_tree(example_table());
  CHECK(model_space(m1).size() == 3);
  CHECK(model_space(m2).size() == 3);
  for (std::uint64_t w = 0; w < 8; ++w) {
    const Entity e(kSpace, w);
    CHECK(evaluate(m1, e) == evaluate(m2, e));
    CHECK(evaluate(negated(m1), e) == !evaluate(m1, e));
  }
  const DecisionTree via_variant = as_decision_tree(m1);
  CHECK(via_variant.evaluate(Entity(kSpace, std::uint64_t{0b100})));
}
