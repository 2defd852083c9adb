#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace shapbox;

namespace {

/// Writes `text` to a throwaway file and removes it on scope exit.
struct TempCsv {
  std::string path;
  explicit TempCsv(const std::string& name, const std::string& text) : path(name) {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
  ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("the csv reader handles the plain dialect", "[dataset]") {
  const TempCsv file("shapbox_csv_basic.csv",
                     "a,b,c\r\n"
                     "1,2,3\n"
                     "4,,6\n");
  const RawDataset data = load_csv(file.path);
  REQUIRE(data.columns == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(data.rows.size() == 2);
  CHECK(data.rows[0] == std::vector<std::string>{"1", "2", "3"});
  CHECK(data.rows[1] == std::vector<std::string>{"4", "", "6"});
  CHECK(data.column_index("b") == 1);
  CHECK_THROWS_AS(data.column_index("missing"), Error);
}

TEST_CASE("ragged and empty csv files are rejected", "[dataset]") {
  const TempCsv ragged("shapbox_csv_ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(load_csv(ragged.path), ParseError);

  const TempCsv empty("shapbox_csv_empty.csv", "");
  CHECK_THROWS_AS(load_csv(empty.path), ParseError);

  CHECK_THROWS_AS(load_csv("/nonexistent/no.csv"), Error);
}

TEST_CASE("binarization thresholds strictly above the mean", "[dataset]") {
  const TempCsv file("shapbox_csv_binarize.csv",
                     "a,b,cat,target\n"
                     "1,10,INLAND,0\n"
                     "2,20,OCEAN,100\n"
                     "3,30,INLAND,100\n"
                     "4,40,OCEAN,0\n"
                     ",1000000,INLAND,100\n"    // dropped: missing numeric
                     "9,9,OCEAN,NaN\n");        // dropped: NaN target
  const RawDataset raw = load_csv(file.path);

  BinarizationPlan plan;
  plan.numeric_columns = {"a", "b"};
  plan.categorical_column = "cat";
  plan.categorical_zero = {"INLAND"};
  plan.target_column = "target";

  const BinaryDataset data = binarize(raw, plan);
  CHECK(data.dropped_rows == 2);
  REQUIRE(data.size() == 4);
  // Means are taken over the four surviving rows only.
  CHECK(data.numeric_means == std::vector<Rational>{Rational(5, 2), Rational(25)});
  CHECK(data.target_mean == Rational(50));
  CHECK(data.space->names() == std::vector<std::string>{"a", "b", "cat"});

  CHECK(data.rows == std::vector<std::uint64_t>{0b000, 0b100, 0b011, 0b111});
  CHECK(data.labels == std::vector<int>{0, 1, 1, 0});
}

TEST_CASE("a value exactly at the mean maps to zero", "[dataset]") {
  const TempCsv file("shapbox_csv_mean.csv",
                     "a,target\n"
                     "1,0\n"
                     "3,1\n"
                     "5,0\n");
  BinarizationPlan plan;
  plan.numeric_columns = {"a"};
  plan.target_column = "target";
  const BinaryDataset data = binarize(load_csv(file.path), plan);
  // Mean is 3; only the 5 clears it strictly.
  CHECK(data.rows == std::vector<std::uint64_t>{0, 0, 1});

  // A constant column never fires.
  const TempCsv flat("shapbox_csv_flat.csv", "a,target\n7,0\n7,1\n");
  const BinaryDataset constant = binarize(load_csv(flat.path), plan);
  CHECK(constant.rows == std::vector<std::uint64_t>{0, 0});
}

TEST_CASE("binarization failure modes", "[dataset]") {
  BinarizationPlan plan;
  plan.numeric_columns = {"a"};
  plan.target_column = "target";

  const TempCsv all_missing("shapbox_csv_missing.csv", "a,target\nNaN,1\n,0\n");
  CHECK_THROWS_AS(binarize(load_csv(all_missing.path), plan), Error);

  const TempCsv garbage("shapbox_csv_garbage.csv", "a,target\nhello,1\n");
  CHECK_THROWS_AS(binarize(load_csv(garbage.path), plan), ParseError);

  const TempCsv no_column("shapbox_csv_nocol.csv", "b,target\n1,1\n");
  CHECK_THROWS_AS(binarize(load_csv(no_column.path), plan), Error);
}

namespace {
/// An in-memory dataset for trainer tests.
BinaryDataset toy_data(FeatureSpacePtr space, std::vector<std::uint64_t> rows,
                       std::vector<int> labels) {
  BinaryDataset d;
  d.space = std::move(space);
  d.rows = std::move(rows);
  d.labels = std::move(labels);
  d.target_mean = 0;
  return d;
}

std::vector<std::size_t> all_rows(const BinaryDataset& d) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}
}  // namespace

TEST_CASE("a pure node becomes a leaf immediately", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(2);
  const BinaryDataset d = toy_data(space, {0b00, 0b01, 0b10}, {1, 1, 1});
  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{1, 0});
  CHECK(t.tree.node_count() == 1);
  CHECK(t.tree.depth() == 0);
  REQUIRE(t.trace.size() == 1);
  CHECK(t.trace[0].rows == 3);
  CHECK(t.trace[0].positives == 3);
  CHECK(t.trace[0].feature == -1);
  CHECK(t.tree.evaluate(Entity(space, std::uint64_t{0b11})));
}

TEST_CASE("an exact class tie labels the leaf zero", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(1);
  // Labels split 2/2 and no split helps (features carry no signal).
  const BinaryDataset d = toy_data(space, {0b0, 0b0, 0b1, 0b1}, {1, 0, 0, 1});
  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{1, 0});
  CHECK(t.tree.node_count() == 1);
  CHECK_FALSE(t.tree.evaluate(Entity(space, std::uint64_t{0})));
}

TEST_CASE("an uninformative split is refused outright", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(2);
  // Labels are the XOR of the two features: either single split leaves the
  // children as mixed as the parent, and improvement must be strict.
  const BinaryDataset d = toy_data(space, {0b00, 0b01, 0b10, 0b11}, {0, 1, 1, 0});
  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{1, 0});
  CHECK(t.tree.node_count() == 1);
  CHECK(t.trace.back().feature == -1);
}

TEST_CASE("an informative feature is found and splits perfectly", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(3);
  std::vector<std::uint64_t> rows;
  std::vector<int> labels;
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    rows.push_back(bits);
    labels.push_back(static_cast<int>((bits >> 1) & 1));  // label = feature 1
  }
  const BinaryDataset d = toy_data(space, std::move(rows), std::move(labels));
  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{1, 0});

  CHECK(t.trace.back().feature == 1);
  CHECK(t.trace.back().depth == 0);
  CHECK(t.tree.depth() == 1);
  CHECK(evaluate_tree(t.tree, d, all_rows(d)).accuracy() == Rational(1));
}

TEST_CASE("equally good splits go to the lowest feature index", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(3);
  // Features 1 and 2 are identical copies of the label; feature 0 is noise.
  std::vector<std::uint64_t> rows;
  std::vector<int> labels;
  for (int copy = 0; copy < 2; ++copy)
    for (std::uint64_t noise = 0; noise < 2; ++noise)
      for (std::uint64_t y = 0; y < 2; ++y) {
        rows.push_back(noise | (y << 1) | (y << 2));
        labels.push_back(static_cast<int>(y));
      }
  const BinaryDataset d = toy_data(space, std::move(rows), std::move(labels));
  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{1, 0});
  CHECK(t.trace.back().feature == 1);
  CHECK(t.tree.depth() == 1);
}

TEST_CASE("greedy growth recurses and the trace audits the stopping rule", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(2);
  // Labels: feature 0 OR feature 1.
  std::vector<std::uint64_t> rows;
  std::vector<int> labels;
  for (int rep = 0; rep < 3; ++rep)
    for (std::uint64_t bits = 0; bits < 4; ++bits) {
      rows.push_back(bits);
      labels.push_back(bits == 0 ? 0 : 1);
    }
  const BinaryDataset d = toy_data(space, std::move(rows), std::move(labels));

  const TrainedTree t = train_gini_tree(d, all_rows(d), TrainConfig{2, 0});
  CHECK(evaluate_tree(t.tree, d, all_rows(d)).accuracy() == Rational(1));
  CHECK(t.tree.depth() == 2);
  CHECK(t.trace.back().feature == 0);
  for (const TrainTraceEntry& entry : t.trace) {
    if (entry.feature >= 0) CHECK(entry.rows >= 2);
    CHECK(entry.node >= 0);
  }

  // A large row floor collapses everything into one majority leaf.
  const TrainedTree stump = train_gini_tree(d, all_rows(d), TrainConfig{1000, 0});
  CHECK(stump.tree.node_count() == 1);
  REQUIRE(stump.trace.size() == 1);
  CHECK(stump.trace[0].rows == 12);
  CHECK(stump.trace[0].positives == 9);
  CHECK(stump.tree.evaluate(Entity(space, std::uint64_t{0})));  // majority is 1

  // A depth bound of one allows the root split but nothing below it.
  const TrainedTree shallow = train_gini_tree(d, all_rows(d), TrainConfig{1, 1});
  CHECK(shallow.tree.depth() <= 1);
  for (const TrainTraceEntry& entry : shallow.trace)
    if (entry.feature >= 0) CHECK(entry.depth == 0);
}

TEST_CASE("training input validation", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(1);
  const BinaryDataset d = toy_data(space, {0b0, 0b1}, {0, 1});
  CHECK_THROWS_AS(train_gini_tree(d, {}, TrainConfig{}), Error);
  CHECK_THROWS_AS(train_gini_tree(d, {5}, TrainConfig{}), Error);
  CHECK_THROWS_AS(evaluate_tree(DecisionTree::constant(space, false), d, {9}), Error);
}

TEST_CASE("evaluation metrics count correctly", "[train]") {
  const FeatureSpacePtr space = testsupport::small_space(1);
  const BinaryDataset d = toy_data(space, {0b0, 0b0, 0b1, 0b1}, {0, 1, 0, 1});

  // The identity tree: predict the feature itself.
  DecisionTree::Builder b(space);
  const std::int32_t no = b.leaf(false);
  const std::int32_t yes = b.leaf(true);
  const DecisionTree tree = b.finish(b.node(0, no, yes));

  const EvalMetrics m = evaluate_tree(tree, d, all_rows(d));
  CHECK(m.rows == 4);
  CHECK(m.correct == 2);
  CHECK(m.predicted_positive == 2);
  CHECK(m.true_positive == 1);
  CHECK(m.accuracy() == Rational(1, 2));
  CHECK(m.precision() == Rational(1, 2));

  // A tree that never predicts positive reports zero precision.
  const EvalMetrics none =
      evaluate_tree(DecisionTree::constant(space, false), d, all_rows(d));
  CHECK(none.predicted_positive == 0);
  CHECK(none.precision() == Rational(0));
  CHECK(none.accuracy() == Rational(1, 2));
}
