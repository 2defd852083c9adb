#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shapbox/dataset.hpp"
#include "shapbox/model.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

struct TrainConfig {
  /// A node with fewer rows than this becomes a leaf.
  std::size_t min_samples_split = 100;
  /// 0 = no depth bound.
  std::size_t max_depth = 0;
};

/// One trained node, for auditing the stopping rules: every split node must
/// have at least min_samples_split rows.
struct TrainTraceEntry {
  std::int32_t node = -1;    // index into the tree's node vector
  std::size_t depth = 0;
  std::size_t rows = 0;
  std::size_t positives = 0; // rows with label 1
  int feature = -1;          // split feature; -1 for leaves
};

struct TrainedTree {
  DecisionTree tree;
  std::vector<TrainTraceEntry> trace;
};

namespace detail {

/// n - (c0^2 + c1^2)/n: the class-count form of |node| * gini(node).  Summing
/// it over the children and comparing against the parent's value compares
/// impurity decrease exactly.
inline Rational scaled_gini(std::size_t total, std::size_t positives) {
  if (total == 0) return 0;
  const Rational n(static_cast<unsigned long>(total));
  const Rational c1(static_cast<unsigned long>(positives));
  const Rational c0 = n - c1;
  return n - (c0 * c0 + c1 * c1) / n;
}

}  // namespace detail

/// Greedy binary decision tree minimizing Gini impurity, grown on the given
/// rows.  Deterministic: the best split is the feature with the largest
/// impurity decrease, ties to the lowest feature index; a feature never
/// repeats on a path; leaves take the majority class, ties to 0.
inline TrainedTree train_gini_tree(const BinaryDataset& data,
                                   const std::vector<std::size_t>& row_indices,
                                   const TrainConfig& config = {}) {
  if (row_indices.empty()) throw Error("cannot train on an empty row set");
  for (std::size_t r : row_indices)
    if (r >= data.size()) throw Error("training row index out of range");

  const std::size_t n_features = data.space->size();
  DecisionTree::Builder builder(data.space);
  std::vector<TrainTraceEntry> trace;

  auto grow = [&](auto&& self, const std::vector<std::size_t>& rows, std::uint64_t used,
                  std::size_t depth) -> std::int32_t {
    std::size_t positives = 0;
    for (std::size_t r : rows) positives += static_cast<std::size_t>(data.labels[r]);

    TrainTraceEntry entry;
    entry.depth = depth;
    entry.rows = rows.size();
    entry.positives = positives;

    const bool pure = positives == 0 || positives == rows.size();
    const bool too_small = rows.size() < config.min_samples_split;
    const bool too_deep = config.max_depth != 0 && depth >= config.max_depth;

    int best_feature = -1;
    std::size_t best_left = 0;
    if (!pure && !too_small && !too_deep) {
      const Rational parent = detail::scaled_gini(rows.size(), positives);
      Rational best_children;
      for (std::size_t f = 0; f < n_features; ++f) {
        if ((used >> f) & 1) continue;
        std::size_t left = 0, left_pos = 0;  // rows with feature value 0
        for (std::size_t r : rows) {
          if ((data.rows[r] >> f) & 1) continue;
          ++left;
          left_pos += static_cast<std::size_t>(data.labels[r]);
        }
        const std::size_t right = rows.size() - left;
        const std::size_t right_pos = positives - left_pos;
        const Rational children =
            detail::scaled_gini(left, left_pos) + detail::scaled_gini(right, right_pos);
        // Strict improvement over the parent, strict improvement over the
        // best so far: the lowest qualifying feature index wins ties.
        if (children < parent && (best_feature < 0 || children < best_children)) {
          best_feature = static_cast<int>(f);
          best_children = children;
          best_left = left;
        }
      }
    }

    if (best_feature < 0) {
      const bool label = positives * 2 > rows.size();  // majority, ties to 0
      const std::int32_t leaf = builder.leaf(label);
      entry.node = leaf;
      trace.push_back(entry);
      return leaf;
    }

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(best_left);
    right_rows.reserve(rows.size() - best_left);
    for (std::size_t r : rows)
      ((data.rows[r] >> best_feature) & 1 ? right_rows : left_rows).push_back(r);

    const std::uint64_t used_next = used | (std::uint64_t{1} << best_feature);
    const std::int32_t zero_child = self(self, left_rows, used_next, depth + 1);
    const std::int32_t one_child = self(self, right_rows, used_next, depth + 1);
    const std::int32_t node =
        builder.node(static_cast<std::size_t>(best_feature), zero_child, one_child);
    entry.feature = best_feature;
    entry.node = node;
    trace.push_back(entry);
    return node;
  };

  const std::int32_t root = grow(grow, row_indices, 0, 0);
  return TrainedTree{builder.finish(root), std::move(trace)};
}

/// Accuracy and positive-class precision of a tree on labelled rows.
/// Precision is 0 when the tree predicts no positives at all.
struct EvalMetrics {
  std::size_t rows = 0;
  std::size_t correct = 0;
  std::size_t predicted_positive = 0;
  std::size_t true_positive = 0;

  Rational accuracy() const {
    return rows == 0 ? Rational(0)
                     : Rational(static_cast<unsigned long>(correct),
                                static_cast<unsigned long>(rows));
  }
  Rational precision() const {
    return predicted_positive == 0
               ? Rational(0)
               : Rational(static_cast<unsigned long>(true_positive),
                          static_cast<unsigned long>(predicted_positive));
  }
};

inline EvalMetrics evaluate_tree(const DecisionTree& tree, const BinaryDataset& data,
                                 const std::vector<std::size_t>& row_indices) {
  EvalMetrics m;
  m.rows = row_indices.size();
  for (std::size_t r : row_indices) {
    if (r >= data.size()) throw Error("evaluation row index out of range");
    const bool predicted = tree.evaluate(Entity(data.space, data.rows[r]));
    const bool actual = data.labels[r] == 1;
    if (predicted == actual) ++m.correct;
    if (predicted) {
      ++m.predicted_positive;
      if (actual) ++m.true_positive;
    }
  }
  return m;
}

}  // namespace shapbox
