#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shapbox/feature_space.hpp"

namespace shapbox {

/// A binary classifier given extensionally: the sorted set of accepted
/// entities (as feature bitmasks).  Everything not listed is rejected.
class TruthTableModel {
 public:
  /// Hard cap on explicit entries (both for stored tables and for operations
  /// that materialize new ones, like negation).
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

  TruthTableModel(FeatureSpacePtr space, std::vector<std::uint64_t> accepted)
      : space_(std::move(space)), accepted_(std::move(accepted)) {
    if (!space_) throw Error("truth table requires a feature space");
    if (accepted_.size() > kMaxEntries)
      throw GuardError("truth table exceeds " + std::to_string(kMaxEntries) + " entries");
    for (std::uint64_t bits : accepted_)
      if (bits & ~space_->full_mask()) throw Error("accepted entity outside the feature space");
    std::sort(accepted_.begin(), accepted_.end());
    if (std::adjacent_find(accepted_.begin(), accepted_.end()) != accepted_.end())
      throw Error("duplicate accepted entity in truth table");
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }
  const std::vector<std::uint64_t>& accepted() const { return accepted_; }

  bool evaluate(const Entity& e) const {
    require_same_space(*space_, e.space(), "TruthTableModel::evaluate");
    return std::binary_search(accepted_.begin(), accepted_.end(), e.bits());
  }

 private:
  FeatureSpacePtr space_;
  std::vector<std::uint64_t> accepted_;
};

/// The features fixed along one root-to-leaf path of a decision tree:
/// `fixed` has a bit per tested feature, `values` (a subset of `fixed`) the
/// branch taken at each.  Distinct paths of one tree are mutually exclusive —
/// they disagree on at least one fixed feature.
struct PathAssignment {
  std::uint64_t fixed = 0;
  std::uint64_t values = 0;

  bool operator==(const PathAssignment&) const = default;
};

/// A binary decision tree: internal nodes test one feature (never repeated on
/// a root-to-leaf path) and branch on its value; leaves carry the class.
class DecisionTree {
 public:
  struct Node {
    int test = -1;           // feature index; -1 for a leaf
    std::int32_t zero = -1;  // child when the tested feature is 0
    std::int32_t one = -1;   // child when the tested feature is 1
    std::int8_t label = -1;  // leaf class; -1 for internal nodes

    bool is_leaf() const { return test < 0; }
  };

  /// Incremental construction.  Children must be created before their parent;
  /// `finish` validates that the nodes form a proper tree rooted at `root`.
  class Builder {
   public:
    explicit Builder(FeatureSpacePtr space) : space_(std::move(space)) {
      if (!space_) throw Error("decision tree requires a feature space");
    }

    std::int32_t leaf(bool label) {
      Node n;
      n.label = label ? 1 : 0;
      nodes_.push_back(n);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    std::int32_t node(std::size_t feature, std::int32_t zero_child, std::int32_t one_child) {
      if (feature >= space_->size()) throw Error("unknown feature index in tree node");
      check_child(zero_child);
      check_child(one_child);
      Node n;
      n.test = static_cast<int>(feature);
      n.zero = zero_child;
      n.one = one_child;
      nodes_.push_back(n);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    DecisionTree finish(std::int32_t root) {
      check_child(root);
      return DecisionTree(space_, std::move(nodes_), root);
    }

   private:
    void check_child(std::int32_t c) const {
      if (c < 0 || static_cast<std::size_t>(c) >= nodes_.size())
        throw Error("tree child index out of range");
    }

    FeatureSpacePtr space_;
    std::vector<Node> nodes_;
  };

  /// The single-leaf tree with the given constant label.
  static DecisionTree constant(FeatureSpacePtr space, bool label) {
    Builder b(std::move(space));
    const std::int32_t leaf = b.leaf(label);
    return b.finish(leaf);
  }

  const FeatureSpacePtr& space_ptr() const { return space_; }
  const FeatureSpace& space() const { return *space_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }

  std::size_t depth() const { return depth_below(root_); }

  bool evaluate(const Entity& e) const {
    require_same_space(*space_, e.space(), "DecisionTree::evaluate");
    std::int32_t at = root_;
    while (!nodes_[at].is_leaf())
      at = e.value(static_cast<std::size_t>(nodes_[at].test)) ? nodes_[at].one : nodes_[at].zero;
    return nodes_[at].label == 1;
  }

  /// All root-to-leaf paths ending in an accepting leaf, in left-to-right
  /// (zero-branch-first) order.
  std::vector<PathAssignment> accepting_paths() const {
    std::vector<PathAssignment> paths;
    collect_paths(root_, PathAssignment{}, paths);
    return paths;
  }

  /// The same tree with every leaf label flipped.
  DecisionTree negated() const {
    DecisionTree t = *this;
    for (Node& n : t.nodes_)
      if (n.is_leaf()) n.label = n.label == 1 ? 0 : 1;
    return t;
  }

  /// The same classifier over an extended space: the new feature is never
  /// tested, so the output is independent of it.
  DecisionTree with_dummy_feature(const std::string& name) const {
    std::vector<std::string> names = space_->names();
    names.push_back(name);
    DecisionTree t = *this;
    t.space_ = make_space(std::move(names));
    return t;
  }

  bool operator==(const DecisionTree& other) const {
    if (*space_ != *other.space_ || nodes_.size() != other.nodes_.size() ||
        root_ != other.root_)
      return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node &a = nodes_[i], &b = other.nodes_[i];
      if (a.test != b.test || a.zero != b.zero || a.one != b.one || a.label != b.label)
        return false;
    }
    return true;
  }

 private:
  DecisionTree(FeatureSpacePtr space, std::vector<Node> nodes, std::int32_t root)
      : space_(std::move(space)), nodes_(std::move(nodes)), root_(root) {
    validate();
  }

  void validate() const {
    std::vector<char> visited(nodes_.size(), 0);
    validate_walk(root_, 0, visited);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!visited[i]) throw Error("tree contains unreachable nodes");
  }

  void validate_walk(std::int32_t at, std::uint64_t path_mask,
                     std::vector<char>& visited) const {
    const Node& n = nodes_[at];
    if (visited[at]) throw Error("tree node has multiple parents");
    visited[at] = 1;
    if (n.is_leaf()) {
      if (n.label != 0 && n.label != 1) throw Error("leaf label must be 0 or 1");
      return;
    }
    const std::uint64_t bit = std::uint64_t{1} << n.test;
    if (path_mask & bit)
      throw Error("feature \"" + space_->name(static_cast<std::size_t>(n.test)) +
                  "\" repeats on a root-to-leaf path");
    validate_walk(n.zero, path_mask | bit, visited);
    validate_walk(n.one, path_mask | bit, visited);
  }

  void collect_paths(std::int32_t at, PathAssignment acc,
                     std::vector<PathAssignment>& out) const {
    const Node& n = nodes_[at];
    if (n.is_leaf()) {
      if (n.label == 1) out.push_back(acc);
      return;
    }
    const std::uint64_t bit = std::uint64_t{1} << n.test;
    PathAssignment zero = acc;
    zero.fixed |= bit;
    collect_paths(n.zero, zero, out);
    PathAssignment one = acc;
    one.fixed |= bit;
    one.values |= bit;
    collect_paths(n.one, one, out);
  }

  std::size_t depth_below(std::int32_t at) const {
    const Node& n = nodes_[at];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_below(n.zero), depth_below(n.one));
  }

  FeatureSpacePtr space_;
  std::vector<Node> nodes_;
  std::int32_t root_;
};

/// Truth table -> decision tree with one full-depth accepting path per
/// accepted entity (a trie over the features in space order).  Size is linear
/// in the explicit table, which the caller already paid for.
inline DecisionTree to_decision_tree(const TruthTableModel& table) {
  const std::size_t n = table.space().size();
  DecisionTree::Builder builder(table.space_ptr());

  // Recursive build: at depth d the candidate set is every accepted mask
  // matching the branch decisions taken so far.
  auto build = [&](auto&& self, std::vector<std::uint64_t> masks,
                   std::size_t depth) -> std::int32_t {
    if (masks.empty()) return builder.leaf(false);
    if (depth == n) return builder.leaf(true);
    const std::uint64_t bit = std::uint64_t{1} << depth;
    std::vector<std::uint64_t> zeros, ones;
    for (std::uint64_t m : masks) (m & bit ? ones : zeros).push_back(m);
    const std::int32_t zero_child = self(self, std::move(zeros), depth + 1);
    const std::int32_t one_child = self(self, std::move(ones), depth + 1);
    return builder.node(depth, zero_child, one_child);
  };

  const std::int32_t root = build(build, table.accepted(), 0);
  return builder.finish(root);
}

/// Complement of an explicit table.  Materializes 2^n - |accepted| entries,
/// so it is guarded by the table entry cap.
inline TruthTableModel negated(const TruthTableModel& table) {
  const std::size_t n = table.space().size();
  if (n >= 21)  // complement would exceed kMaxEntries
    throw GuardError("negating a truth table over " + std::to_string(n) + " features");
  std::vector<std::uint64_t> rest;
  rest.reserve((std::size_t{1} << n) - table.accepted().size());
  const auto& acc = table.accepted();
  std::size_t at = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (at < acc.size() && acc[at] == m)
      ++at;
    else
      rest.push_back(m);
  }
  return TruthTableModel(table.space_ptr(), std::move(rest));
}

inline DecisionTree negated(const DecisionTree& tree) { return tree.negated(); }

inline TruthTableModel with_dummy_feature(const TruthTableModel& table,
                                          const std::string& name) {
  std::vector<std::string> names = table.space().names();
  names.push_back(name);
  FeatureSpacePtr space = make_space(std::move(names));
  const std::uint64_t new_bit = std::uint64_t{1} << table.space().size();
  if (table.accepted().size() * 2 > TruthTableModel::kMaxEntries)
    throw GuardError("dummy feature would exceed the truth table entry cap");
  std::vector<std::uint64_t> accepted;
  accepted.reserve(table.accepted().size() * 2);
  for (std::uint64_t m : table.accepted()) {
    accepted.push_back(m);
    accepted.push_back(m | new_bit);
  }
  return TruthTableModel(std::move(space), std::move(accepted));
}

inline DecisionTree with_dummy_feature(const DecisionTree& tree, const std::string& name) {
  return tree.with_dummy_feature(name);
}

/// Either model representation; the CLI and file formats accept both.
using Model = std::variant<TruthTableModel, DecisionTree>;

inline const FeatureSpacePtr& model_space_ptr(const Model& m) {
  return std::visit([](const auto& x) -> const FeatureSpacePtr& { return x.space_ptr(); }, m);
}

inline const FeatureSpace& model_space(const Model& m) { return *model_space_ptr(m); }

inline bool evaluate(const Model& m, const Entity& e) {
  return std::visit([&](const auto& x) { return x.evaluate(e); }, m);
}

/// A decision-tree view of the model (identity for trees).
inline DecisionTree as_decision_tree(const Model& m) {
  if (const auto* tree = std::get_if<DecisionTree>(&m)) return *tree;
  return to_decision_tree(std::get<TruthTableModel>(m));
}

inline Model negated(const Model& m) {
  return std::visit([](const auto& x) -> Model { return negated(x); }, m);
}

inline Model with_dummy_feature(const Model& m, const std::string& name) {
  return std::visit([&](const auto& x) -> Model { return with_dummy_feature(x, name); }, m);
}

}  // namespace shapbox
