#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shapbox/hyperrectangle.hpp"
#include "shapbox/model.hpp"
#include "shapbox/polynomial.hpp"

namespace shapbox {

/// A literal of a 3-CNF formula: variable index, possibly negated.
struct Literal {
  std::uint32_t variable = 0;
  bool negated = false;
};

/// A clause with exactly three literals over three distinct variables.
struct Clause3 {
  Literal a, b, c;
};

/// A 3-CNF formula.  Variables are indexed 0 .. variables-1.
class Cnf3Formula {
 public:
  Cnf3Formula(std::size_t variables, std::vector<Clause3> clauses)
      : variables_(variables), clauses_(std::move(clauses)) {
    if (variables_ == 0) throw Error("formula needs at least one variable");
    for (const Clause3& cl : clauses_) {
      for (const Literal& lit : {cl.a, cl.b, cl.c})
        if (lit.variable >= variables_) throw Error("clause uses an undeclared variable");
      if (cl.a.variable == cl.b.variable || cl.a.variable == cl.c.variable ||
          cl.b.variable == cl.c.variable)
        throw Error("clause repeats a variable");
    }
  }

  std::size_t variables() const { return variables_; }
  const std::vector<Clause3>& clauses() const { return clauses_; }

  bool satisfied_by(std::uint64_t assignment) const {
    for (const Clause3& cl : clauses_) {
      bool any = false;
      for (const Literal& lit : {cl.a, cl.b, cl.c}) {
        const bool value = (assignment >> lit.variable) & 1;
        if (value != lit.negated) {
          any = true;
          break;
        }
      }
      if (!any) return false;
    }
    return true;
  }

 private:
  std::size_t variables_;
  std::vector<Clause3> clauses_;
};

/// A maximization instance over a box: is there a point with
/// objective(p) >= threshold?
struct PolynomialMaxInstance {
  FeatureSpacePtr space;
  MultilinearPolynomial objective;
  Hyperrectangle region;
  Rational threshold;

  PolynomialMaxInstance(FeatureSpacePtr s, MultilinearPolynomial obj, Hyperrectangle reg,
                        Rational thr)
      : space(std::move(s)),
        objective(std::move(obj)),
        region(std::move(reg)),
        threshold(std::move(thr)) {}
};

/// Encodes satisfiability as multilinear maximization over the unit box.
/// Each clause contributes minus the product of its literals' "falseness"
/// polynomials (p_v for a negated literal, 1 - p_v for a plain one), so at a
/// 0/1 point the objective is minus the number of violated clauses.  The
/// maximum over the box reaches the threshold 0 exactly when the formula is
/// satisfiable.
inline PolynomialMaxInstance sat_to_multilinear(const Cnf3Formula& formula) {
  std::vector<std::string> names;
  names.reserve(formula.variables());
  for (std::size_t i = 0; i < formula.variables(); ++i)
    names.push_back("x" + std::to_string(i + 1));
  FeatureSpacePtr space = make_space(std::move(names));

  MultilinearPolynomial objective(space);
  for (const Clause3& cl : formula.clauses()) {
    MultilinearPolynomial term = MultilinearPolynomial::constant(space, -1);
    for (const Literal& lit : {cl.a, cl.b, cl.c}) {
      // falseness of the literal as an affine form in its variable
      if (lit.negated)
        term.multiply_affine(lit.variable, Rational(0), Rational(1));  // p_v
      else
        term.multiply_affine(lit.variable, Rational(1), Rational(-1));  // 1 - p_v
    }
    objective += term;
  }

  std::vector<Rational> lo(formula.variables(), Rational(0));
  std::vector<Rational> hi(formula.variables(), Rational(1));
  Hyperrectangle region(space, std::move(lo), std::move(hi));
  return PolynomialMaxInstance(space, std::move(objective), std::move(region), Rational(0));
}

/// A vertex-cover question: does the graph have a cover of at most k nodes?
class VertexCoverInstance {
 public:
  VertexCoverInstance(std::size_t nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                      std::size_t k)
      : nodes_(nodes), edges_(std::move(edges)), k_(k) {
    if (nodes_ == 0) throw Error("graph needs at least one node");
    if (k_ == 0 || k_ > nodes_) throw Error("cover bound must satisfy 1 <= k <= nodes");
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto& [u, v] : edges_) {
      if (u >= nodes_ || v >= nodes_) throw Error("edge endpoint out of range");
      if (u == v) throw Error("self-loops are not allowed");
      if (u > v) std::swap(u, v);
      if (!seen.emplace(u, v).second) throw Error("duplicate edge");
    }
  }

  std::size_t nodes() const { return nodes_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }
  std::size_t k() const { return k_; }

  /// Does the node set given as a bitmask cover every edge?
  bool covers(std::uint64_t node_set) const {
    for (const auto& [u, v] : edges_)
      if (!((node_set >> u) & 1) && !((node_set >> v) & 1)) return false;
    return true;
  }

 private:
  std::size_t nodes_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::size_t k_;
};

/// A region threshold query over a decision tree: is there a distribution in
/// the region where the SHAP score of `feature` for `entity` reaches
/// `threshold`?
struct ShapMaxInstance {
  DecisionTree model;
  Entity entity;
  std::size_t feature;
  Hyperrectangle region;
  Rational threshold;
  Rational epsilon;  // the pinned probability of the auxiliary feature

  ShapMaxInstance(DecisionTree m, Entity e, std::size_t f, Hyperrectangle reg, Rational thr,
                  Rational eps)
      : model(std::move(m)),
        entity(std::move(e)),
        feature(f),
        region(std::move(reg)),
        threshold(std::move(thr)),
        epsilon(std::move(eps)) {}
};

/// Encodes vertex cover as a region threshold query.  Features are
/// [x0, v1..vn, w]; the model accepts, per edge {u,v}, the entity with
/// exactly {x0, u, v} set, plus the entity with exactly {x0, w} set.  The
/// region pins p_x0 = 1 and p_w = epsilon and leaves the node features free,
/// so box vertices correspond to node subsets (node in the candidate cover
/// <=> its probability sits at 0).  With
///
///   epsilon = c(n-1) / sum_{i=0}^{k} C(k,i) c(n-i)     (c over n+2 players)
///
/// the SHAP score of x0 at the null entity is -epsilon * sum_{i=0}^{l}
/// C(l,i) c(n-i) when the subset is a cover of size l, and is pushed below
/// -c(n-1) by every uncovered edge; so the maximum over the region reaches
/// the threshold q = -c(n-1) exactly when a cover of size at most k exists.
inline ShapMaxInstance vc_to_region_max_shap(const VertexCoverInstance& instance) {
  const std::size_t n = instance.nodes();
  std::vector<std::string> names;
  names.reserve(n + 2);
  names.push_back("x0");
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i + 1));
  names.push_back("w");
  FeatureSpacePtr space = make_space(std::move(names));

  const std::uint64_t x0_bit = 1;
  const std::uint64_t w_bit = std::uint64_t{1} << (n + 1);
  auto node_bit = [](std::size_t node) { return std::uint64_t{1} << (node + 1); };

  std::vector<std::uint64_t> accepted;
  accepted.reserve(instance.edges().size() + 1);
  for (const auto& [u, v] : instance.edges())
    accepted.push_back(x0_bit | node_bit(u) | node_bit(v));
  accepted.push_back(x0_bit | w_bit);
  const DecisionTree model = to_decision_tree(TruthTableModel(space, std::move(accepted)));

  const unsigned players = static_cast<unsigned>(n) + 2;
  const ShapleyCoefficients c(players);
  Rational denom = 0;
  for (std::size_t i = 0; i <= instance.k(); ++i)
    denom += Rational(binomial(static_cast<unsigned>(instance.k()), static_cast<unsigned>(i))) *
             c[static_cast<unsigned>(n - i)];
  const Rational epsilon = c[static_cast<unsigned>(n - 1)] / denom;
  const Rational threshold = -c[static_cast<unsigned>(n - 1)];

  std::vector<Rational> lo(n + 2), hi(n + 2);
  lo[0] = hi[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    lo[i] = 0;
    hi[i] = 1;
  }
  lo[n + 1] = hi[n + 1] = epsilon;
  Hyperrectangle region(space, std::move(lo), std::move(hi));

  const Entity null_entity(space, std::uint64_t{0});
  return ShapMaxInstance(model, null_entity, 0, std::move(region), threshold, epsilon);
}

}  // namespace shapbox
