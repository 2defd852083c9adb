#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapbox/distribution.hpp"
#include "shapbox/feature_space.hpp"
#include "shapbox/hyperrectangle.hpp"
#include "shapbox/model.hpp"
#include "shapbox/polynomial.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

using Json = nlohmann::json;

/// Parses a JSON document, converting parser failures into ParseError with
/// the byte offset.
inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw ParseError(std::string("invalid JSON: ") + err.what(),
                     err.byte > 0 ? err.byte - 1 : 0);
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_json(buffer.str());
  } catch (ParseError& err) {
    throw ParseError(path + ": " + err.what(), err.position);
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write \"" + path + "\"");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to \"" + path + "\" failed");
}

/// Rational field: a "num/den" or decimal string, or a JSON integer.
/// Floating-point JSON numbers are rejected — they have already lost
/// exactness, and every format here is exact.
inline Rational load_rational(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ParseError& err) {
      throw ParseError(where + ": " + err.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number())
    throw ParseError(where + ": write rationals as strings (e.g. \"1/3\" or \"0.25\"), "
                             "not floating-point numbers");
  throw ParseError(where + ": expected a rational");
}

inline Json rational_to_json(const Rational& r) { return to_fraction_string(r); }

inline FeatureSpacePtr load_feature_space(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of feature names");
  std::vector<std::string> names;
  names.reserve(j.size());
  for (const Json& item : j) {
    if (!item.is_string()) throw ParseError(where + ": feature names must be strings");
    names.push_back(item.get<std::string>());
  }
  try {
    return make_space(std::move(names));
  } catch (const Error& err) {
    throw ParseError(where + ": " + err.what());
  }
}

inline Json feature_space_to_json(const FeatureSpace& space) {
  return Json(space.names());
}

namespace detail {

inline std::vector<Rational> load_rational_array(const Json& j, std::size_t expected,
                                                 const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  if (j.size() != expected)
    throw ParseError(where + ": expected " + std::to_string(expected) + " entries, found " +
                     std::to_string(j.size()));
  std::vector<Rational> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(load_rational(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json rational_array_to_json(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(rational_to_json(v));
  return out;
}

}  // namespace detail

/// Box file: {"features": [...], "lo": [...], "hi": [...]}.
inline Hyperrectangle load_region(const Json& j) {
  if (!j.is_object() || !j.contains("features") || !j.contains("lo") || !j.contains("hi"))
    throw ParseError("region: expected an object with \"features\", \"lo\" and \"hi\"");
  FeatureSpacePtr space = load_feature_space(j["features"], "region.features");
  std::vector<Rational> lo = detail::load_rational_array(j["lo"], space->size(), "region.lo");
  std::vector<Rational> hi = detail::load_rational_array(j["hi"], space->size(), "region.hi");
  try {
    return Hyperrectangle(std::move(space), std::move(lo), std::move(hi));
  } catch (const Error& err) {
    throw ParseError(std::string("region: ") + err.what());
  }
}

inline Json region_to_json(const Hyperrectangle& box) {
  return Json{{"features", feature_space_to_json(box.space())},
              {"lo", detail::rational_array_to_json(box.lo())},
              {"hi", detail::rational_array_to_json(box.hi())}};
}

/// Distribution file: {"features": [...], "probs": [...]}, or a degenerate
/// region (lo == hi everywhere) in the box format.
inline ProductDistribution load_distribution(const Json& j) {
  if (j.is_object() && j.contains("probs")) {
    FeatureSpacePtr space = load_feature_space(j.contains("features") ? j["features"] : Json(),
                                               "distribution.features");
    std::vector<Rational> probs =
        detail::load_rational_array(j["probs"], space->size(), "distribution.probs");
    try {
      return ProductDistribution(std::move(space), std::move(probs));
    } catch (const Error& err) {
      throw ParseError(std::string("distribution: ") + err.what());
    }
  }
  const Hyperrectangle box = load_region(j);
  if (box.free_count() != 0)
    throw ParseError("distribution: box form must have lo == hi for every feature");
  return ProductDistribution(box.space_ptr(), box.lo());
}

inline Json distribution_to_json(const ProductDistribution& dist) {
  return Json{{"features", feature_space_to_json(dist.space())},
              {"probs", detail::rational_array_to_json(dist.probs())}};
}

namespace detail {

inline Json tree_node_to_json(const DecisionTree& tree, std::int32_t at) {
  const DecisionTree::Node& n = tree.nodes()[static_cast<std::size_t>(at)];
  if (n.is_leaf()) return Json{{"leaf", static_cast<int>(n.label)}};
  return Json{{"test", tree.space().name(static_cast<std::size_t>(n.test))},
              {"zero", tree_node_to_json(tree, n.zero)},
              {"one", tree_node_to_json(tree, n.one)}};
}

inline std::int32_t load_tree_node(const Json& j, const FeatureSpace& space,
                                   DecisionTree::Builder& builder, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a node object");
  if (j.contains("leaf")) {
    const Json& leaf = j["leaf"];
    if (!leaf.is_number_integer() || (leaf.get<int>() != 0 && leaf.get<int>() != 1))
      throw ParseError(where + ".leaf: expected 0 or 1");
    return builder.leaf(leaf.get<int>() == 1);
  }
  if (!j.contains("test") || !j.contains("zero") || !j.contains("one"))
    throw ParseError(where + ": node needs \"leaf\" or \"test\"/\"zero\"/\"one\"");
  if (!j["test"].is_string()) throw ParseError(where + ".test: expected a feature name");
  const std::string name = j["test"].get<std::string>();
  if (!space.has(name)) throw ParseError(where + ".test: unknown feature \"" + name + "\"");
  const std::int32_t zero = load_tree_node(j["zero"], space, builder, where + ".zero");
  const std::int32_t one = load_tree_node(j["one"], space, builder, where + ".one");
  return builder.node(space.index(name), zero, one);
}

}  // namespace detail

/// Tree file: {"features": [...], "root": node} where a node is either
/// {"leaf": 0|1} or {"test": name, "zero": node, "one": node}.
inline DecisionTree load_decision_tree(const Json& j) {
  if (!j.is_object() || !j.contains("features") || !j.contains("root"))
    throw ParseError("tree: expected an object with \"features\" and \"root\"");
  FeatureSpacePtr space = load_feature_space(j["features"], "tree.features");
  DecisionTree::Builder builder(space);
  const std::int32_t root = detail::load_tree_node(j["root"], *space, builder, "tree.root");
  try {
    return builder.finish(root);
  } catch (const Error& err) {
    throw ParseError(std::string("tree: ") + err.what());
  }
}

inline Json decision_tree_to_json(const DecisionTree& tree) {
  return Json{{"features", feature_space_to_json(tree.space())},
              {"root", detail::tree_node_to_json(tree, tree.root())}};
}

/// Truth-table file: {"features": [...], "accepted": [[0,1,...], ...]}.
inline TruthTableModel load_truth_table(const Json& j) {
  if (!j.is_object() || !j.contains("features") || !j.contains("accepted"))
    throw ParseError("table: expected an object with \"features\" and \"accepted\"");
  FeatureSpacePtr space = load_feature_space(j["features"], "table.features");
  if (!j["accepted"].is_array()) throw ParseError("table.accepted: expected an array");
  std::vector<std::uint64_t> accepted;
  accepted.reserve(j["accepted"].size());
  for (std::size_t r = 0; r < j["accepted"].size(); ++r) {
    const Json& row = j["accepted"][r];
    const std::string where = "table.accepted[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != space->size())
      throw ParseError(where + ": expected an array of " + std::to_string(space->size()) +
                       " binary values");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number_integer() || (row[i].get<int>() != 0 && row[i].get<int>() != 1))
        throw ParseError(where + ": entries must be 0 or 1");
      if (row[i].get<int>()) bits |= std::uint64_t{1} << i;
    }
    accepted.push_back(bits);
  }
  try {
    return TruthTableModel(std::move(space), std::move(accepted));
  } catch (const Error& err) {
    throw ParseError(std::string("table: ") + err.what());
  }
}

inline Json truth_table_to_json(const TruthTableModel& table) {
  Json rows = Json::array();
  for (std::uint64_t bits : table.accepted()) {
    Json row = Json::array();
    for (std::size_t i = 0; i < table.space().size(); ++i)
      row.push_back(static_cast<int>((bits >> i) & 1));
    rows.push_back(std::move(row));
  }
  return Json{{"features", feature_space_to_json(table.space())}, {"accepted", std::move(rows)}};
}

/// Model file: either the tree format or the truth-table format, recognized
/// by its keys.
inline Model load_model(const Json& j) {
  if (j.is_object() && j.contains("root")) return load_decision_tree(j);
  if (j.is_object() && j.contains("accepted")) return load_truth_table(j);
  throw ParseError("model: expected a tree (\"root\") or a truth table (\"accepted\")");
}

inline Json model_to_json(const Model& m) {
  if (const auto* tree = std::get_if<DecisionTree>(&m)) return decision_tree_to_json(*tree);
  return truth_table_to_json(std::get<TruthTableModel>(m));
}

/// Polynomial file: {"features": [...], "terms": [{"monomial": [names...],
/// "coeff": rational}, ...]}.
inline MultilinearPolynomial load_polynomial(const Json& j) {
  if (!j.is_object() || !j.contains("features") || !j.contains("terms"))
    throw ParseError("polynomial: expected an object with \"features\" and \"terms\"");
  FeatureSpacePtr space = load_feature_space(j["features"], "polynomial.features");
  if (!j["terms"].is_array()) throw ParseError("polynomial.terms: expected an array");
  MultilinearPolynomial poly(space);
  for (std::size_t t = 0; t < j["terms"].size(); ++t) {
    const Json& term = j["terms"][t];
    const std::string where = "polynomial.terms[" + std::to_string(t) + "]";
    if (!term.is_object() || !term.contains("monomial") || !term.contains("coeff"))
      throw ParseError(where + ": expected {\"monomial\": [...], \"coeff\": ...}");
    if (!term["monomial"].is_array()) throw ParseError(where + ".monomial: expected an array");
    std::uint64_t mask = 0;
    for (const Json& var : term["monomial"]) {
      if (!var.is_string()) throw ParseError(where + ".monomial: expected feature names");
      const std::string name = var.get<std::string>();
      if (!space->has(name))
        throw ParseError(where + ".monomial: unknown feature \"" + name + "\"");
      const std::uint64_t bit = std::uint64_t{1} << space->index(name);
      if (mask & bit) throw ParseError(where + ".monomial: repeated feature \"" + name + "\"");
      mask |= bit;
    }
    poly.add_term(mask, load_rational(term["coeff"], where + ".coeff"));
  }
  return poly;
}

inline Json polynomial_to_json(const MultilinearPolynomial& poly) {
  Json terms = Json::array();
  for (const auto& [mask, coeff] : poly.terms()) {
    Json monomial = Json::array();
    for (std::size_t i = 0; i < poly.space().size(); ++i)
      if ((mask >> i) & 1) monomial.push_back(poly.space().name(i));
    terms.push_back(Json{{"monomial", std::move(monomial)}, {"coeff", rational_to_json(coeff)}});
  }
  return Json{{"features", feature_space_to_json(poly.space())}, {"terms", std::move(terms)}};
}

/// Entity file: {"values": [0,1,...]} with values in the model's feature
/// order; an optional "features" list must match the space exactly.
inline Entity load_entity(const Json& j, FeatureSpacePtr space) {
  if (!j.is_object() || !j.contains("values"))
    throw ParseError("entity: expected an object with \"values\"");
  if (j.contains("features")) {
    FeatureSpacePtr named = load_feature_space(j["features"], "entity.features");
    if (*named != *space)
      throw ParseError("entity: feature list does not match the model's feature space");
  }
  const Json& values = j["values"];
  if (!values.is_array() || values.size() != space->size())
    throw ParseError("entity.values: expected " + std::to_string(space->size()) +
                     " binary values");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number_integer() ||
        (values[i].get<int>() != 0 && values[i].get<int>() != 1))
      throw ParseError("entity.values: entries must be 0 or 1");
    if (values[i].get<int>()) bits |= std::uint64_t{1} << i;
  }
  return Entity(std::move(space), bits);
}

/// Entity from a compact bit string like "0110", one character per feature in
/// space order.
inline Entity parse_entity_bits(const std::string& text, FeatureSpacePtr space) {
  if (text.size() != space->size())
    throw ParseError("entity bit string must have exactly " + std::to_string(space->size()) +
                     " characters");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      bits |= std::uint64_t{1} << i;
    else if (text[i] != '0')
      throw ParseError("entity bit string may contain only '0' and '1'", i);
  }
  return Entity(std::move(space), bits);
}

inline Json entity_to_json(const Entity& e) {
  Json values = Json::array();
  for (std::size_t i = 0; i < e.space().size(); ++i) values.push_back(e.value(i));
  return Json{{"features", feature_space_to_json(e.space())}, {"values", std::move(values)}};
}

}  // namespace shapbox
