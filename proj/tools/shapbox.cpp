// Command-line surface for the shapbox library: exact SHAP scores, symbolic
// polynomials, interval and region decision queries, hardness-gadget
// generation, and the end-to-end dataset experiment.
//
// Exit status: 0 on success (including "false" decision answers), 1 on input
// or guard errors, 2 on usage errors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapbox/shapbox.hpp"

namespace {

using namespace shapbox;

/// --entity accepts either a compact bit string ("010") or a path to an
/// entity JSON file; anything that is not all 0/1 characters is a path.
Entity entity_from_arg(const std::string& arg, FeatureSpacePtr space) {
  const bool looks_like_bits =
      !arg.empty() && arg.find_first_not_of("01") == std::string::npos;
  if (looks_like_bits) return parse_entity_bits(arg, std::move(space));
  return load_entity(read_json_file(arg), std::move(space));
}

std::size_t feature_index(const FeatureSpace& space, const std::string& name) {
  if (!space.has(name)) {
    std::string known;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (i) known += ", ";
      known += space.name(i);
    }
    throw Error("unknown feature \"" + name + "\" (model features: " + known + ")");
  }
  return space.index(name);
}

std::string rational_text(const Rational& r) {
  return to_fraction_string(r) + " ~ " + to_decimal_string(r);
}

std::string dist_text(const ProductDistribution& d) {
  std::string out = "(";
  for (std::size_t i = 0; i < d.probs().size(); ++i) {
    if (i) out += ", ";
    out += to_fraction_string(d.prob(i));
  }
  out += ")";
  return out;
}

void add_rational_pair(Json& j, const std::string& key, const Rational& r) {
  j[key] = rational_to_json(r);
  j[key + "_decimal"] = to_double(r);
}

/// Prints the result: human-readable text by default, the JSON document with
/// --format json; --out always writes the JSON document to a file.
void emit(const Json& doc, const std::string& text, const std::string& format,
          const std::string& out_path) {
  if (format == "json")
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << text << "\n";
  if (!out_path.empty()) write_json_file(out_path, doc);
}

struct QueryArgs {
  std::string model_path, entity_arg, feature_name, region_path, dist_path;
  std::string polynomial_path, feature2_name, threshold_text;
  std::string format = "text", out_path;
};

/// Loads the (tree, entity, feature index) triple shared by the model-based
/// query verbs.
struct LoadedQuery {
  DecisionTree tree;
  Entity entity;
  std::size_t feature;
};

LoadedQuery load_query(const QueryArgs& a) {
  if (a.model_path.empty()) throw Error("this query needs --model (or --polynomial)");
  if (a.entity_arg.empty()) throw Error("this query needs --entity");
  if (a.feature_name.empty()) throw Error("this query needs --feature");
  const Model model = load_model(read_json_file(a.model_path));
  DecisionTree tree = as_decision_tree(model);
  Entity entity = entity_from_arg(a.entity_arg, tree.space_ptr());
  const std::size_t feature = feature_index(tree.space(), a.feature_name);
  return LoadedQuery{std::move(tree), std::move(entity), feature};
}

int run_shap(const QueryArgs& a) {
  const LoadedQuery q = load_query(a);
  const ProductDistribution dist = load_distribution(read_json_file(a.dist_path));
  require_same_space(q.tree.space(), dist.space(), "shap");
  const Rational score = shap_tree_eval(q.tree, dist, q.entity, q.feature);

  Json doc{{"query", "shap"}, {"feature", a.feature_name}};
  add_rational_pair(doc, "score", score);
  emit(doc, rational_text(score), a.format, a.out_path);
  return 0;
}

int run_polynomial(const QueryArgs& a) {
  const LoadedQuery q = load_query(a);
  const MultilinearPolynomial poly = shap_polynomial(q.tree, q.entity, q.feature);

  Json doc{{"query", "polynomial"},
           {"feature", a.feature_name},
           {"rendered", poly.render()},
           {"polynomial", polynomial_to_json(poly)}};
  emit(doc, poly.render(), a.format, a.out_path);
  return 0;
}

int run_interval(const QueryArgs& a) {
  const LoadedQuery q = load_query(a);
  const Hyperrectangle region = load_region(read_json_file(a.region_path));
  require_same_space(q.tree.space(), region.space(), "interval");
  const ShapInterval iv = shap_interval(q.tree, q.entity, q.feature, region);

  Json doc{{"query", "interval"}, {"feature", a.feature_name}};
  add_rational_pair(doc, "lo", iv.lo);
  add_rational_pair(doc, "hi", iv.hi);
  doc["argmin"] = distribution_to_json(iv.argmin);
  doc["argmax"] = distribution_to_json(iv.argmax);
  const std::string text = "[" + to_fraction_string(iv.lo) + ", " + to_fraction_string(iv.hi) +
                           "] ~ [" + to_decimal_string(iv.lo) + ", " + to_decimal_string(iv.hi) +
                           "]\nargmin: " + dist_text(iv.argmin) +
                           "\nargmax: " + dist_text(iv.argmax);
  emit(doc, text, a.format, a.out_path);
  return 0;
}

/// The decide family.  `kind` is one of max, min, ambiguity, irrelevancy,
/// dominance.  For max/min/ambiguity/irrelevancy, --polynomial switches from
/// a model's SHAP score to a raw objective polynomial (the form the
/// satisfiability gadget emits).
int run_decide(const std::string& kind, const QueryArgs& a) {
  Json doc{{"query", "decide " + kind}};
  std::string text;

  const bool needs_threshold = kind == "max" || kind == "min";
  Rational threshold;
  if (needs_threshold) threshold = parse_rational(a.threshold_text);

  auto answer_text = [](bool answer) { return std::string(answer ? "true" : "false"); };

  if (!a.polynomial_path.empty()) {
    if (kind == "dominance")
      throw Error("decide dominance requires a model; --polynomial is not supported");
    const MultilinearPolynomial poly = load_polynomial(read_json_file(a.polynomial_path));
    const Hyperrectangle region = load_region(read_json_file(a.region_path));
    require_same_space(poly.space(), region.space(), "decide");
    if (kind == "max" || kind == "min") {
      const ThresholdVerdict v = kind == "max" ? polynomial_region_max(poly, region, threshold)
                                               : polynomial_region_min(poly, region, threshold);
      doc["answer"] = v.answer;
      add_rational_pair(doc, "best", v.best);
      add_rational_pair(doc, "threshold", threshold);
      text = answer_text(v.answer) + "\nbest: " + rational_text(v.best);
      if (v.witness) {
        doc["witness"] = distribution_to_json(*v.witness);
        text += "\nwitness: " + dist_text(*v.witness);
      }
    } else if (kind == "ambiguity") {
      const AmbiguityVerdict v = polynomial_region_ambiguity(poly, region);
      doc["answer"] = v.answer;
      add_rational_pair(doc, "lo", v.lo);
      add_rational_pair(doc, "hi", v.hi);
      text = answer_text(v.answer);
      if (v.answer) {
        doc["positive_witness"] = distribution_to_json(*v.positive_witness);
        doc["negative_witness"] = distribution_to_json(*v.negative_witness);
        text += "\npositive witness: " + dist_text(*v.positive_witness) +
                "\nnegative witness: " + dist_text(*v.negative_witness);
      }
    } else {  // irrelevancy
      const IrrelevancyVerdict v = polynomial_region_irrelevancy(poly, region);
      doc["answer"] = v.answer;
      add_rational_pair(doc, "lo", v.lo);
      add_rational_pair(doc, "hi", v.hi);
      text = answer_text(v.answer);
      if (v.witness) {
        doc["witness"] = distribution_to_json(*v.witness);
        text += "\nwitness: " + dist_text(*v.witness);
      }
    }
    emit(doc, text, a.format, a.out_path);
    return 0;
  }

  const LoadedQuery q = load_query(a);
  const Hyperrectangle region = load_region(read_json_file(a.region_path));
  require_same_space(q.tree.space(), region.space(), "decide");

  if (kind == "max" || kind == "min") {
    const ThresholdVerdict v =
        kind == "max" ? region_max_shap(q.tree, q.entity, q.feature, region, threshold)
                      : region_min_shap(q.tree, q.entity, q.feature, region, threshold);
    doc["answer"] = v.answer;
    add_rational_pair(doc, "best", v.best);
    add_rational_pair(doc, "threshold", threshold);
    text = answer_text(v.answer) + "\nbest: " + rational_text(v.best);
    if (v.witness) {
      doc["witness"] = distribution_to_json(*v.witness);
      text += "\nwitness: " + dist_text(*v.witness);
    }
  } else if (kind == "ambiguity") {
    const AmbiguityVerdict v = region_ambiguity(q.tree, q.entity, q.feature, region);
    doc["answer"] = v.answer;
    add_rational_pair(doc, "lo", v.lo);
    add_rational_pair(doc, "hi", v.hi);
    text = answer_text(v.answer);
    if (v.answer) {
      doc["positive_witness"] = distribution_to_json(*v.positive_witness);
      doc["negative_witness"] = distribution_to_json(*v.negative_witness);
      text += "\npositive witness: " + dist_text(*v.positive_witness) +
              "\nnegative witness: " + dist_text(*v.negative_witness);
    }
  } else if (kind == "irrelevancy") {
    const IrrelevancyVerdict v = region_irrelevancy(q.tree, q.entity, q.feature, region);
    doc["answer"] = v.answer;
    add_rational_pair(doc, "lo", v.lo);
    add_rational_pair(doc, "hi", v.hi);
    text = answer_text(v.answer);
    if (v.witness) {
      doc["witness"] = distribution_to_json(*v.witness);
      text += "\nwitness: " + dist_text(*v.witness);
    }
  } else {  // dominance
    const std::size_t other = feature_index(q.tree.space(), a.feature2_name);
    const DominanceVerdict v = feature_dominance(q.tree, q.entity, q.feature, other, region);
    doc["answer"] = v.answer;
    add_rational_pair(doc, "min_difference", v.min_difference);
    text = answer_text(v.answer) + "\nmin difference: " + rational_text(v.min_difference);
    if (v.counterexample) {
      doc["counterexample"] = distribution_to_json(*v.counterexample);
      text += "\ncounterexample: " + dist_text(*v.counterexample);
    }
  }
  emit(doc, text, a.format, a.out_path);
  return 0;
}

/// Formula file for gadget sat3: {"variables": n, "clauses": [[±v, ±v, ±v],
/// ...]} with 1-based signed variable numbers (negative = negated literal).
Cnf3Formula load_cnf(const Json& j) {
  if (!j.is_object() || !j.contains("variables") || !j.contains("clauses"))
    throw ParseError("formula: expected an object with \"variables\" and \"clauses\"");
  if (!j["variables"].is_number_unsigned() || j["variables"].get<std::size_t>() == 0)
    throw ParseError("formula.variables: expected a positive integer");
  const std::size_t n = j["variables"].get<std::size_t>();
  if (!j["clauses"].is_array()) throw ParseError("formula.clauses: expected an array");
  std::vector<Clause3> clauses;
  for (std::size_t c = 0; c < j["clauses"].size(); ++c) {
    const Json& row = j["clauses"][c];
    const std::string where = "formula.clauses[" + std::to_string(c) + "]";
    if (!row.is_array() || row.size() != 3)
      throw ParseError(where + ": expected exactly three literals");
    Literal lits[3];
    for (std::size_t i = 0; i < 3; ++i) {
      if (!row[i].is_number_integer() || row[i].get<long long>() == 0)
        throw ParseError(where + ": literals are non-zero signed variable numbers");
      const long long v = row[i].get<long long>();
      const unsigned long long magnitude = static_cast<unsigned long long>(v < 0 ? -v : v);
      if (magnitude > n) throw ParseError(where + ": variable number exceeds \"variables\"");
      lits[i] = Literal{static_cast<std::uint32_t>(magnitude - 1), v < 0};
    }
    clauses.push_back(Clause3{lits[0], lits[1], lits[2]});
  }
  return Cnf3Formula(n, std::move(clauses));
}

/// Graph file for gadget vertexcover: {"nodes": n, "edges": [[u, v], ...],
/// "k": k} with 1-based node numbers matching features v1..vn.
VertexCoverInstance load_vc(const Json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges") || !j.contains("k"))
    throw ParseError("graph: expected an object with \"nodes\", \"edges\" and \"k\"");
  if (!j["nodes"].is_number_unsigned() || j["nodes"].get<std::size_t>() == 0)
    throw ParseError("graph.nodes: expected a positive integer");
  if (!j["k"].is_number_unsigned()) throw ParseError("graph.k: expected a positive integer");
  const std::size_t n = j["nodes"].get<std::size_t>();
  if (!j["edges"].is_array()) throw ParseError("graph.edges: expected an array");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t e = 0; e < j["edges"].size(); ++e) {
    const Json& row = j["edges"][e];
    const std::string where = "graph.edges[" + std::to_string(e) + "]";
    if (!row.is_array() || row.size() != 2)
      throw ParseError(where + ": expected a pair of node numbers");
    std::uint32_t ends[2];
    for (std::size_t i = 0; i < 2; ++i) {
      if (!row[i].is_number_unsigned() || row[i].get<std::size_t>() == 0 ||
          row[i].get<std::size_t>() > n)
        throw ParseError(where + ": node numbers are 1-based and at most \"nodes\"");
      ends[i] = static_cast<std::uint32_t>(row[i].get<std::size_t>() - 1);
    }
    edges.emplace_back(ends[0], ends[1]);
  }
  return VertexCoverInstance(n, std::move(edges), j["k"].get<std::size_t>());
}

int run_gadget_sat3(const std::string& input, const std::string& out_dir) {
  const Cnf3Formula formula = load_cnf(read_json_file(input));
  const PolynomialMaxInstance inst = sat_to_multilinear(formula);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_json_file((dir / "polynomial.json").string(), polynomial_to_json(inst.objective));
  write_json_file((dir / "region.json").string(), region_to_json(inst.region));
  Json query{{"query", "max"},
             {"threshold", rational_to_json(inst.threshold)},
             {"satisfiable_iff", "max of the polynomial over the region >= threshold"}};
  write_json_file((dir / "query.json").string(), query);
  std::cout << "wrote " << (dir / "polynomial.json").string() << "\n"
            << "wrote " << (dir / "region.json").string() << "\n"
            << "wrote " << (dir / "query.json").string() << "\n";
  return 0;
}

int run_gadget_vc(const std::string& input, const std::string& out_dir) {
  const VertexCoverInstance vc = load_vc(read_json_file(input));
  const ShapMaxInstance inst = vc_to_region_max_shap(vc);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_json_file((dir / "model.json").string(), decision_tree_to_json(inst.model));
  write_json_file((dir / "entity.json").string(), entity_to_json(inst.entity));
  write_json_file((dir / "region.json").string(), region_to_json(inst.region));
  Json query{{"query", "max"},
             {"feature", inst.model.space().name(inst.feature)},
             {"threshold", rational_to_json(inst.threshold)},
             {"epsilon", rational_to_json(inst.epsilon)},
             {"k", vc.k()},
             {"cover_exists_iff", "max of the feature's SHAP score over the region >= threshold"}};
  write_json_file((dir / "query.json").string(), query);
  std::cout << "wrote " << (dir / "model.json").string() << "\n"
            << "wrote " << (dir / "entity.json").string() << "\n"
            << "wrote " << (dir / "region.json").string() << "\n"
            << "wrote " << (dir / "query.json").string() << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& data_path,
                       std::optional<std::uint64_t> seed, unsigned threads,
                       const std::string& out_dir) {
  ExperimentConfig config;
  if (!config_path.empty()) config = load_experiment_config(read_json_file(config_path));
  if (!data_path.empty()) config.csv_path = data_path;
  if (seed) config.seed = *seed;

  const ExperimentReport report = run_experiment(config, threads);
  write_report(report, out_dir);

  std::cout << "rows: " << report.kept_rows << " kept, " << report.dropped_rows
            << " dropped\n"
            << "tree: " << report.tree_nodes << " nodes, depth " << report.tree_depth << "\n"
            << "train accuracy: " << to_decimal_string(report.train_metrics.accuracy())
            << "\n"
            << "test accuracy:  " << to_decimal_string(report.test_metrics.accuracy()) << "\n"
            << "test precision: " << to_decimal_string(report.test_metrics.precision())
            << "\n";
  std::cout << "sensitive entities (of " << report.entities.size() << ") by fraction:\n";
  for (const FractionAnalysis& fa : report.fractions) {
    std::cout << "  " << to_decimal_string(fa.fraction) << ":";
    for (std::size_t k = 0; k < report.prefix_labels.size(); ++k)
      std::cout << " top-" << report.prefix_labels[k] << "=" << fa.sensitive_entities[k];
    std::cout << "\n";
  }
  std::cout << "report written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact SHAP attribution under distributional uncertainty"};
  app.require_subcommand(1);

  QueryArgs args;
  std::string gadget_input, gadget_out;
  std::string exp_config, exp_data, exp_out;
  std::optional<std::uint64_t> exp_seed;
  unsigned threads = 0;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", args.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", args.out_path, "Also write the JSON result to this file");
  };
  auto add_model_query = [&](CLI::App* cmd, bool required = true) {
    CLI::Option* model =
        cmd->add_option("--model", args.model_path, "Model file (decision tree or truth table)");
    CLI::Option* entity = cmd->add_option(
        "--entity", args.entity_arg, "Entity: bit string like 010, or an entity JSON file");
    CLI::Option* feature =
        cmd->add_option("--feature", args.feature_name, "Feature name to attribute");
    if (required) {
      model->required();
      entity->required();
      feature->required();
    }
  };

  CLI::App* shap_cmd = app.add_subcommand("shap", "Exact SHAP score at one distribution");
  add_model_query(shap_cmd);
  shap_cmd->add_option("--dist", args.dist_path, "Product distribution JSON file")->required();
  add_format(shap_cmd);

  CLI::App* poly_cmd =
      app.add_subcommand("polynomial", "Symbolic SHAP polynomial of a feature");
  add_model_query(poly_cmd);
  add_format(poly_cmd);

  CLI::App* interval_cmd =
      app.add_subcommand("interval", "Exact SHAP interval over a region");
  add_model_query(interval_cmd);
  interval_cmd->add_option("--region", args.region_path, "Hyperrectangle JSON file")->required();
  add_format(interval_cmd);

  CLI::App* decide_cmd = app.add_subcommand("decide", "Region decision queries");
  decide_cmd->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> decide_kinds;
  for (const std::string kind : {"max", "min", "ambiguity", "irrelevancy", "dominance"}) {
    const std::string help =
        kind == "max"           ? "Does the score reach at least the threshold somewhere?"
        : kind == "min"         ? "Does the score drop to at most the threshold somewhere?"
        : kind == "ambiguity"   ? "Is the score strictly positive somewhere and strictly negative elsewhere?"
        : kind == "irrelevancy" ? "Is the score exactly zero somewhere?"
                                : "Does one feature's score dominate another's everywhere?";
    CLI::App* cmd = decide_cmd->add_subcommand(kind, help);
    add_model_query(cmd, /*required=*/kind == "dominance");
    cmd->add_option("--region", args.region_path, "Hyperrectangle JSON file")->required();
    if (kind == "max" || kind == "min")
      cmd->add_option("--threshold", args.threshold_text, "Threshold q (exact rational)")
          ->required();
    if (kind == "dominance")
      cmd->add_option("--feature2", args.feature2_name, "The feature to compare against")
          ->required();
    else
      cmd->add_option("--polynomial", args.polynomial_path,
                      "Decide over a raw objective polynomial file instead of a model");
    add_format(cmd);
    decide_kinds.emplace_back(kind, cmd);
  }

  CLI::App* gadget_cmd = app.add_subcommand("gadget", "Hardness-reduction instance generators");
  gadget_cmd->require_subcommand(1);
  CLI::App* sat_cmd = gadget_cmd->add_subcommand(
      "sat3", "3-CNF satisfiability as polynomial maximization over the unit box");
  sat_cmd->add_option("--input", gadget_input, "Formula JSON: {\"variables\", \"clauses\"}")
      ->required();
  sat_cmd->add_option("--out", gadget_out, "Directory for the instance files")->required();
  CLI::App* vc_cmd = gadget_cmd->add_subcommand(
      "vertexcover", "Vertex cover as a SHAP threshold query over a region");
  vc_cmd->add_option("--input", gadget_input, "Graph JSON: {\"nodes\", \"edges\", \"k\"}")
      ->required();
  vc_cmd->add_option("--out", gadget_out, "Directory for the instance files")->required();

  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "Dataset-to-report interval and sensitivity study");
  exp_cmd->add_option("--config", exp_config, "Experiment configuration JSON file");
  exp_cmd->add_option("--data", exp_data, "CSV dataset path (overrides the config)");
  exp_cmd->add_option("--seed", exp_seed, "Seed (overrides the config)");
  exp_cmd->add_option("--threads", threads, "Worker thread cap (0 = automatic)");
  exp_cmd->add_option("--out", exp_out, "Directory for report.json, intervals.csv, model.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (shap_cmd->parsed()) return run_shap(args);
    if (poly_cmd->parsed()) return run_polynomial(args);
    if (interval_cmd->parsed()) return run_interval(args);
    if (decide_cmd->parsed()) {
      for (const auto& [kind, cmd] : decide_kinds)
        if (cmd->parsed()) return run_decide(kind, args);
    }
    if (sat_cmd->parsed()) return run_gadget_sat3(gadget_input, gadget_out);
    if (vc_cmd->parsed()) return run_gadget_vc(gadget_input, gadget_out);
    if (exp_cmd->parsed())
      return run_experiment_cmd(exp_config, exp_data, exp_seed, threads, exp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
