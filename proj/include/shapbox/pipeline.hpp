#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shapbox/dataset.hpp"
#include "shapbox/io.hpp"
#include "shapbox/parallel.hpp"
#include "shapbox/random.hpp"
#include "shapbox/region.hpp"
#include "shapbox/shap.hpp"
#include "shapbox/sqrt_approx.hpp"
#include "shapbox/train.hpp"

namespace shapbox {

/// Everything the end-to-end experiment needs.  The defaults reproduce the
/// California-housing study: seven numeric features plus ocean proximity,
/// mean-threshold binarization, a 70/30 split, a Gini tree with
/// min_samples_split 100, boxes from five repeated subsamples, and sampling
/// fractions 0.001 * 2^i.
struct ExperimentConfig {
  std::string csv_path = "data/housing.csv";
  std::vector<std::string> numeric_columns = {
      "longitude",      "latitude",   "housing_median_age", "total_rooms",
      "total_bedrooms", "population", "median_income"};
  std::string categorical_column = "ocean_proximity";
  std::vector<std::string> categorical_zero = {"INLAND"};
  std::string target_column = "median_house_value";

  Rational train_fraction = Rational(7, 10);
  std::uint64_t seed = 34;
  std::size_t min_samples_split = 100;
  std::size_t max_depth = 0;  // 0 = unbounded

  std::size_t repeats = 5;
  std::vector<Rational> fractions = default_fractions();
  std::size_t entity_count = 20;

  enum class EntityPool { Full, Train, Test };
  EntityPool entity_pool = EntityPool::Full;

  enum class StddevMode { Sample, Population };
  StddevMode stddev = StddevMode::Sample;

  std::vector<std::size_t> prefix_lengths = {1, 2, 3};
  bool include_full_ranking = true;

  static std::vector<Rational> default_fractions() {
    std::vector<Rational> f;
    for (int i = 0; i < 10; ++i) f.emplace_back(1 << i, 1000);
    return f;
  }

  BinarizationPlan binarization_plan() const {
    return BinarizationPlan{numeric_columns, categorical_column, categorical_zero,
                            target_column};
  }
};

/// Reads an experiment configuration from JSON.  Every field is optional and
/// falls back to the study defaults; unknown keys are rejected so typos fail
/// loudly instead of silently running the default.
inline ExperimentConfig load_experiment_config(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment config: expected a JSON object");
  ExperimentConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "dataset") {
      config.csv_path = value.get<std::string>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ParseError("config.seed: expected a non-negative integer");
      config.seed = value.get<std::uint64_t>();
    } else if (key == "train_fraction") {
      config.train_fraction = load_rational(value, "config.train_fraction");
    } else if (key == "min_samples_split") {
      config.min_samples_split = value.get<std::size_t>();
    } else if (key == "max_depth") {
      config.max_depth = value.get<std::size_t>();
    } else if (key == "repeats") {
      config.repeats = value.get<std::size_t>();
    } else if (key == "entity_count") {
      config.entity_count = value.get<std::size_t>();
    } else if (key == "fractions") {
      if (!value.is_array() || value.empty())
        throw ParseError("config.fractions: expected a non-empty array");
      config.fractions.clear();
      for (const Json& f : value)
        config.fractions.push_back(load_rational(f, "config.fractions"));
    } else if (key == "top_k") {
      if (!value.is_array()) throw ParseError("config.top_k: expected an array");
      config.prefix_lengths.clear();
      config.include_full_ranking = false;
      for (const Json& k : value) {
        if (k.is_string() && k.get<std::string>() == "full")
          config.include_full_ranking = true;
        else if (k.is_number_unsigned() && k.get<std::size_t>() >= 1)
          config.prefix_lengths.push_back(k.get<std::size_t>());
        else
          throw ParseError("config.top_k: entries must be positive integers or \"full\"");
      }
    } else if (key == "entity_pool") {
      const std::string pool = value.get<std::string>();
      if (pool == "full")
        config.entity_pool = ExperimentConfig::EntityPool::Full;
      else if (pool == "train")
        config.entity_pool = ExperimentConfig::EntityPool::Train;
      else if (pool == "test")
        config.entity_pool = ExperimentConfig::EntityPool::Test;
      else
        throw ParseError("config.entity_pool: expected \"full\", \"train\" or \"test\"");
    } else if (key == "stddev") {
      const std::string mode = value.get<std::string>();
      if (mode == "sample")
        config.stddev = ExperimentConfig::StddevMode::Sample;
      else if (mode == "population")
        config.stddev = ExperimentConfig::StddevMode::Population;
      else
        throw ParseError("config.stddev: expected \"sample\" or \"population\"");
    } else if (key == "numeric_columns") {
      config.numeric_columns = value.get<std::vector<std::string>>();
    } else if (key == "categorical_column") {
      config.categorical_column = value.get<std::string>();
    } else if (key == "categorical_zero") {
      config.categorical_zero = value.get<std::vector<std::string>>();
    } else if (key == "target_column") {
      config.target_column = value.get<std::string>();
    } else {
      throw ParseError("experiment config: unknown key \"" + key + "\"");
    }
  }
  if (config.train_fraction <= 0 || config.train_fraction >= 1)
    throw Error("config.train_fraction must lie strictly between 0 and 1");
  if (config.repeats < 2) throw Error("config.repeats must be at least 2");
  if (config.entity_count == 0) throw Error("config.entity_count must be positive");
  for (const Rational& f : config.fractions)
    if (f <= 0 || f > 1) throw Error("config.fractions entries must lie in (0, 1]");
  return config;
}

/// A box estimated from repeated subsamples: per feature, the median of the
/// per-repeat empirical frequencies, widened by their standard deviation and
/// clipped to [0, 1].
struct EstimatedBox {
  Hyperrectangle box;
  std::size_t sample_size = 0;
  std::vector<Rational> centers;
  std::vector<Rational> sigmas;
};

/// Estimates the uncertainty box for one sampling fraction.  Repeat j
/// (1-based) draws ceil(fraction * N) rows without replacement using the
/// stream seeded with seed xor j; the deviation is the (n-1)-normalized
/// standard deviation of the repeats around their mean by default, the
/// n-normalized variant on request.  Standard deviations are irrational in
/// general, so sigma is the best rational approximation with denominator at
/// most 10^9.
inline EstimatedBox estimate_hyperrectangle(
    const BinaryDataset& data, const Rational& fraction, std::size_t repeats,
    std::uint64_t seed,
    ExperimentConfig::StddevMode stddev = ExperimentConfig::StddevMode::Sample) {
  if (repeats < 2) throw Error("estimate_hyperrectangle needs at least two repeats");
  if (fraction <= 0 || fraction > 1) throw Error("sampling fraction must lie in (0, 1]");
  const std::size_t n_rows = data.size();
  const std::size_t n_features = data.space->size();

  // ceil(fraction * N), exactly.
  const Integer scaled = numerator(fraction) * n_rows + denominator(fraction) - 1;
  const std::size_t m = static_cast<std::size_t>(scaled / denominator(fraction));
  if (m == 0 || m > n_rows) throw Error("sampling fraction yields an empty or oversized sample");

  std::vector<std::vector<Rational>> frequencies(n_features);
  for (std::size_t j = 1; j <= repeats; ++j) {
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(j));
    const std::vector<std::size_t> sample = sample_without_replacement(n_rows, m, rng);
    std::vector<std::size_t> ones(n_features, 0);
    for (std::size_t r : sample)
      for (std::size_t f = 0; f < n_features; ++f) ones[f] += (data.rows[r] >> f) & 1;
    for (std::size_t f = 0; f < n_features; ++f)
      frequencies[f].emplace_back(static_cast<unsigned long>(ones[f]),
                                  static_cast<unsigned long>(m));
  }

  const Integer sigma_denominator_bound = Integer(1000000000);
  EstimatedBox out{Hyperrectangle(data.space, std::vector<Rational>(n_features, Rational(0)),
                                  std::vector<Rational>(n_features, Rational(1))),
                   m,
                   {},
                   {}};
  std::vector<Rational> lo(n_features), hi(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    std::vector<Rational> values = frequencies[f];
    std::sort(values.begin(), values.end());
    const Rational center = repeats % 2 == 1
                                ? values[repeats / 2]
                                : (values[repeats / 2 - 1] + values[repeats / 2]) / 2;

    Rational mean = 0;
    for (const Rational& v : values) mean += v;
    mean /= static_cast<unsigned long>(repeats);
    Rational variance = 0;
    for (const Rational& v : values) variance += (v - mean) * (v - mean);
    const std::size_t normalizer =
        stddev == ExperimentConfig::StddevMode::Sample ? repeats - 1 : repeats;
    const Rational sigma = sqrt_best_approx(variance / static_cast<unsigned long>(normalizer),
                                            sigma_denominator_bound);

    lo[f] = clamp(center - sigma, Rational(0), Rational(1));
    hi[f] = clamp(center + sigma, Rational(0), Rational(1));
    out.centers.push_back(center);
    out.sigmas.push_back(sigma);
  }
  out.box = Hyperrectangle(data.space, std::move(lo), std::move(hi));
  return out;
}

/// Exact SHAP interval of one feature, as stored in the report, with the
/// vertices attaining each endpoint (first attaining vertex on ties).
struct FeatureIntervalRow {
  std::size_t feature = 0;
  Rational lo, hi;
  std::uint64_t argmin_vertex = 0;
  std::uint64_t argmax_vertex = 0;
};

struct EntityAnalysis {
  std::size_t source_row = 0;  // index into the binarized dataset
  std::uint64_t bits = 0;
  std::vector<FeatureIntervalRow> intervals;        // one per feature
  std::vector<RankingSensitivity> sensitivity;      // one per prefix length
};

struct FractionAnalysis {
  Rational fraction;
  std::size_t sample_size = 0;
  std::optional<Hyperrectangle> box;
  std::vector<Rational> centers, sigmas;
  std::vector<EntityAnalysis> entities;
  /// Per prefix length: how many of the entities have a non-unanimous
  /// ranking prefix across the box.
  std::vector<std::size_t> sensitive_entities;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t total_rows = 0;
  std::size_t kept_rows = 0;
  std::size_t dropped_rows = 0;
  std::vector<Rational> numeric_means;
  Rational target_mean;

  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  EvalMetrics train_metrics, test_metrics;
  std::optional<DecisionTree> tree;
  std::size_t tree_nodes = 0;
  std::size_t tree_depth = 0;
  std::vector<TrainTraceEntry> train_trace;

  std::vector<std::size_t> prefix_lengths;  // resolved; the full ranking is n
  std::vector<std::string> prefix_labels;   // "1", "2", "3", "full", ...

  std::vector<std::pair<std::size_t, std::uint64_t>> entities;  // (source row, bits)
  std::vector<FractionAnalysis> fractions;
};

/// Runs the whole study: binarize, split, train, estimate a box per sampling
/// fraction, and compute every entity's exact SHAP intervals and ranking
/// sensitivity over each box.  All randomness derives from config.seed, so
/// the report is reproducible run to run; `threads` only changes wall time.
inline ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 0) {
  ExperimentReport report;
  report.config = config;

  const RawDataset raw = load_csv(config.csv_path);
  const BinaryDataset data = binarize(raw, config.binarization_plan());
  report.total_rows = raw.rows.size();
  report.kept_rows = data.size();
  report.dropped_rows = data.dropped_rows;
  report.numeric_means = data.numeric_means;
  report.target_mean = data.target_mean;
  const std::size_t n_features = data.space->size();

  // Seeded 70/30 split: shuffle all row indices, the first ceil(f*N) train.
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 split_rng(config.seed);
  deterministic_shuffle(order, split_rng);
  if (config.train_fraction <= 0 || config.train_fraction >= 1)
    throw Error("train fraction must lie strictly between 0 and 1");
  const Integer scaled =
      numerator(config.train_fraction) * data.size() + denominator(config.train_fraction) - 1;
  const std::size_t train_count =
      static_cast<std::size_t>(scaled / denominator(config.train_fraction));
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<long>(train_count));
  split.test.assign(order.begin() + static_cast<long>(train_count), order.end());
  report.train_rows = split.train.size();
  report.test_rows = split.test.size();

  TrainedTree trained =
      train_gini_tree(data, split.train, TrainConfig{config.min_samples_split, config.max_depth});
  report.train_metrics = evaluate_tree(trained.tree, data, split.train);
  report.test_metrics = evaluate_tree(trained.tree, data, split.test);
  report.tree_nodes = trained.tree.node_count();
  report.tree_depth = trained.tree.depth();
  report.train_trace = std::move(trained.trace);
  report.tree = std::move(trained.tree);
  const DecisionTree& tree = *report.tree;

  // Explanation targets: distinct entity patterns drawn from the configured
  // pool (study choice: the full binarized dataset), in seeded shuffle order.
  std::vector<std::size_t> pool;
  switch (config.entity_pool) {
    case ExperimentConfig::EntityPool::Train: pool = split.train; break;
    case ExperimentConfig::EntityPool::Test: pool = split.test; break;
    case ExperimentConfig::EntityPool::Full:
      pool.resize(data.size());
      for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
      break;
  }
  std::mt19937_64 entity_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  deterministic_shuffle(pool, entity_rng);
  for (std::size_t r : pool) {
    if (report.entities.size() == config.entity_count) break;
    const std::uint64_t bits = data.rows[r];
    bool seen = false;
    for (const auto& [row, existing] : report.entities) seen = seen || existing == bits;
    if (!seen) report.entities.emplace_back(r, bits);
  }

  // Resolved ranking prefix lengths.
  report.prefix_lengths = config.prefix_lengths;
  for (std::size_t k : report.prefix_lengths)
    report.prefix_labels.push_back(std::to_string(k));
  if (config.include_full_ranking) {
    report.prefix_lengths.push_back(n_features);
    report.prefix_labels.push_back("full");
  }

  // The SHAP polynomial depends on the tree, entity and feature only, so one
  // symbolic computation per (entity, feature) serves every box.
  std::vector<std::vector<MultilinearPolynomial>> polys(report.entities.size());
  parallel_for(report.entities.size(), threads, [&](std::size_t i) {
    const Entity e(data.space, report.entities[i].second);
    polys[i].reserve(n_features);
    for (std::size_t x = 0; x < n_features; ++x)
      polys[i].push_back(shap_polynomial(tree, e, x));
  });

  for (const Rational& fraction : config.fractions) {
    EstimatedBox estimated =
        estimate_hyperrectangle(data, fraction, config.repeats, config.seed, config.stddev);
    FractionAnalysis fa;
    fa.fraction = fraction;
    fa.sample_size = estimated.sample_size;
    fa.centers = std::move(estimated.centers);
    fa.sigmas = std::move(estimated.sigmas);
    fa.box = std::move(estimated.box);
    fa.entities.resize(report.entities.size());

    parallel_for(report.entities.size(), threads, [&](std::size_t i) {
      EntityAnalysis& ea = fa.entities[i];
      ea.source_row = report.entities[i].first;
      ea.bits = report.entities[i].second;

      std::vector<std::vector<Rational>> scores;
      scores.reserve(n_features);
      for (std::size_t x = 0; x < n_features; ++x)
        scores.push_back(polynomial_vertex_values(polys[i][x], *fa.box));

      for (std::size_t x = 0; x < n_features; ++x) {
        // min_element / max_element both return the first extremum, matching
        // the first-vertex tie convention used everywhere else.
        const auto lo_it = std::min_element(scores[x].begin(), scores[x].end());
        const auto hi_it = std::max_element(scores[x].begin(), scores[x].end());
        ea.intervals.push_back(FeatureIntervalRow{
            x, *lo_it, *hi_it,
            static_cast<std::uint64_t>(lo_it - scores[x].begin()),
            static_cast<std::uint64_t>(hi_it - scores[x].begin())});
      }
      ea.sensitivity = sensitivity_from_scores(scores, report.prefix_lengths);
    });

    fa.sensitive_entities.assign(report.prefix_lengths.size(), 0);
    for (const EntityAnalysis& ea : fa.entities)
      for (std::size_t k = 0; k < ea.sensitivity.size(); ++k)
        if (!ea.sensitivity[k].unanimous) ++fa.sensitive_entities[k];

    report.fractions.push_back(std::move(fa));
  }
  return report;
}

inline const char* entity_pool_name(ExperimentConfig::EntityPool pool) {
  switch (pool) {
    case ExperimentConfig::EntityPool::Train: return "train";
    case ExperimentConfig::EntityPool::Test: return "test";
    default: return "full";
  }
}

inline const char* stddev_mode_name(ExperimentConfig::StddevMode mode) {
  return mode == ExperimentConfig::StddevMode::Population ? "population" : "sample";
}

/// The report as one JSON document.  Rationals are exact num/den strings;
/// interval endpoints and metrics carry parallel decimal fields.
inline Json report_to_json(const ExperimentReport& report) {
  const FeatureSpace& space = report.tree->space();
  Json j;
  j["dataset"] = {
      {"path", report.config.csv_path},
      {"total_rows", report.total_rows},
      {"kept_rows", report.kept_rows},
      {"dropped_rows", report.dropped_rows},
      {"features", feature_space_to_json(space)},
      {"target", report.config.target_column},
      {"numeric_means", detail::rational_array_to_json(report.numeric_means)},
      {"target_mean", rational_to_json(report.target_mean)},
  };
  j["settings"] = {
      {"seed", report.config.seed},
      {"train_fraction", rational_to_json(report.config.train_fraction)},
      {"min_samples_split", report.config.min_samples_split},
      {"max_depth", report.config.max_depth},
      {"repeats", report.config.repeats},
      {"entity_count", report.config.entity_count},
      {"entity_pool", entity_pool_name(report.config.entity_pool)},
      {"stddev", stddev_mode_name(report.config.stddev)},
      {"prefix_labels", report.prefix_labels},
  };
  Json fracs = Json::array();
  for (const Rational& f : report.config.fractions) fracs.push_back(rational_to_json(f));
  j["settings"]["fractions"] = std::move(fracs);

  j["model"] = {
      {"train_rows", report.train_rows},
      {"test_rows", report.test_rows},
      {"nodes", report.tree_nodes},
      {"depth", report.tree_depth},
      {"train_accuracy", rational_to_json(report.train_metrics.accuracy())},
      {"train_accuracy_decimal", to_double(report.train_metrics.accuracy())},
      {"test_accuracy", rational_to_json(report.test_metrics.accuracy())},
      {"test_accuracy_decimal", to_double(report.test_metrics.accuracy())},
      {"test_precision", rational_to_json(report.test_metrics.precision())},
      {"test_precision_decimal", to_double(report.test_metrics.precision())},
      {"tree", decision_tree_to_json(*report.tree)},
  };

  Json entities = Json::array();
  for (const auto& [row, bits] : report.entities) {
    Json values = Json::array();
    for (std::size_t i = 0; i < space.size(); ++i)
      values.push_back(static_cast<int>((bits >> i) & 1));
    entities.push_back(Json{{"row", row}, {"values", std::move(values)}});
  }
  j["entities"] = std::move(entities);

  Json fractions = Json::array();
  for (const FractionAnalysis& fa : report.fractions) {
    Json jf;
    jf["fraction"] = rational_to_json(fa.fraction);
    jf["fraction_decimal"] = to_double(fa.fraction);
    jf["sample_size"] = fa.sample_size;
    jf["box"] = region_to_json(*fa.box);
    jf["centers"] = detail::rational_array_to_json(fa.centers);
    jf["sigmas"] = detail::rational_array_to_json(fa.sigmas);

    Json jents = Json::array();
    for (std::size_t i = 0; i < fa.entities.size(); ++i) {
      const EntityAnalysis& ea = fa.entities[i];
      Json je;
      je["entity"] = i;
      je["row"] = ea.source_row;
      Json intervals = Json::array();
      for (const FeatureIntervalRow& iv : ea.intervals) {
        intervals.push_back(Json{{"feature", space.name(iv.feature)},
                                 {"lo", rational_to_json(iv.lo)},
                                 {"hi", rational_to_json(iv.hi)},
                                 {"lo_decimal", to_double(iv.lo)},
                                 {"hi_decimal", to_double(iv.hi)},
                                 {"argmin_vertex", iv.argmin_vertex},
                                 {"argmax_vertex", iv.argmax_vertex}});
      }
      je["intervals"] = std::move(intervals);
      Json rankings = Json::array();
      for (std::size_t k = 0; k < ea.sensitivity.size(); ++k) {
        const RankingSensitivity& sens = ea.sensitivity[k];
        Json jp = Json::array();
        for (const RankingPrefix& p : sens.prefixes) {
          Json names = Json::array();
          for (std::size_t f : p.features) names.push_back(space.name(f));
          jp.push_back(Json{{"features", std::move(names)},
                            {"first_vertex", p.first_vertex},
                            {"vertices", p.vertex_count}});
        }
        Json jc = Json::array();
        for (const DominanceFact& fact : sens.certificate) {
          jc.push_back(Json{{"above", space.name(fact.above)},
                            {"below", space.name(fact.below)},
                            {"min_difference", rational_to_json(fact.min_difference)},
                            {"min_difference_decimal", to_double(fact.min_difference)}});
        }
        rankings.push_back(Json{{"k", report.prefix_labels[k]},
                                {"unanimous", sens.unanimous},
                                {"prefixes", std::move(jp)},
                                {"certificate", std::move(jc)}});
      }
      je["rankings"] = std::move(rankings);
      jents.push_back(std::move(je));
    }
    jf["entities"] = std::move(jents);

    Json sensitive;
    for (std::size_t k = 0; k < report.prefix_labels.size(); ++k)
      sensitive[report.prefix_labels[k]] = fa.sensitive_entities[k];
    jf["sensitive_entities"] = std::move(sensitive);
    fractions.push_back(std::move(jf));
  }
  j["fractions"] = std::move(fractions);
  return j;
}

/// Flat CSV of every interval: fraction,entity,feature,lo,hi with exact
/// rational fields.
inline std::string intervals_to_csv(const ExperimentReport& report) {
  const FeatureSpace& space = report.tree->space();
  std::string out = "fraction,entity,feature,lo,hi\n";
  for (const FractionAnalysis& fa : report.fractions) {
    const std::string frac = to_fraction_string(fa.fraction);
    for (std::size_t i = 0; i < fa.entities.size(); ++i) {
      for (const FeatureIntervalRow& iv : fa.entities[i].intervals) {
        out += frac;
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += space.name(iv.feature);
        out += ',';
        out += to_fraction_string(iv.lo);
        out += ',';
        out += to_fraction_string(iv.hi);
        out += '\n';
      }
    }
  }
  return out;
}

/// Writes report.json, intervals.csv and model.json into `directory`,
/// creating it if needed.
inline void write_report(const ExperimentReport& report, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  write_json_file((dir / "report.json").string(), report_to_json(report));
  write_json_file((dir / "model.json").string(), decision_tree_to_json(*report.tree));
  std::ofstream csv(dir / "intervals.csv", std::ios::binary);
  if (!csv) throw Error("cannot write " + (dir / "intervals.csv").string());
  csv << intervals_to_csv(report);
}

}  // namespace shapbox
