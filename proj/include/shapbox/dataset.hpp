#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "shapbox/feature_space.hpp"
#include "shapbox/rational.hpp"

namespace shapbox {

/// A CSV table as raw text cells.  The reader handles the plain dialect these
/// datasets use — comma separated, no quoting or escaping — and strips
/// trailing carriage returns.
struct RawDataset {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw Error("dataset has no column \"" + name + "\"");
  }
};

inline RawDataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open \"" + path + "\"");
  RawDataset data;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && data.columns.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (data.columns.empty()) {
      data.columns = std::move(cells);
    } else {
      if (cells.size() != data.columns.size())
        throw ParseError(path + ":" + std::to_string(line_number) + ": expected " +
                         std::to_string(data.columns.size()) + " cells, found " +
                         std::to_string(cells.size()));
      data.rows.push_back(std::move(cells));
    }
  }
  if (data.columns.empty()) throw ParseError(path + ": missing header row");
  return data;
}

/// Which columns feed the binary classification problem and how each is
/// thresholded.
struct BinarizationPlan {
  /// Numeric feature columns, in feature order; each becomes 1 when the value
  /// is strictly above its column mean.
  std::vector<std::string> numeric_columns;
  /// Optional categorical feature column, appended after the numeric ones;
  /// values listed in categorical_zero map to 0, everything else to 1.
  std::string categorical_column;
  std::vector<std::string> categorical_zero;
  /// Numeric target column, thresholded by its own mean.
  std::string target_column;
};

/// The binarized classification data: entities over the feature space plus
/// 0/1 labels, with the thresholds that produced them.
struct BinaryDataset {
  FeatureSpacePtr space;
  std::vector<std::uint64_t> rows;  // entity bits, feature i at bit i
  std::vector<int> labels;
  std::vector<Rational> numeric_means;  // per numeric feature, in order
  Rational target_mean;
  std::size_t dropped_rows = 0;  // rows removed for missing values

  std::size_t size() const { return rows.size(); }
};

namespace detail {
/// Missing cells are empty fields or a literal NaN marker.
inline bool missing_cell(const std::string& cell) {
  return cell.empty() || cell == "NaN" || cell == "nan";
}
}  // namespace detail

/// Binarizes a raw table: drops rows with a missing value in any used column
/// first, then computes column means over the remaining rows, then
/// thresholds.  Numeric cells must parse as exact rationals.
inline BinaryDataset binarize(const RawDataset& raw, const BinarizationPlan& plan) {
  const bool has_categorical = !plan.categorical_column.empty();
  std::vector<std::size_t> numeric_idx;
  numeric_idx.reserve(plan.numeric_columns.size());
  for (const std::string& name : plan.numeric_columns)
    numeric_idx.push_back(raw.column_index(name));
  const std::size_t target_idx = raw.column_index(plan.target_column);
  const std::size_t cat_idx = has_categorical ? raw.column_index(plan.categorical_column) : 0;

  // Pass 1: keep complete rows, accumulate sums for the means.
  std::vector<std::size_t> kept;
  std::vector<std::vector<Rational>> numeric_values(numeric_idx.size());
  std::vector<Rational> target_values;
  std::vector<Rational> sums(numeric_idx.size(), Rational(0));
  Rational target_sum = 0;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const std::vector<std::string>& row = raw.rows[r];
    bool missing = detail::missing_cell(row[target_idx]) ||
                   (has_categorical && detail::missing_cell(row[cat_idx]));
    for (std::size_t j = 0; j < numeric_idx.size() && !missing; ++j)
      missing = detail::missing_cell(row[numeric_idx[j]]);
    if (missing) continue;
    kept.push_back(r);
    for (std::size_t j = 0; j < numeric_idx.size(); ++j) {
      Rational v = parse_rational(row[numeric_idx[j]]);
      sums[j] += v;
      numeric_values[j].push_back(std::move(v));
    }
    Rational t = parse_rational(row[target_idx]);
    target_sum += t;
    target_values.push_back(std::move(t));
  }
  if (kept.empty()) throw Error("no complete rows to binarize");

  BinaryDataset out;
  out.dropped_rows = raw.rows.size() - kept.size();
  const Rational count(static_cast<unsigned long>(kept.size()));
  for (const Rational& s : sums) out.numeric_means.push_back(s / count);
  out.target_mean = target_sum / count;

  std::vector<std::string> names = plan.numeric_columns;
  if (has_categorical) names.push_back(plan.categorical_column);
  out.space = make_space(std::move(names));

  out.rows.reserve(kept.size());
  out.labels.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < numeric_idx.size(); ++j)
      if (numeric_values[j][k] > out.numeric_means[j]) bits |= std::uint64_t{1} << j;
    if (has_categorical) {
      const std::string& cell = raw.rows[kept[k]][cat_idx];
      bool zero = false;
      for (const std::string& v : plan.categorical_zero) zero = zero || cell == v;
      if (!zero) bits |= std::uint64_t{1} << numeric_idx.size();
    }
    out.rows.push_back(bits);
    out.labels.push_back(target_values[k] > out.target_mean ? 1 : 0);
  }
  return out;
}

/// Row indices split into train and test by a seeded shuffle; the first
/// ceil(train_fraction * n) shuffled rows train.
struct DatasetSplit {
  std::vector<std::size_t> train, test;
};

}  // namespace shapbox
