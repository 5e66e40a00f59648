/*
 * Copyright 2026 The fairssl authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRSSL_DATASET_HPP
#define FAIRSSL_DATASET_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairssl/common.hpp"

namespace fairssl {

/// How a feature column is treated by standardization: one-hot and 0/1
/// columns are left as indicators, everything else is z-scored.
enum class ColumnKind { Numeric, Binary };

/// Tabular data with one binary sensitive attribute and optional binary
/// labels. The sensitive column is never part of `features`.
struct Dataset {
  Matrix features;                         // K x v
  IntVector sensitive;                     // K, values 0/1
  std::optional<IntVector> labels;         // K, values 0/1
  std::vector<std::string> feature_names;  // length v
  std::vector<ColumnKind> feature_kinds;   // length v

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }

  Dataset take(const std::vector<Index>& idx) const {
    Dataset out;
    out.features.resize(static_cast<Index>(idx.size()), cols());
    out.sensitive.resize(static_cast<Index>(idx.size()));
    if (labels) out.labels.emplace(static_cast<Index>(idx.size()));
    for (Index i = 0; i < static_cast<Index>(idx.size()); ++i) {
      out.features.row(i) = features.row(idx[i]);
      out.sensitive(i) = sensitive(idx[i]);
      if (labels) (*out.labels)(i) = (*labels)(idx[i]);
    }
    out.feature_names = feature_names;
    out.feature_kinds = feature_kinds;
    return out;
  }

  void validate() const {
    if (features.rows() != sensitive.size())
      throw InvalidArgument("dataset: feature rows != sensitive length");
    if (labels && labels->size() != features.rows())
      throw InvalidArgument("dataset: labels length != feature rows");
    for (Index i = 0; i < sensitive.size(); ++i)
      if (sensitive(i) != 0 && sensitive(i) != 1)
        throw InvalidArgument("dataset: sensitive values must be 0/1");
    if (!features.allFinite())
      throw InvalidArgument("dataset: non-finite feature value");
  }
};

/// Sizes of the labeled/test parts; whatever remains becomes unlabeled.
/// `max_unlabeled` truncates the unlabeled part (used by the size ablation);
/// it is the only way an empty part is permitted.
struct SplitSpec {
  Index n_labeled = 0;
  Index n_test = 0;
  std::uint64_t seed = 0;
  std::optional<Index> max_unlabeled;
};

struct Split {
  Dataset labeled;
  Dataset unlabeled;  // labels retained as hidden ground truth
  Dataset test;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return v;
}

/// Map a raw column with exactly two distinct values onto {0,1}. Numeric
/// {0,1} columns keep their coding; anything else is ordered
/// lexicographically (smallest value -> 0).
inline int binary_code(const std::string& cell,
                       const std::vector<std::string>& levels,
                       const std::string& column, std::size_t row) {
  if (levels.size() != 2)
    throw InputError("column '" + column + "' is not binary (" +
                     std::to_string(levels.size()) + " distinct values)");
  if (cell == levels[0]) return 0;
  if (cell == levels[1]) return 1;
  throw InputError("unexpected value '" + cell + "' in column '" + column +
                   "' at row " + std::to_string(row));
}

struct RawColumn {
  std::string name;
  std::vector<std::string> cells;  // raw strings, "" = missing
  bool all_numeric = true;         // over non-missing cells
  bool any_numeric = false;
};

/// Standardize numeric columns in place using statistics fit on `fit_rows`;
/// binary/one-hot columns are left untouched. Population variance.
inline void standardize_columns(std::vector<Dataset*> parts,
                                const std::vector<const Dataset*>& fit_parts) {
  if (fit_parts.empty() || parts.empty()) return;
  const auto& kinds = fit_parts.front()->feature_kinds;
  Index n = 0;
  for (const auto* p : fit_parts) n += p->rows();
  if (n == 0) return;
  for (Index j = 0; j < static_cast<Index>(kinds.size()); ++j) {
    if (kinds[j] != ColumnKind::Numeric) continue;
    double sum = 0.0;
    for (const auto* p : fit_parts) sum += p->features.col(j).sum();
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto* p : fit_parts)
      ss += (p->features.col(j).array() - mean).square().sum();
    const double var = ss / static_cast<double>(n);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    for (auto* p : parts)
      p->features.col(j) =
          ((p->features.col(j).array() - mean) * scale).matrix();
  }
}

}  // namespace detail

/// Load a CSV with a header row. The sensitive column is removed from the
/// features; categorical columns are one-hot encoded (levels sorted, column
/// named "col=level"); numeric columns are z-scored over the whole file
/// (split() re-fits the statistics on the training pool). Rows missing the
/// label or sensitive value are dropped; missing numeric cells are imputed
/// with the column mean.
inline Dataset load_csv(const std::string& path,
                        const std::string& sensitive_column,
                        const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + path + "' is empty");
  const auto header = detail::split_line(line);
  if (header.empty()) throw InputError("'" + path + "': empty header row");

  std::vector<detail::RawColumn> cols(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) cols[j].name = header[j];

  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_line(line);
    if (cells.size() != header.size())
      throw InputError(path + ": row " + std::to_string(row_no) + " has " +
                       std::to_string(cells.size()) + " fields, expected " +
                       std::to_string(header.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      cols[j].cells.push_back(cells[j]);
      if (!cells[j].empty()) {
        if (detail::parse_double(cells[j]))
          cols[j].any_numeric = true;
        else
          cols[j].all_numeric = false;
      }
    }
  }
  const std::size_t n_raw = cols.empty() ? 0 : cols[0].cells.size();
  if (n_raw == 0) throw InputError("'" + path + "' has no data rows");

  auto find_col = [&](const std::string& name) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j].name == name) return j;
    throw InputError(path + ": no column named '" + name + "'");
  };
  const std::size_t sens_j = find_col(sensitive_column);
  const std::size_t label_j = find_col(label_column);
  if (sens_j == label_j)
    throw InputError("sensitive and label column are the same");

  // A column mixing numeric and non-numeric cells is corrupt input.
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j == sens_j || j == label_j) continue;
    if (cols[j].any_numeric && !cols[j].all_numeric) {
      for (std::size_t i = 0; i < n_raw; ++i) {
        const auto& cell = cols[j].cells[i];
        if (!cell.empty() && !detail::parse_double(cell))
          throw InputError(path + ": unparseable cell '" + cell +
                           "' at row " + std::to_string(i + 2) + ", column '" +
                           cols[j].name + "'");
      }
    }
  }

  // Rows with a missing label or sensitive value are dropped.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n_raw; ++i)
    if (!cols[sens_j].cells[i].empty() && !cols[label_j].cells[i].empty())
      keep.push_back(i);
  if (keep.empty()) throw InputError("'" + path + "': no usable rows");

  auto distinct_levels = [&](std::size_t j) {
    std::vector<std::string> lv;
    for (auto i : keep) {
      const auto& c = cols[j].cells[i];
      if (std::find(lv.begin(), lv.end(), c) == lv.end()) lv.push_back(c);
    }
    std::sort(lv.begin(), lv.end());
    return lv;
  };

  const auto sens_levels = distinct_levels(sens_j);
  if (sens_levels.size() == 1)
    throw InputError("sensitive column has one value");
  const auto label_levels = distinct_levels(label_j);
  if (label_levels.size() == 1) throw InputError("label column has one value");

  Dataset d;
  const Index n = static_cast<Index>(keep.size());
  d.sensitive.resize(n);
  d.labels.emplace(n);
  for (Index i = 0; i < n; ++i) {
    d.sensitive(i) = detail::binary_code(cols[sens_j].cells[keep[i]],
                                         sens_levels, sensitive_column,
                                         keep[i] + 2);
    (*d.labels)(i) = detail::binary_code(cols[label_j].cells[keep[i]],
                                         label_levels, label_column,
                                         keep[i] + 2);
  }

  // Assemble feature columns: numeric (mean-imputed), or one-hot.
  std::vector<Vector> feat_cols;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j == sens_j || j == label_j) continue;
    if (cols[j].all_numeric) {
      Vector v(n);
      double sum = 0.0;
      Index n_present = 0;
      for (Index i = 0; i < n; ++i) {
        const auto parsed = detail::parse_double(cols[j].cells[keep[i]]);
        v(i) = parsed ? *parsed : std::numeric_limits<double>::quiet_NaN();
        if (parsed) {
          sum += *parsed;
          ++n_present;
        }
      }
      if (n_present == 0)
        throw InputError("column '" + cols[j].name + "' has no values");
      const double mean = sum / static_cast<double>(n_present);
      bool binary = true;
      for (Index i = 0; i < n; ++i) {
        if (std::isnan(v(i))) v(i) = mean;
        if (v(i) != 0.0 && v(i) != 1.0) binary = false;
      }
      feat_cols.push_back(std::move(v));
      d.feature_names.push_back(cols[j].name);
      d.feature_kinds.push_back(binary ? ColumnKind::Binary
                                       : ColumnKind::Numeric);
    } else {
      std::vector<std::string> lv;
      for (auto i : keep) {
        auto c = cols[j].cells[i];
        if (c.empty()) c = "(missing)";
        if (std::find(lv.begin(), lv.end(), c) == lv.end()) lv.push_back(c);
      }
      std::sort(lv.begin(), lv.end());
      for (const auto& level : lv) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) {
          auto c = cols[j].cells[keep[i]];
          if (c.empty()) c = "(missing)";
          v(i) = (c == level) ? 1.0 : 0.0;
        }
        feat_cols.push_back(std::move(v));
        d.feature_names.push_back(cols[j].name + "=" + level);
        d.feature_kinds.push_back(ColumnKind::Binary);
      }
    }
  }

  d.features.resize(n, static_cast<Index>(feat_cols.size()));
  for (Index j = 0; j < d.features.cols(); ++j)
    d.features.col(j) = feat_cols[j];

  detail::standardize_columns({&d}, {&d});
  d.validate();
  return d;
}

/// Random disjoint partition into labeled/unlabeled/test. Numeric columns
/// are re-standardized with statistics fit on labeled+unlabeled only; the
/// test part is transformed with the same statistics. Deterministic in
/// spec.seed.
inline Split split(const Dataset& d, const SplitSpec& spec) {
  d.validate();
  if (!d.labels) throw InvalidArgument("split: dataset has no labels");
  const Index k = d.rows();
  if (spec.n_labeled + spec.n_test > k)
    throw InvalidArgument("split: n_labeled + n_test exceeds row count");
  const Index n_rest = k - spec.n_labeled - spec.n_test;
  Index n_unlabeled = n_rest;
  if (spec.max_unlabeled) n_unlabeled = std::min(n_rest, *spec.max_unlabeled);
  if (spec.n_labeled <= 0 || spec.n_test <= 0)
    throw InvalidArgument("split: labeled and test parts must be non-empty");
  if (n_unlabeled <= 0 && !spec.max_unlabeled)
    throw InvalidArgument("split: unlabeled part is empty");

  std::vector<Index> idx(k);
  for (Index i = 0; i < k; ++i) idx[i] = i;
  Rng rng = make_rng(spec.seed);
  shuffle(idx, rng);

  const std::vector<Index> lab(idx.begin(), idx.begin() + spec.n_labeled);
  const std::vector<Index> tst(idx.begin() + spec.n_labeled,
                               idx.begin() + spec.n_labeled + spec.n_test);
  const std::vector<Index> unl(
      idx.begin() + spec.n_labeled + spec.n_test,
      idx.begin() + spec.n_labeled + spec.n_test + n_unlabeled);

  Split s;
  s.labeled = d.take(lab);
  s.unlabeled = d.take(unl);
  s.test = d.take(tst);
  detail::standardize_columns({&s.labeled, &s.unlabeled, &s.test},
                              {&s.labeled, &s.unlabeled});
  return s;
}

}  // namespace fairssl

#endif  // FAIRSSL_DATASET_HPP
