#include "riskcard/binarize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "riskcard/error.hpp"

namespace riskcard {

namespace {

std::string format_number(double v) { return to_token(RawValue{v}); }

std::size_t rank_index(std::size_t n, double alpha) {
  const double t = alpha * static_cast<double>(n);
  const double r = std::round(t);
  const double c = std::abs(t - r) <= 1e-9 * std::max(1.0, t) ? r : std::ceil(t);
  if (c <= 1.0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(c) - 1);
}

}  // namespace

std::string to_string(VariableKind kind) {
  return kind == VariableKind::continuous ? "continuous" : "categorical";
}

VariableKind parse_variable_kind(const std::string& text) {
  if (text == "continuous") return VariableKind::continuous;
  if (text == "categorical") return VariableKind::categorical;
  throw ConfigError("unknown variable kind '" + text + "' (expected continuous or categorical)");
}

void Diagnostics::warn(std::string message) { warnings.push_back(std::move(message)); }

std::vector<std::size_t> BinarizationMap::group_of() const {
  std::vector<std::size_t> out(splits.size(), 0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (std::size_t j : groups[k]) out.at(j) = k;
  }
  return out;
}

std::string BinarizationMap::describe_split(std::size_t j) const {
  const SplitSpec& s = splits.at(j);
  const VariableEncoding& v = variables.at(s.variable);
  switch (s.kind) {
    case SplitKind::threshold:
      return v.name + " <= " + format_number(s.threshold);
    case SplitKind::category: {
      std::string out = v.name + " in {";
      for (std::size_t k = 0; k < v.categories.size(); ++k) {
        if (k) out += ", ";
        out += v.categories[k];
        if (v.categories[k] == s.category) break;
      }
      return out + "}";
    }
    case SplitKind::missing:
      return v.name + " is missing";
  }
  return {};
}

void BinarizationMap::rebuild_splits() {
  splits.clear();
  groups.assign(variables.size(), {});
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const VariableEncoding& enc = variables[v];
    if (enc.kind == VariableKind::continuous) {
      for (double t : enc.thresholds) {
        groups[v].push_back(splits.size());
        splits.push_back({v, SplitKind::threshold, t, {}});
      }
    } else {
      for (std::size_t k = 0; k + 1 < enc.categories.size(); ++k) {
        groups[v].push_back(splits.size());
        splits.push_back({v, SplitKind::category, 0.0, enc.categories[k]});
      }
    }
    if (enc.missing_indicator) {
      groups[v].push_back(splits.size());
      splits.push_back({v, SplitKind::missing, 0.0, {}});
    }
  }
}

BinarizedDataset::BinarizedDataset(std::size_t num_rows,
                                   std::vector<std::vector<std::uint32_t>> column_rows,
                                   std::vector<int> labels, BinarizationMap map)
    : rows_(num_rows),
      columns_(std::move(column_rows)),
      labels_(std::move(labels)),
      map_(std::move(map)) {
  if (rows_ == 0) throw DataError("binarized dataset needs at least one row");
  if (columns_.empty()) throw DataError("binarized dataset needs at least one split column");
  if (columns_.size() != map_.splits.size()) {
    throw DataError("column count " + std::to_string(columns_.size()) +
                    " does not match the binarization map (" +
                    std::to_string(map_.splits.size()) + " splits)");
  }
  if (!labels_.empty() && labels_.size() != rows_) {
    throw DataError("label count does not match row count");
  }
  y_.resize(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1 && labels_[i] != -1) throw DataError("labels must be in {-1, +1}");
    y_[i] = labels_[i];
  }
  for (const auto& col : columns_) {
    if (!col.empty() && col.back() >= rows_) throw DataError("row index out of range");
  }
  group_of_ = map_.group_of();
}

BinarizedDataset BinarizedDataset::from_dense(const std::vector<std::vector<int>>& matrix,
                                              std::vector<int> labels,
                                              std::span<const std::size_t> group_sizes) {
  const std::size_t n = matrix.size();
  const std::size_t p = n ? matrix.front().size() : 0;
  if (std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0}) != p) {
    throw DataError("group sizes do not sum to the column count");
  }
  BinarizationMap map;
  for (std::size_t k = 0; k < group_sizes.size(); ++k) {
    VariableEncoding enc;
    enc.name = "v" + std::to_string(k);
    for (std::size_t t = 0; t < group_sizes[k]; ++t) enc.thresholds.push_back(static_cast<double>(t + 1));
    map.variables.push_back(std::move(enc));
  }
  map.rebuild_splits();
  map.fitted_on = "dense";
  std::vector<std::vector<std::uint32_t>> cols(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != p) throw DataError("ragged dense matrix");
    for (std::size_t j = 0; j < p; ++j) {
      if (matrix[i][j] != 0) cols[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  for (int& y : labels) y = (y == 1) ? 1 : -1;
  return BinarizedDataset(n, std::move(cols), std::move(labels), std::move(map));
}

bool BinarizedDataset::at(std::size_t row, std::size_t j) const {
  const auto& col = columns_.at(j);
  return std::binary_search(col.begin(), col.end(), static_cast<std::uint32_t>(row));
}

std::vector<std::size_t> BinarizedDataset::zero_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].empty()) out.push_back(j);
  }
  return out;
}

BinarizedDataset BinarizedDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<std::uint32_t>> cols(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (at(rows[k], j)) cols[j].push_back(static_cast<std::uint32_t>(k));
    }
  }
  std::vector<int> labels;
  if (!labels_.empty()) {
    for (std::size_t r : rows) labels.push_back(labels_.at(r));
  }
  return BinarizedDataset(rows.size(), std::move(cols), std::move(labels), map_);
}

double nearest_rank_quantile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  return sorted[rank_index(sorted.size(), alpha)];
}

BinarizationMap fit_binarizer(const RawDataset& raw, std::size_t bins_per_variable,
                              const std::map<std::string, VariableKind>& schema_overrides,
                              Diagnostics* diagnostics) {
  if (bins_per_variable < 2) throw ConfigError("bins_per_variable must be at least 2");
  if (raw.num_rows() == 0 || raw.num_variables() == 0) {
    throw DataError("cannot fit a binarizer on an empty dataset");
  }
  for (const auto& [name, kind] : schema_overrides) {
    if (!raw.find(name)) throw ConfigError("schema override names unknown variable '" + name + "'");
  }
  auto warn = [&](std::string msg) {
    if (diagnostics) {
      diagnostics->warn(std::move(msg));
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  };

  BinarizationMap map;
  map.fitted_on = raw.fingerprint();
  for (std::size_t v = 0; v < raw.num_variables(); ++v) {
    const auto& column = raw.column(v);
    VariableEncoding enc;
    enc.name = raw.names()[v];
    bool all_numeric = true;
    std::size_t missing = 0;
    for (const auto& value : column) {
      if (is_missing(value)) {
        ++missing;
      } else if (!std::holds_alternative<double>(value)) {
        all_numeric = false;
      }
    }
    auto override_it = schema_overrides.find(enc.name);
    enc.kind = override_it != schema_overrides.end()
                   ? override_it->second
                   : (all_numeric ? VariableKind::continuous : VariableKind::categorical);
    enc.missing_indicator = missing > 0;

    if (enc.kind == VariableKind::continuous) {
      std::vector<double> values;
      values.reserve(column.size() - missing);
      for (const auto& value : column) {
        if (const auto* d = std::get_if<double>(&value)) {
          values.push_back(*d);
        } else if (!is_missing(value)) {
          throw DataError("variable '" + enc.name + "' is continuous but holds token '" +
                          std::get<std::string>(value) + "'");
        }
      }
      std::sort(values.begin(), values.end());
      if (!values.empty()) {
        const double max_value = values.back();
        for (std::size_t k = 1; k < bins_per_variable; ++k) {
          const double q = nearest_rank_quantile(
              values, static_cast<double>(k) / static_cast<double>(bins_per_variable));
          // A split at the maximum fires on every observed value.
          if (q >= max_value) break;
          if (enc.thresholds.empty() || q > enc.thresholds.back()) enc.thresholds.push_back(q);
        }
      }
    } else {
      std::vector<std::string> tokens;
      for (const auto& value : column) {
        if (!is_missing(value)) tokens.push_back(to_token(value));
      }
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
      enc.categories = std::move(tokens);
    }

    const bool no_values = missing == column.size();
    const bool has_value_splits = enc.kind == VariableKind::continuous
                                      ? !enc.thresholds.empty()
                                      : enc.categories.size() > 1;
    if (no_values) {
      warn("variable '" + enc.name + "' is missing on every row; only a missing indicator is kept");
    } else if (!has_value_splits && missing == 0) {
      warn("variable '" + enc.name + "' has a single unique value; no splits");
    }
    map.variables.push_back(std::move(enc));
  }
  map.rebuild_splits();
  return map;
}

namespace {

// Indices of the splits of `enc` that fire on `value`, relative to the first
// split of the variable.
template <typename Emit>
void firing_offsets(const VariableEncoding& enc, const RawValue& value, Emit&& emit,
                    Diagnostics* diagnostics) {
  const std::size_t value_splits = enc.kind == VariableKind::continuous
                                       ? enc.thresholds.size()
                                       : (enc.categories.empty() ? 0 : enc.categories.size() - 1);
  if (is_missing(value)) {
    if (enc.missing_indicator) emit(value_splits);
    return;
  }
  if (enc.kind == VariableKind::continuous) {
    const auto* x = std::get_if<double>(&value);
    if (!x) {
      throw DataError("variable '" + enc.name + "' is continuous but holds token '" +
                      std::get<std::string>(value) + "'");
    }
    auto first = std::lower_bound(enc.thresholds.begin(), enc.thresholds.end(), *x);
    for (auto k = static_cast<std::size_t>(first - enc.thresholds.begin()); k < value_splits; ++k) emit(k);
    return;
  }
  const std::string token = to_token(value);
  auto it = std::lower_bound(enc.categories.begin(), enc.categories.end(), token);
  if (it == enc.categories.end() || *it != token) {
    if (diagnostics) {
      diagnostics->warn("unknown category '" + token + "' for variable '" + enc.name + "'");
    } else {
      std::cerr << "warning: unknown category '" << token << "' for variable '" << enc.name << "'\n";
    }
    return;
  }
  for (auto k = static_cast<std::size_t>(it - enc.categories.begin()); k < value_splits; ++k) emit(k);
}

std::vector<std::size_t> first_split_of(const BinarizationMap& map) {
  std::vector<std::size_t> first(map.variables.size(), 0);
  for (std::size_t v = 0; v < map.groups.size(); ++v) {
    first[v] = map.groups[v].empty() ? 0 : map.groups[v].front();
  }
  return first;
}

}  // namespace

bool split_fires(const BinarizationMap& map, std::size_t j, const RawValue& value) {
  const SplitSpec& split = map.splits.at(j);
  const VariableEncoding& enc = map.variables.at(split.variable);
  const std::size_t offset = j - map.groups.at(split.variable).front();
  bool fires = false;
  Diagnostics sink;
  firing_offsets(enc, value, [&](std::size_t k) { fires = fires || k == offset; }, &sink);
  return fires;
}

BinarizedDataset apply_binarizer(const BinarizationMap& map, const RawDataset& raw,
                                 Diagnostics* diagnostics) {
  std::vector<std::size_t> source(map.variables.size());
  for (std::size_t v = 0; v < map.variables.size(); ++v) {
    auto idx = raw.find(map.variables[v].name);
    if (!idx) {
      throw SchemaMismatch(map.variables[v].name,
                           "input lacks variable '" + map.variables[v].name + "'");
    }
    source[v] = *idx;
  }
  const auto first = first_split_of(map);
  std::vector<std::vector<std::uint32_t>> cols(map.splits.size());
  for (std::size_t v = 0; v < map.variables.size(); ++v) {
    const auto& column = raw.column(source[v]);
    Diagnostics local;
    for (std::size_t i = 0; i < column.size(); ++i) {
      firing_offsets(map.variables[v], column[i],
                     [&](std::size_t k) { cols[first[v] + k].push_back(static_cast<std::uint32_t>(i)); },
                     &local);
    }
    if (!local.warnings.empty()) {
      std::string msg = local.warnings.front();
      if (local.warnings.size() > 1) {
        msg += " (and " + std::to_string(local.warnings.size() - 1) + " more unknown values)";
      }
      if (diagnostics) {
        diagnostics->warn(std::move(msg));
      } else {
        std::cerr << "warning: " << msg << '\n';
      }
    }
  }
  return BinarizedDataset(raw.num_rows(), std::move(cols), raw.labels(), map);
}

std::vector<std::size_t> binarize_record(const BinarizationMap& map, const RawRecord& record,
                                         Diagnostics* diagnostics) {
  if (record.names.size() != record.values.size()) {
    throw DataError("record has " + std::to_string(record.names.size()) + " names but " +
                    std::to_string(record.values.size()) + " values");
  }
  const auto first = first_split_of(map);
  std::vector<std::size_t> firing;
  for (std::size_t v = 0; v < map.variables.size(); ++v) {
    const auto& name = map.variables[v].name;
    auto it = std::find(record.names.begin(), record.names.end(), name);
    if (it == record.names.end()) {
      throw SchemaMismatch(name, "record lacks variable '" + name + "'");
    }
    const RawValue& value = record.values[static_cast<std::size_t>(it - record.names.begin())];
    firing_offsets(map.variables[v], value, [&](std::size_t k) { firing.push_back(first[v] + k); },
                   diagnostics);
  }
  return firing;
}

}  // namespace riskcard
