#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskcard/raw_data.hpp"

namespace riskcard {

enum class VariableKind { continuous, categorical };

std::string to_string(VariableKind kind);
VariableKind parse_variable_kind(const std::string& text);

enum class SplitKind { threshold, category, missing };

// One binary column. Threshold splits fire when raw <= threshold. Category
// splits fire when the token is known and sorts at or before `category`.
// Missing indicators fire on missing values only.
struct SplitSpec {
  std::size_t variable = 0;
  SplitKind kind = SplitKind::threshold;
  double threshold = 0.0;
  std::string category;

  bool operator==(const SplitSpec&) const = default;
};

// Encoding of one raw variable.
struct VariableEncoding {
  std::string name;
  VariableKind kind = VariableKind::continuous;
  std::vector<double> thresholds;       // strictly increasing
  std::vector<std::string> categories;  // sorted known tokens
  bool missing_indicator = false;

  bool operator==(const VariableEncoding&) const = default;
};

// Ordered splits, their per-variable groups, and the schema they were fitted on.
struct BinarizationMap {
  std::vector<VariableEncoding> variables;
  std::vector<SplitSpec> splits;
  std::vector<std::vector<std::size_t>> groups;  // one per variable
  std::string fitted_on;                         // dataset fingerprint

  std::size_t num_splits() const noexcept { return splits.size(); }
  std::size_t num_groups() const noexcept { return groups.size(); }
  // Group index of each split.
  std::vector<std::size_t> group_of() const;
  std::string describe_split(std::size_t j) const;

  // Rebuilds `splits` and `groups` from `variables`.
  void rebuild_splits();

  bool operator==(const BinarizationMap&) const = default;
};

// Collects warnings instead of printing them.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message);
};

// Immutable n x p binary design matrix with labels in {-1, +1}.
//
// Stored as sorted row lists per column; column j's rows are exactly the
// records on which split j fires.
class BinarizedDataset {
 public:
  BinarizedDataset(std::size_t num_rows,
                   std::vector<std::vector<std::uint32_t>> column_rows,
                   std::vector<int> labels, BinarizationMap map);

  // Test and synthetic helper: dense 0/1 matrix (rows of length p) with groups
  // given as consecutive block sizes. The generated map uses placeholder
  // threshold splits.
  static BinarizedDataset from_dense(
      const std::vector<std::vector<int>>& matrix, std::vector<int> labels,
      std::span<const std::size_t> group_sizes);

  std::size_t num_rows() const noexcept { return rows_; }
  std::size_t num_columns() const noexcept { return columns_.size(); }
  std::span<const std::uint32_t> column(std::size_t j) const {
    return columns_.at(j);
  }
  bool at(std::size_t row, std::size_t j) const;
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<double>& signed_labels() const noexcept { return y_; }
  const BinarizationMap& map() const noexcept { return map_; }
  const std::vector<std::size_t>& group_of() const noexcept { return group_of_; }
  // Columns that never fire on this data.
  std::vector<std::size_t> zero_columns() const;
  BinarizedDataset subset(std::span<const std::size_t> rows) const;

 private:
  std::size_t rows_;
  std::vector<std::vector<std::uint32_t>> columns_;
  std::vector<int> labels_;
  std::vector<double> y_;
  BinarizationMap map_;
  std::vector<std::size_t> group_of_;
};

inline constexpr std::size_t kDefaultBinsPerVariable = 20;

// Quantile value at level alpha: element ceil(alpha * n) - 1 of the sorted
// sample (nearest rank), clamped to the sample.
double nearest_rank_quantile(std::span<const double> sorted, double alpha);

// Learns split thresholds, category splits, and missing indicators.
BinarizationMap fit_binarizer(
    const RawDataset& raw, std::size_t bins_per_variable = kDefaultBinsPerVariable,
    const std::map<std::string, VariableKind>& schema_overrides = {},
    Diagnostics* diagnostics = nullptr);

// Evaluates every split of `map` on `raw`. Variables are matched by name;
// extra columns in `raw` are ignored.
BinarizedDataset apply_binarizer(const BinarizationMap& map, const RawDataset& raw,
                                 Diagnostics* diagnostics = nullptr);

// Binarized row of one record, as the list of firing split indices.
std::vector<std::size_t> binarize_record(const BinarizationMap& map,
                                         const RawRecord& record,
                                         Diagnostics* diagnostics = nullptr);

// Whether split j fires on a raw value of its variable.
bool split_fires(const BinarizationMap& map, std::size_t j, const RawValue& value);

}  // namespace riskcard
