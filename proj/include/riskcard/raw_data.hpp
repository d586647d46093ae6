#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace riskcard {

// One raw cell: missing, a number, or a category token.
using RawValue = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const RawValue& v) {
  return std::holds_alternative<std::monostate>(v);
}

// Token form of a value; numbers use the shortest round-trip decimal form.
std::string to_token(const RawValue& v);

// n records of q raw variables, stored column-major, plus optional labels.
//
// Labels are mapped to {-1, +1}; the larger of the two distinct raw label
// tokens (numeric comparison when both parse as numbers) becomes +1.
class RawDataset {
 public:
  RawDataset() = default;
  RawDataset(std::vector<std::string> names,
             std::vector<std::vector<RawValue>> columns);

  std::size_t num_rows() const noexcept { return rows_; }
  std::size_t num_variables() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<RawValue>& column(std::size_t v) const { return columns_.at(v); }
  const RawValue& at(std::size_t row, std::size_t v) const {
    return columns_.at(v).at(row);
  }
  std::optional<std::size_t> find(const std::string& name) const;

  bool has_labels() const noexcept { return !labels_.empty(); }
  // Labels in {-1, +1}.
  const std::vector<int>& labels() const noexcept { return labels_; }
  // Labels in {0, 1}.
  std::vector<int> labels01() const;
  const std::string& positive_label() const noexcept { return positive_label_; }

  // Sets labels from raw tokens; throws DataError unless exactly two distinct
  // values occur.
  void set_labels(std::span<const std::string> tokens);
  // Sets labels from {0, 1} or {-1, +1} integers.
  void set_labels(std::span<const int> labels);

  // Rows selected in the given order.
  RawDataset subset(std::span<const std::size_t> rows) const;

  // FNV-1a over names, cell contents, and labels, as 16 hex digits.
  std::string fingerprint() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<RawValue>> columns_;
  std::vector<int> labels_;
  std::string positive_label_;
  std::size_t rows_ = 0;
};

// A single record addressed by variable name.
struct RawRecord {
  std::vector<std::string> names;
  std::vector<RawValue> values;
};

}  // namespace riskcard
