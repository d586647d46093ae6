#include "riskcard/raw_data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <set>

#include "riskcard/error.hpp"

namespace riskcard {

namespace {

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  }
  void str(const std::string& s) {
    const std::uint64_t len = s.size();
    bytes(&len, sizeof len);
    bytes(s.data(), s.size());
  }
  void tag(unsigned char t) { bytes(&t, 1); }
};

}  // namespace

std::string to_token(const RawValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, ptr);
  }
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return {};
}

RawDataset::RawDataset(std::vector<std::string> names,
                       std::vector<std::vector<RawValue>> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size()) {
    throw DataError("raw dataset: " + std::to_string(names_.size()) + " names but " +
                    std::to_string(columns_.size()) + " columns");
  }
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    if (columns_[v].size() != rows_) {
      throw DataError("raw dataset: variable '" + names_[v] + "' has " +
                      std::to_string(columns_[v].size()) + " values, expected " +
                      std::to_string(rows_));
    }
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw DataError("duplicate variable name '" + name + "'");
  }
}

std::optional<std::size_t> RawDataset::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<int> RawDataset::labels01() const {
  std::vector<int> out(labels_.size());
  std::transform(labels_.begin(), labels_.end(), out.begin(),
                 [](int y) { return y > 0 ? 1 : 0; });
  return out;
}

void RawDataset::set_labels(std::span<const std::string> tokens) {
  if (tokens.size() != rows_ && !(columns_.empty() && rows_ == 0)) {
    throw DataError("label count " + std::to_string(tokens.size()) +
                    " does not match row count " + std::to_string(rows_));
  }
  std::set<std::string> distinct(tokens.begin(), tokens.end());
  if (distinct.size() != 2) {
    throw DataError("labels must take exactly two distinct values, found " +
                    std::to_string(distinct.size()));
  }
  const std::string lo = *distinct.begin();
  const std::string hi = *distinct.rbegin();
  double a = 0.0, b = 0.0;
  std::string positive = hi;
  if (parse_number(lo, a) && parse_number(hi, b)) positive = a > b ? lo : hi;
  labels_.resize(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) labels_[i] = tokens[i] == positive ? 1 : -1;
  positive_label_ = positive;
  if (columns_.empty()) rows_ = tokens.size();
}

void RawDataset::set_labels(std::span<const int> labels) {
  if (labels.size() != rows_ && !(columns_.empty() && rows_ == 0)) {
    throw DataError("label count " + std::to_string(labels.size()) +
                    " does not match row count " + std::to_string(rows_));
  }
  labels_.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1 && labels[i] != -1) {
      throw DataError("integer labels must be in {0, 1} or {-1, +1}");
    }
    labels_[i] = labels[i] == 1 ? 1 : -1;
  }
  positive_label_ = "1";
  if (columns_.empty()) rows_ = labels.size();
}

RawDataset RawDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<RawValue>> cols(columns_.size());
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    cols[v].reserve(rows.size());
    for (std::size_t r : rows) cols[v].push_back(columns_[v].at(r));
  }
  RawDataset out(names_, std::move(cols));
  if (has_labels()) {
    out.labels_.reserve(rows.size());
    for (std::size_t r : rows) out.labels_.push_back(labels_.at(r));
    out.positive_label_ = positive_label_;
  }
  out.rows_ = rows.size();
  return out;
}

std::string RawDataset::fingerprint() const {
  Fnv1a f;
  for (const auto& name : names_) f.str(name);
  for (const auto& col : columns_) {
    for (const auto& v : col) {
      if (const auto* d = std::get_if<double>(&v)) {
        f.tag(1);
        const auto bits = std::bit_cast<std::uint64_t>(*d);
        f.bytes(&bits, sizeof bits);
      } else if (const auto* s = std::get_if<std::string>(&v)) {
        f.tag(2);
        f.str(*s);
      } else {
        f.tag(0);
      }
    }
  }
  for (int y : labels_) f.tag(static_cast<unsigned char>(y > 0 ? 1 : 0));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

}  // namespace riskcard
