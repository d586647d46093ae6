#include "riskcard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskcard/binarize.hpp"
#include "riskcard/error.hpp"

namespace riskcard {

namespace {

void check_sizes(std::span<const int> labels, std::span<const double> values, const char* metric) {
  if (labels.size() != values.size()) {
    throw DataError(std::string(metric) + ": " + std::to_string(labels.size()) + " labels but " +
                    std::to_string(values.size()) + " predictions");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError(std::string(metric) + ": labels must be 0 or 1");
  }
}

void check_probabilities(std::span<const double> probs, const char* metric) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError(std::string(metric) + ": probability " + std::to_string(p) +
                      " outside [0, 1]");
    }
  }
}

// Indices sorted by (value, label) so that every later sum runs in an order
// that depends on the multiset of samples only.
std::vector<std::size_t> sorted_order(std::span<const int> labels, std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return labels[a] < labels[b];
  });
  return idx;
}

}  // namespace

double auroc(std::span<const int> labels, std::span<const double> scores) {
  check_sizes(labels, scores, "auroc");
  const auto idx = sorted_order(labels, scores);
  const std::size_t n = idx.size();
  double positives = 0.0, rank_sum = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[idx[end]] == scores[idx[start]]) ++end;
    // Ranks start .. end-1 (1-based: start+1 .. end) share their average.
    const double avg_rank = 0.5 * (static_cast<double>(start + 1) + static_cast<double>(end));
    for (std::size_t k = start; k < end; ++k) {
      if (labels[idx[k]] == 1) {
        positives += 1.0;
        rank_sum += avg_rank;
      }
    }
    start = end;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw UndefinedMetric("auroc is undefined unless both classes are present");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double auprc(std::span<const int> labels, std::span<const double> scores) {
  check_sizes(labels, scores, "auprc");
  const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0.0) throw UndefinedMetric("auprc is undefined without positive labels");
  auto idx = sorted_order(labels, scores);
  std::reverse(idx.begin(), idx.end());
  double tp = 0.0, fp = 0.0, prev_recall = 0.0, ap = 0.0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t end = start;
    while (end < idx.size() && scores[idx[end]] == scores[idx[start]]) {
      (labels[idx[end]] == 1 ? tp : fp) += 1.0;
      ++end;
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    start = end;
  }
  return ap;
}

double brier(std::span<const int> labels, std::span<const double> probs) {
  check_sizes(labels, probs, "brier");
  check_probabilities(probs, "brier");
  if (probs.empty()) throw UndefinedMetric("brier score of an empty sample");
  const auto idx = sorted_order(labels, probs);
  double sum = 0.0;
  for (std::size_t i : idx) {
    const double d = probs[i] - labels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(probs.size());
}

HosmerLemeshow hl_chi2(std::span<const int> labels, std::span<const double> probs, std::size_t bins) {
  check_sizes(labels, probs, "hl_chi2");
  check_probabilities(probs, "hl_chi2");
  if (bins < 1) throw ConfigError("hl_chi2 needs at least one group");
  if (probs.size() < bins) {
    throw UndefinedMetric("hl_chi2 needs at least as many samples as groups");
  }
  const auto idx = sorted_order(labels, probs);
  std::vector<double> sorted(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) sorted[k] = probs[idx[k]];
  std::vector<double> cuts;
  for (std::size_t k = 1; k < bins; ++k) {
    cuts.push_back(nearest_rank_quantile(sorted, static_cast<double>(k) / static_cast<double>(bins)));
  }

  constexpr double kVarianceFloor = 1e-12;
  HosmerLemeshow out;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < bins; ++g) {
    double observed = 0.0, expected = 0.0, count = 0.0;
    while (pos < idx.size() && (g + 1 == bins || sorted[pos] <= cuts[g])) {
      observed += labels[idx[pos]];
      expected += sorted[pos];
      count += 1.0;
      ++pos;
    }
    if (count == 0.0) continue;
    ++out.groups;
    double variance = expected * (1.0 - expected / count);
    if (variance < kVarianceFloor) {
      variance = kVarianceFloor;
      ++out.clamped_groups;
    }
    const double diff = observed - expected;
    out.chi2 += diff * diff / variance;
  }
  return out;
}

double smr(std::span<const int> labels, std::span<const double> probs) {
  check_sizes(labels, probs, "smr");
  check_probabilities(probs, "smr");
  const auto idx = sorted_order(labels, probs);
  double observed = 0.0, expected = 0.0;
  for (std::size_t i : idx) {
    observed += labels[i];
    expected += probs[i];
  }
  if (expected == 0.0) throw UndefinedMetric("smr is undefined when predicted risks sum to zero");
  return observed / expected;
}

double IsotonicMap::operator()(double p) const {
  if (level.empty()) return p;
  auto it = std::upper_bound(lower.begin(), lower.end(), p);
  if (it == lower.begin()) return level.front();
  return level[static_cast<std::size_t>(it - lower.begin()) - 1];
}

IsotonicMap fit_isotonic(std::span<const double> probs, std::span<const int> labels) {
  check_sizes(labels, probs, "fit_isotonic");
  if (probs.empty()) throw DataError("fit_isotonic needs at least one sample");
  const auto idx = sorted_order(labels, probs);

  struct Block {
    double lower, upper, sum, weight;
    double level() const { return sum / weight; }
  };
  std::vector<Block> stack;
  for (std::size_t k = 0; k < idx.size();) {
    // Equal inputs must share one output, so they start as one block.
    Block b{probs[idx[k]], probs[idx[k]], 0.0, 0.0};
    while (k < idx.size() && probs[idx[k]] == b.lower) {
      b.sum += labels[idx[k]];
      b.weight += 1.0;
      ++k;
    }
    stack.push_back(b);
    while (stack.size() > 1 && stack[stack.size() - 2].level() >= stack.back().level()) {
      Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      prev.upper = top.upper;
      prev.sum += top.sum;
      prev.weight += top.weight;
    }
  }
  IsotonicMap map;
  for (const Block& b : stack) {
    map.lower.push_back(b.lower);
    map.upper.push_back(b.upper);
    map.level.push_back(b.level());
  }
  return map;
}

std::vector<double> apply_isotonic(const IsotonicMap& map, std::span<const double> probs) {
  std::vector<double> out(probs.size());
  std::transform(probs.begin(), probs.end(), out.begin(), [&](double p) { return map(p); });
  return out;
}

EvaluationReport evaluate(std::span<const int> labels, std::span<const double> probs,
                          std::size_t hl_bins) {
  check_sizes(labels, probs, "evaluate");
  check_probabilities(probs, "evaluate");
  EvaluationReport r;
  r.n = labels.size();
  r.n_positive = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const UndefinedMetric&) {
      return std::nullopt;
    }
  };
  r.auroc = attempt([&] { return auroc(labels, probs); });
  r.auprc = attempt([&] { return auprc(labels, probs); });
  r.brier = attempt([&] { return brier(labels, probs); });
  r.smr = attempt([&] { return smr(labels, probs); });
  try {
    const auto hl = hl_chi2(labels, probs, hl_bins);
    r.hl_chi2 = hl.chi2;
    r.hl_clamped_groups = hl.clamped_groups;
  } catch (const UndefinedMetric&) {
  }
  return r;
}

}  // namespace riskcard
