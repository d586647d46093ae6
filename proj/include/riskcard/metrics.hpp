#pragma once

#include <optional>
#include <span>
#include <vector>

namespace riskcard {

// Labels for every metric are in {0, 1}.

// Mann-Whitney AUROC; ties count one half. Throws UndefinedMetric on one class.
double auroc(std::span<const int> labels, std::span<const double> scores);

// Average precision: sum over distinct score thresholds of
// (recall step) * precision. Throws UndefinedMetric without positives.
double auprc(std::span<const int> labels, std::span<const double> scores);

// Mean squared error. Throws DataError for probabilities outside [0, 1].
double brier(std::span<const int> labels, std::span<const double> probs);

struct HosmerLemeshow {
  double chi2 = 0.0;
  std::size_t groups = 0;          // non-empty groups
  std::size_t clamped_groups = 0;  // groups whose variance term was clamped
};

// Hosmer-Lemeshow C statistic over `bins` groups cut at nearest-rank
// quantiles of the predicted probabilities; probabilities equal to a cut go
// to the lower group.
HosmerLemeshow hl_chi2(std::span<const int> labels, std::span<const double> probs,
                       std::size_t bins = 10);

// Observed events over expected events.
double smr(std::span<const int> labels, std::span<const double> probs);

// Nondecreasing step function fitted by pool-adjacent-violators. Block b
// covers inputs [lower[b], upper[b]] and maps them to level[b].
struct IsotonicMap {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> level;

  double operator()(double p) const;
  bool operator==(const IsotonicMap&) const = default;
};

IsotonicMap fit_isotonic(std::span<const double> probs, std::span<const int> labels);
std::vector<double> apply_isotonic(const IsotonicMap& map, std::span<const double> probs);

// All five metrics; those undefined for the input are left empty.
struct EvaluationReport {
  std::optional<double> auroc;
  std::optional<double> auprc;
  std::optional<double> brier;
  std::optional<double> hl_chi2;
  std::size_t hl_clamped_groups = 0;
  std::optional<double> smr;
  std::size_t n = 0;
  std::size_t n_positive = 0;
};

EvaluationReport evaluate(std::span<const int> labels, std::span<const double> probs,
                          std::size_t hl_bins = 10);

}  // namespace riskcard
