#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "riskcard/binarize.hpp"
#include "riskcard/constraints.hpp"
#include "riskcard/metrics.hpp"
#include "riskcard/rounding.hpp"

namespace riskcard {

inline constexpr int kScorecardVersion = 1;

struct CardMetadata {
  std::string training_fingerprint;
  std::optional<ConstraintSet> constraints;
  // Total scores tabulated in the rendered footer.
  std::vector<int> score_table;

  bool operator==(const CardMetadata&) const = default;
};

// A deployable integer scorecard with the binarization it was trained on.
struct Scorecard {
  std::string name;
  IntegerRiskScore score;
  BinarizationMap map;
  std::optional<IsotonicMap> calibration;
  CardMetadata metadata;

  bool operator==(const Scorecard&) const = default;
};

// "GFR-<gamma>".
std::string card_name(std::size_t gamma);

// Wraps a rounded solution; the footer table uses the minimum, quartiles, and
// maximum of the total scores on `training`.
Scorecard make_scorecard(const IntegerRiskScore& score, const BinarizedDataset& training,
                         const ConstraintSet& constraints, std::string name);

struct SparsityReport {
  std::size_t group_sparsity = 0;    // variables used
  std::size_t overall_sparsity = 0;  // nonzero coefficients + intercept + multiplier
};

SparsityReport sparsity(const Scorecard& card);

// One bin of a variable's component function. Threshold bins cover
// (lower, upper]; category bins list their tokens, and the last category bin
// also takes unseen tokens.
struct ScoreBin {
  std::optional<double> lower;
  std::optional<double> upper;
  std::vector<std::string> categories;
  bool other_categories = false;
  std::string condition;
  int points = 0;

  bool operator==(const ScoreBin&) const = default;
};

struct ComponentFunction {
  std::size_t variable = 0;
  std::string name;
  VariableKind kind = VariableKind::continuous;
  std::vector<ScoreBin> bins;
  std::optional<int> missing_points;  // set when the missing indicator is scored
};

// Component functions of every variable with a nonzero coefficient, in
// variable order. Bins are cut at the variable's nonzero splits only.
std::vector<ComponentFunction> component_functions(const Scorecard& card);

// Integer total w.x + w0 for the firing splits of one record.
int total_score(const Scorecard& card, std::span<const std::size_t> firing_splits);

// sigma(total / m), then the isotonic calibration when attached.
double risk_from_score(const Scorecard& card, int total);

// Throws SchemaMismatch naming the first variable of the card that the
// record lacks.
double predict_risk(const Scorecard& card, const RawRecord& record);
std::vector<double> predict_risk(const Scorecard& card, const RawDataset& data);
std::vector<int> total_scores(const Scorecard& card, const RawDataset& data);

// Plain-text scorecard: one block per used variable, then intercept,
// multiplier, and a score-to-risk table.
std::string render_scorecard(const Scorecard& card);

nlohmann::json to_json(const Scorecard& card);
// Throws ParseError with a JSON-pointer location.
Scorecard scorecard_from_json(const nlohmann::json& doc);

std::string serialize(const Scorecard& card);
Scorecard deserialize(std::string_view document);

nlohmann::json to_json(const BinarizationMap& map);
BinarizationMap binarization_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ConstraintSet& constraints);
ConstraintSet constraints_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EvaluationReport& report);
nlohmann::json to_json(const SparsityReport& report);

}  // namespace riskcard
