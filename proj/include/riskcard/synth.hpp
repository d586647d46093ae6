#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskcard/raw_data.hpp"
#include "riskcard/scorecard.hpp"

namespace riskcard {

// Sampling distribution of one synthetic raw variable.
//   normal:      a = mean, b = standard deviation
//   uniform:     values in [a, b)
//   bernoulli:   value 1 with probability a, else 0
//   categorical: `categories` drawn with `weights`
struct SynthDistribution {
  enum class Type { normal, uniform, bernoulli, categorical };
  Type type = Type::normal;
  double a = 0.0;
  double b = 1.0;
  std::vector<std::string> categories;
  std::vector<double> weights;
};

// A variable of the ground-truth card. Numeric variables score through
// threshold splits (raw <= threshold earns `points`); categorical variables
// give each category its points directly.
struct SynthVariable {
  std::string name;
  SynthDistribution distribution;
  double missing_rate = 0.0;
  int decimals = -1;  // round sampled numbers to this many decimals; -1 keeps them
  std::vector<std::pair<double, int>> threshold_points;
  std::vector<int> category_points;
  int missing_points = 0;
};

struct SynthSpec {
  std::string name = "synthetic";
  int intercept = 0;
  double multiplier = 1.0;
  std::vector<SynthVariable> variables;
  // Extra standard-normal variables that do not affect the risk.
  std::size_t noise_variables = 0;
  std::string label = "y";
};

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SynthSpec& spec);

// Ten-variable ground truth with integer points: seven numeric variables
// (some with missing values), one binary, and two categorical.
SynthSpec reference_synth_spec(std::size_t noise_variables = 0);

// Ground-truth scorecard encoded by the spec.
Scorecard truth_card(const SynthSpec& spec);

struct SynthResult {
  RawDataset data;  // labels in {0, 1} under spec.label
  Scorecard truth;
  std::vector<double> true_risk;
};

// Samples n records variable by variable, then one Bernoulli label per row
// from the true risk. Everything is drawn from one Rng seeded with `seed`.
SynthResult synthesize(const SynthSpec& spec, std::size_t n, std::uint64_t seed);

// CSV form of a synthetic (or any labelled) dataset; the label column is last.
void write_dataset_csv(std::ostream& out, const RawDataset& data, const std::string& label);

}  // namespace riskcard
