#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "riskcard/binarize.hpp"
#include "riskcard/constraints.hpp"
#include "riskcard/solver.hpp"

namespace riskcard {

// Every hyperparameter of a training run.
//
// File syntax (INI):
//
//   [train]
//   lambda = 40            ; required
//   gamma = 10             ; required
//   seed = 7               ; required
//   label = y
//   bins_per_variable = 20
//   beam_width = 10
//   epsilon_u = 0.3
//   swap_candidates = 10
//   pool_size = 10
//   multipliers = 25
//   swap_passes = 1
//   screening_sweeps = 2
//   cv_folds = 0
//   validation_fraction = 0
//   tol = 1e-8
//   max_iter = 100
//   threads = 1
//
//   [box]
//   lower = -5
//   upper = 5
//   intercept_lower = -100
//   intercept_upper = 100
//
//   [variable age]
//   lower = 0
//   upper = 3
//   monotone = nonneg      ; free | nonneg | nonpos
//   kind = continuous      ; continuous | categorical
struct RunConfig {
  std::optional<std::size_t> lambda;
  std::optional<std::size_t> gamma;
  std::optional<std::uint64_t> seed;
  std::string label = "y";
  std::size_t bins_per_variable = kDefaultBinsPerVariable;
  std::size_t beam_width = 10;
  double epsilon_u = 0.3;
  std::size_t swap_candidates = 10;
  std::size_t pool_size = 10;
  std::size_t multipliers = 25;
  std::size_t swap_passes = 1;
  int screening_sweeps = 2;
  std::size_t cv_folds = 0;
  double validation_fraction = 0.0;
  double tol = 1e-8;
  int max_iter = 100;
  unsigned threads = 1;
  Interval box = kDefaultBox;
  Interval intercept_box = kDefaultInterceptBox;
  std::map<std::string, VariableConstraint> variables;
  std::map<std::string, VariableKind> schema;
};

// Reads an INI file into `config`, overwriting only the keys it sets.
void load_config_file(const std::string& path, RunConfig& config);
void load_config(std::istream& in, RunConfig& config);

// Reads a schema sidecar: one "name = continuous|categorical" line per variable.
void load_schema_file(const std::string& path, RunConfig& config);

// Throws ConfigError when a value is outside its documented range or a
// required key is unset. Data-dependent checks happen in train().
void check(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

DescentOptions descent_options(const RunConfig& config);

}  // namespace riskcard
