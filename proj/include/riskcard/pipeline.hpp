#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskcard/config.hpp"
#include "riskcard/metrics.hpp"
#include "riskcard/pool.hpp"
#include "riskcard/raw_data.hpp"
#include "riskcard/rounding.hpp"
#include "riskcard/scorecard.hpp"

namespace riskcard {

inline constexpr int kPoolVersion = 1;

struct CardResult {
  Scorecard card;
  double continuous_loss = 0.0;  // loss of the pool entry it was rounded from
  SparsityReport sparsity;
  EvaluationReport train;
  std::optional<EvaluationReport> validation;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  EvaluationReport best_card;  // first card of the fold's pool on the held-out rows
};

struct TrainResult {
  RunConfig config;
  std::string data_fingerprint;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  BinarizationMap map;
  ConstraintSet constraints;
  ContinuousSolution base;
  SolutionPool pool;
  std::vector<CardResult> cards;
  std::vector<FoldResult> folds;
  std::vector<std::string> warnings;
};

// Holds out `validation_fraction` of the rows (seeded permutation), then
// binarizes, fits, builds the pool, rounds it, and wraps every rounded entry
// as a card named after gamma. Runs `cv_folds` extra fits when requested.
// Throws ConfigError before any optimization when the config is infeasible
// for the data.
TrainResult train(const RawDataset& data, const RunConfig& config);

// Pool file contents. Independent of the thread count and of timing.
nlohmann::json pool_document(const TrainResult& result);

// Card `index` of a pool document.
Scorecard card_from_pool(const nlohmann::json& doc, std::size_t index);

// Plain-text table: card, loss, group sparsity, overall sparsity, train AUROC.
std::string summary_table(const TrainResult& result);

}  // namespace riskcard
