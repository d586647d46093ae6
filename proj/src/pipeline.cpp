#include "riskcard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "riskcard/error.hpp"
#include "riskcard/random.hpp"

namespace riskcard {

using nlohmann::json;

namespace {

struct Fitted {
  BinarizationMap map;
  ConstraintSet constraints;
  ContinuousSolution base;
  SolutionPool pool;
  std::vector<Scorecard> cards;
};

Fitted fit(const RawDataset& data, const RunConfig& config, std::vector<std::string>* warnings) {
  Diagnostics diag;
  Fitted f;
  f.map = fit_binarizer(data, config.bins_per_variable, config.schema, &diag);
  for (const auto& [name, _] : config.variables) {
    if (!data.find(name)) throw ConfigError("constraint names unknown variable '" + name + "'");
  }
  if (f.map.num_splits() == 0) throw DataError("no variable produced any split");
  const BinarizedDataset binarized = apply_binarizer(f.map, data, &diag);
  for (std::size_t j : binarized.zero_columns()) {
    diag.warn("split " + f.map.describe_split(j) + " never fires on the training data");
  }
  f.constraints = make_constraints(f.map, *config.lambda, *config.gamma, config.box,
                                   config.variables, config.intercept_box);

  BeamOptions beam;
  beam.beam_width = config.beam_width;
  beam.descent = descent_options(config);
  beam.screening_sweeps = config.screening_sweeps;
  beam.threads = config.threads;
  f.base = fit_continuous(binarized, f.constraints, beam);

  PoolOptions pool;
  pool.epsilon_u = config.epsilon_u;
  pool.swap_candidates = config.swap_candidates;
  pool.pool_size = config.pool_size;
  pool.passes = config.swap_passes;
  pool.descent = beam.descent;
  pool.threads = config.threads;
  f.pool = generate_pool(f.base, binarized, f.constraints, pool);

  const auto rounded = round_pool(f.pool, binarized, f.constraints, config.multipliers,
                                  config.threads);
  for (const auto& score : rounded) {
    f.cards.push_back(make_scorecard(score, binarized, f.constraints, card_name(*config.gamma)));
  }
  if (warnings) {
    warnings->insert(warnings->end(), diag.warnings.begin(), diag.warnings.end());
  }
  return f;
}

EvaluationReport evaluate_card(const Scorecard& card, const RawDataset& data) {
  const auto probs = predict_risk(card, data);
  return evaluate(data.labels01(), probs);
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TrainResult train(const RawDataset& data, const RunConfig& config) {
  check(config);
  if (!data.has_labels()) throw DataError("training data has no labels");
  const std::size_t n = data.num_rows();

  TrainResult result;
  result.config = config;
  result.data_fingerprint = data.fingerprint();

  Rng rng(*config.seed);
  const auto order = permutation(rng, n);
  const auto n_val = static_cast<std::size_t>(std::floor(config.validation_fraction * n));
  if (n_val > 0 && n - n_val < 2) throw ConfigError("validation_fraction leaves too few rows");
  const auto train_rows = sorted({order.begin() + n_val, order.end()});
  const auto val_rows = sorted({order.begin(), order.begin() + n_val});
  const RawDataset train_data = n_val > 0 ? data.subset(train_rows) : data;
  result.train_rows = train_data.num_rows();
  result.validation_rows = n_val;

  Fitted f = fit(train_data, config, &result.warnings);
  result.map = std::move(f.map);
  result.constraints = std::move(f.constraints);
  result.base = std::move(f.base);
  result.pool = std::move(f.pool);

  std::optional<RawDataset> val_data;
  if (n_val > 0) val_data = data.subset(val_rows);
  for (auto& card : f.cards) {
    CardResult cr;
    cr.continuous_loss = result.pool.entries.at(card.score.provenance).loss;
    cr.sparsity = sparsity(card);
    cr.train = evaluate_card(card, train_data);
    if (val_data) cr.validation = evaluate_card(card, *val_data);
    cr.card = std::move(card);
    result.cards.push_back(std::move(cr));
  }

  if (config.cv_folds >= 2) {
    const std::size_t k = config.cv_folds;
    if (train_data.num_rows() < 2 * k) throw ConfigError("too few rows for cv_folds");
    Rng fold_rng(*config.seed + 1);
    const auto fold_order = permutation(fold_rng, train_data.num_rows());
    for (std::size_t fold = 0; fold < k; ++fold) {
      std::vector<std::size_t> in, out;
      for (std::size_t r = 0; r < fold_order.size(); ++r) {
        (r % k == fold ? out : in).push_back(fold_order[r]);
      }
      const RawDataset fold_train = train_data.subset(sorted(in));
      const RawDataset fold_test = train_data.subset(sorted(out));
      Fitted ff = fit(fold_train, config, nullptr);
      FoldResult fr;
      fr.fold = fold;
      fr.train_rows = fold_train.num_rows();
      fr.test_rows = fold_test.num_rows();
      fr.best_card = evaluate_card(ff.cards.front(), fold_test);
      result.folds.push_back(fr);
    }
  }
  return result;
}

json pool_document(const TrainResult& r) {
  json cards = json::array();
  for (const auto& c : r.cards) {
    json entry{{"card", to_json(c.card)},
               {"continuous_loss", c.continuous_loss},
               {"sparsity", to_json(c.sparsity)},
               {"train", to_json(c.train)}};
    if (c.validation) entry["validation"] = to_json(*c.validation);
    cards.push_back(std::move(entry));
  }
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"train_rows", f.train_rows},
                     {"test_rows", f.test_rows},
                     {"report", to_json(f.best_card)}});
  }
  json base{{"loss", r.base.loss}, {"support", r.base.support}};
  return {{"version", kPoolVersion},
          {"config", to_json(r.config)},
          {"data_fingerprint", r.data_fingerprint},
          {"train_rows", r.train_rows},
          {"validation_rows", r.validation_rows},
          {"num_splits", r.map.num_splits()},
          {"base", base},
          {"epsilon_u", r.pool.epsilon_u},
          {"pool_base_loss", r.pool.base_loss},
          {"cards", cards},
          {"cv", folds},
          {"warnings", r.warnings}};
}

Scorecard card_from_pool(const json& doc, std::size_t index) {
  if (!doc.is_object() || !doc.contains("cards")) {
    throw ParseError("/cards", "not a pool document");
  }
  if (doc.value("version", -1) != kPoolVersion) {
    throw ParseError("/version", "unsupported pool version");
  }
  const auto& cards = doc.at("cards");
  if (index >= cards.size()) {
    throw ConfigError("card index " + std::to_string(index) + " out of range (pool has " +
                      std::to_string(cards.size()) + " cards)");
  }
  return scorecard_from_json(cards.at(index).at("card"));
}

std::string summary_table(const TrainResult& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-5s %-8s %12s %12s %8s %8s %10s\n", "card", "name",
                "cont. loss", "int. loss", "groups", "overall", "train AUC");
  out << line;
  for (std::size_t i = 0; i < r.cards.size(); ++i) {
    const auto& c = r.cards[i];
    const std::string auc = c.train.auroc ? std::to_string(*c.train.auroc) : "undefined";
    std::snprintf(line, sizeof line, "%-5zu %-8s %12.4f %12.4f %8zu %8zu %10s\n", i,
                  c.card.name.c_str(), c.continuous_loss, c.card.score.loss,
                  c.sparsity.group_sparsity, c.sparsity.overall_sparsity, auc.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace riskcard
