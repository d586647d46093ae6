#include "riskcard/scorecard.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "riskcard/error.hpp"
#include "riskcard/logistic.hpp"

namespace riskcard {

using nlohmann::json;

namespace {

std::string number(double v) { return to_token(RawValue{v}); }

std::string signed_points(int p) { return p > 0 ? "+" + std::to_string(p) : std::to_string(p); }

std::vector<int> tabulated_scores(std::vector<int> totals) {
  if (totals.empty()) return {};
  std::sort(totals.begin(), totals.end());
  std::vector<double> sorted(totals.begin(), totals.end());
  std::vector<int> table{totals.front()};
  for (double alpha : {0.25, 0.5, 0.75}) {
    table.push_back(static_cast<int>(nearest_rank_quantile(sorted, alpha)));
  }
  table.push_back(totals.back());
  table.erase(std::unique(table.begin(), table.end()), table.end());
  return table;
}

}  // namespace

std::string card_name(std::size_t gamma) { return "GFR-" + std::to_string(gamma); }

Scorecard make_scorecard(const IntegerRiskScore& score, const BinarizedDataset& training,
                         const ConstraintSet& constraints, std::string name) {
  if (score.w.size() != training.num_columns()) {
    throw DataError("scorecard has " + std::to_string(score.w.size()) +
                    " coefficients, training data has " + std::to_string(training.num_columns()) +
                    " columns");
  }
  Scorecard card;
  card.name = std::move(name);
  card.score = score;
  card.map = training.map();
  card.metadata.training_fingerprint = training.map().fitted_on;
  card.metadata.constraints = constraints;
  std::vector<int> totals(training.num_rows(), score.w0);
  for (std::size_t j = 0; j < score.w.size(); ++j) {
    if (score.w[j] == 0) continue;
    for (std::uint32_t i : training.column(j)) totals[i] += score.w[j];
  }
  card.metadata.score_table = tabulated_scores(std::move(totals));
  return card;
}

SparsityReport sparsity(const Scorecard& card) {
  SparsityReport r;
  const auto support = card.score.support();
  r.overall_sparsity = support.size() + 2;
  r.group_sparsity = groups_used(support, card.map.group_of());
  return r;
}

std::vector<ComponentFunction> component_functions(const Scorecard& card) {
  const auto& map = card.map;
  const auto& w = card.score.w;
  std::vector<ComponentFunction> out;
  for (std::size_t v = 0; v < map.variables.size(); ++v) {
    const auto& group = map.groups[v];
    if (std::none_of(group.begin(), group.end(), [&](std::size_t j) { return w[j] != 0; })) continue;
    const VariableEncoding& enc = map.variables[v];
    ComponentFunction f;
    f.variable = v;
    f.name = enc.name;
    f.kind = enc.kind;

    // Nonzero value splits in ascending order with their points.
    std::vector<std::size_t> cuts;
    for (std::size_t j : group) {
      if (map.splits[j].kind == SplitKind::missing) {
        if (w[j] != 0) f.missing_points = w[j];
      } else if (w[j] != 0) {
        cuts.push_back(j);
      }
    }
    std::vector<int> remaining(cuts.size() + 1, 0);
    for (std::size_t k = cuts.size(); k-- > 0;) remaining[k] = remaining[k + 1] + w[cuts[k]];

    if (enc.kind == VariableKind::continuous) {
      std::optional<double> lower;
      for (std::size_t k = 0; k <= cuts.size(); ++k) {
        ScoreBin bin;
        bin.lower = lower;
        if (k < cuts.size()) bin.upper = map.splits[cuts[k]].threshold;
        if (bin.lower && bin.upper) {
          bin.condition = number(*bin.lower) + " < " + enc.name + " <= " + number(*bin.upper);
        } else if (bin.upper) {
          bin.condition = enc.name + " <= " + number(*bin.upper);
        } else if (bin.lower) {
          bin.condition = enc.name + " > " + number(*bin.lower);
        } else {
          bin.condition = enc.name + " is any value";
        }
        bin.points = remaining[k];
        lower = bin.upper;
        f.bins.push_back(std::move(bin));
      }
    } else {
      std::size_t next_token = 0;
      for (std::size_t k = 0; k <= cuts.size(); ++k) {
        ScoreBin bin;
        const std::size_t end =
            k < cuts.size()
                ? static_cast<std::size_t>(std::find(enc.categories.begin(), enc.categories.end(),
                                                     map.splits[cuts[k]].category) -
                                           enc.categories.begin()) + 1
                : enc.categories.size();
        for (; next_token < end; ++next_token) bin.categories.push_back(enc.categories[next_token]);
        bin.other_categories = k == cuts.size();
        std::string list;
        for (std::size_t t = 0; t < bin.categories.size(); ++t) {
          list += (t ? ", " : "") + bin.categories[t];
        }
        bin.condition = enc.name + " in {" + list + "}" + (bin.other_categories ? " or unseen" : "");
        bin.points = remaining[k];
        f.bins.push_back(std::move(bin));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

int total_score(const Scorecard& card, std::span<const std::size_t> firing_splits) {
  int total = card.score.w0;
  for (std::size_t j : firing_splits) total += card.score.w.at(j);
  return total;
}

double risk_from_score(const Scorecard& card, int total) {
  const double risk = sigmoid(static_cast<double>(total) / card.score.m);
  return card.calibration ? (*card.calibration)(risk) : risk;
}

double predict_risk(const Scorecard& card, const RawRecord& record) {
  Diagnostics quiet;
  return risk_from_score(card, total_score(card, binarize_record(card.map, record, &quiet)));
}

std::vector<int> total_scores(const Scorecard& card, const RawDataset& data) {
  Diagnostics quiet;
  const auto binarized = apply_binarizer(card.map, data, &quiet);
  std::vector<int> totals(data.num_rows(), card.score.w0);
  for (std::size_t j = 0; j < card.score.w.size(); ++j) {
    if (card.score.w[j] == 0) continue;
    for (std::uint32_t i : binarized.column(j)) totals[i] += card.score.w[j];
  }
  return totals;
}

std::vector<double> predict_risk(const Scorecard& card, const RawDataset& data) {
  const auto totals = total_scores(card, data);
  std::vector<double> risk(totals.size());
  std::transform(totals.begin(), totals.end(), risk.begin(),
                 [&](int t) { return risk_from_score(card, t); });
  return risk;
}

std::string render_scorecard(const Scorecard& card) {
  const auto functions = component_functions(card);
  const auto report = sparsity(card);
  std::ostringstream out;
  out << card.name << "  (" << report.group_sparsity << " variables, "
      << report.overall_sparsity - 2 << " nonzero points)\n";

  std::size_t width = 9;
  for (const auto& f : functions) {
    for (const auto& b : f.bins) width = std::max(width, b.condition.size());
  }
  const std::string rule(width + 16, '-');
  out << rule << '\n';
  for (std::size_t k = 0; k < functions.size(); ++k) {
    const auto& f = functions[k];
    out << k + 1 << ". " << f.name << '\n';
    for (const auto& b : f.bins) {
      out << "    " << std::left << std::setw(static_cast<int>(width)) << b.condition
          << std::right << std::setw(8) << signed_points(b.points) << " points\n";
    }
    if (f.missing_points) {
      out << "    " << std::left << std::setw(static_cast<int>(width)) << "missing" << std::right
          << std::setw(8) << signed_points(*f.missing_points) << " points\n";
    }
  }
  out << rule << '\n';
  out << "Intercept:  " << signed_points(card.score.w0) << " points\n";
  out << "Multiplier: " << number(card.score.m) << '\n';
  out << "Risk = 1 / (1 + exp(-(total score) / " << number(card.score.m) << "))";
  if (card.calibration) out << ", then isotonic calibration";
  out << '\n';

  std::vector<int> table = card.metadata.score_table;
  if (table.empty()) table.push_back(card.score.w0);
  std::ostringstream scores, risks;
  for (int s : table) {
    std::ostringstream r;
    r << std::fixed << std::setprecision(1) << 100.0 * risk_from_score(card, s) << '%';
    const int cell = static_cast<int>(std::max<std::size_t>(8, r.str().size() + 1));
    scores << std::setw(cell) << s;
    risks << std::setw(cell) << r.str();
  }
  out << "Score:" << scores.str() << '\n';
  out << "Risk: " << risks.str() << '\n';
  return out.str();
}

// ---- JSON -----------------------------------------------------------------

namespace {

template <typename T>
T read(const json& doc, const std::string& key, const std::string& where) {
  const std::string ptr = where + "/" + key;
  if (!doc.is_object() || !doc.contains(key)) throw ParseError(ptr, "missing field");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(ptr, e.what());
  }
}

json interval_json(Interval b) { return json::array({b.lower, b.upper}); }

Interval read_interval(const json& doc, const std::string& where) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
    throw ParseError(where, "expected [lower, upper]");
  }
  return {doc[0].get<double>(), doc[1].get<double>()};
}

json bin_json(const ScoreBin& b) {
  json j{{"condition", b.condition}, {"points", b.points}};
  if (b.lower) j["lower"] = *b.lower;
  if (b.upper) j["upper"] = *b.upper;
  if (!b.categories.empty() || b.other_categories) j["categories"] = b.categories;
  if (b.other_categories) j["other_categories"] = true;
  return j;
}

json variables_json(const Scorecard& card) {
  json vars = json::array();
  for (const auto& f : component_functions(card)) {
    json bins = json::array();
    for (const auto& b : f.bins) bins.push_back(bin_json(b));
    json v{{"name", f.name}, {"kind", to_string(f.kind)}, {"bins", bins}};
    v["missing_points"] = f.missing_points ? json(*f.missing_points) : json(nullptr);
    vars.push_back(std::move(v));
  }
  return vars;
}

}  // namespace

json to_json(const BinarizationMap& map) {
  json vars = json::array();
  for (const auto& v : map.variables) {
    vars.push_back({{"name", v.name},
                    {"kind", to_string(v.kind)},
                    {"thresholds", v.thresholds},
                    {"categories", v.categories},
                    {"missing_indicator", v.missing_indicator}});
  }
  return {{"fitted_on", map.fitted_on}, {"variables", vars}};
}

BinarizationMap binarization_from_json(const json& doc) {
  const std::string where = "/binarization";
  BinarizationMap map;
  map.fitted_on = read<std::string>(doc, "fitted_on", where);
  const auto vars = read<json>(doc, "variables", where);
  if (!vars.is_array()) throw ParseError(where + "/variables", "expected an array");
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string at = where + "/variables/" + std::to_string(k);
    VariableEncoding v;
    v.name = read<std::string>(vars[k], "name", at);
    try {
      v.kind = parse_variable_kind(read<std::string>(vars[k], "kind", at));
    } catch (const ConfigError& e) {
      throw ParseError(at + "/kind", e.what());
    }
    v.thresholds = read<std::vector<double>>(vars[k], "thresholds", at);
    v.categories = read<std::vector<std::string>>(vars[k], "categories", at);
    v.missing_indicator = read<bool>(vars[k], "missing_indicator", at);
    if (std::adjacent_find(v.thresholds.begin(), v.thresholds.end(), std::greater_equal<>()) !=
        v.thresholds.end()) {
      throw ParseError(at + "/thresholds", "thresholds must be strictly increasing");
    }
    if (std::adjacent_find(v.categories.begin(), v.categories.end(), std::greater_equal<>()) !=
        v.categories.end()) {
      throw ParseError(at + "/categories", "categories must be sorted and unique");
    }
    map.variables.push_back(std::move(v));
  }
  map.rebuild_splits();
  return map;
}

json to_json(const ConstraintSet& c) {
  json box = json::array();
  for (const auto& b : c.box) box.push_back(interval_json(b));
  json monotone = json::array();
  for (auto m : c.monotone) monotone.push_back(to_string(m));
  return {{"lambda", c.lambda},
          {"gamma", c.gamma},
          {"box", box},
          {"intercept_box", interval_json(c.intercept_box)},
          {"monotone", monotone},
          {"group_of", c.group_of}};
}

ConstraintSet constraints_from_json(const json& doc) {
  const std::string where = "/metadata/constraints";
  ConstraintSet c;
  c.lambda = read<std::size_t>(doc, "lambda", where);
  c.gamma = read<std::size_t>(doc, "gamma", where);
  const auto box = read<json>(doc, "box", where);
  if (!box.is_array()) throw ParseError(where + "/box", "expected an array");
  for (std::size_t k = 0; k < box.size(); ++k) {
    c.box.push_back(read_interval(box[k], where + "/box/" + std::to_string(k)));
  }
  c.intercept_box = read_interval(read<json>(doc, "intercept_box", where), where + "/intercept_box");
  for (const auto& m : read<std::vector<std::string>>(doc, "monotone", where)) {
    try {
      c.monotone.push_back(parse_monotone(m));
    } catch (const ConfigError& e) {
      throw ParseError(where + "/monotone", e.what());
    }
  }
  c.group_of = read<std::vector<std::size_t>>(doc, "group_of", where);
  if (c.group_of.size() != c.box.size()) {
    throw ParseError(where + "/group_of", "length differs from box");
  }
  return c;
}

json to_json(const EvaluationReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"auroc", opt(r.auroc)},       {"auprc", opt(r.auprc)}, {"brier", opt(r.brier)},
          {"hl_chi2", opt(r.hl_chi2)},   {"hl_clamped_groups", r.hl_clamped_groups},
          {"smr", opt(r.smr)},           {"n", r.n},              {"n_positive", r.n_positive}};
}

json to_json(const SparsityReport& r) {
  return {{"group_sparsity", r.group_sparsity}, {"overall_sparsity", r.overall_sparsity}};
}

json to_json(const Scorecard& card) {
  json doc;
  doc["version"] = kScorecardVersion;
  doc["name"] = card.name;
  doc["multiplier"] = card.score.m;
  doc["intercept"] = card.score.w0;
  doc["variables"] = variables_json(card);
  if (card.calibration) {
    doc["calibration"] = {{"type", "isotonic"},
                          {"lower", card.calibration->lower},
                          {"upper", card.calibration->upper},
                          {"level", card.calibration->level}};
  }
  json meta{{"training_fingerprint", card.metadata.training_fingerprint},
            {"score_table", card.metadata.score_table},
            {"loss", card.score.loss},
            {"source_pool_entry", card.score.provenance},
            {"grid_multipliers", card.score.grid_multipliers},
            {"grid_losses", card.score.grid_losses}};
  if (card.metadata.constraints) meta["constraints"] = to_json(*card.metadata.constraints);
  doc["metadata"] = std::move(meta);
  doc["binarization"] = to_json(card.map);
  json coefficients = json::array();
  for (std::size_t j = 0; j < card.score.w.size(); ++j) {
    if (card.score.w[j] != 0) coefficients.push_back({{"split", j}, {"points", card.score.w[j]}});
  }
  doc["coefficients"] = std::move(coefficients);
  return doc;
}

Scorecard scorecard_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "scorecard document must be an object");
  const int version = read<int>(doc, "version", "");
  if (version != kScorecardVersion) {
    throw ParseError("/version", "unsupported scorecard version " + std::to_string(version) +
                                     " (expected " + std::to_string(kScorecardVersion) + ")");
  }
  Scorecard card;
  card.name = read<std::string>(doc, "name", "");
  card.map = binarization_from_json(read<json>(doc, "binarization", ""));
  card.score.m = read<double>(doc, "multiplier", "");
  if (!(card.score.m > 0.0) || !std::isfinite(card.score.m)) {
    throw ParseError("/multiplier", "multiplier must be positive and finite");
  }
  card.score.w0 = read<int>(doc, "intercept", "");
  card.score.w.assign(card.map.num_splits(), 0);
  const auto coefficients = read<json>(doc, "coefficients", "");
  if (!coefficients.is_array()) throw ParseError("/coefficients", "expected an array");
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const std::string at = "/coefficients/" + std::to_string(k);
    const auto j = read<std::size_t>(coefficients[k], "split", at);
    if (j >= card.score.w.size()) throw ParseError(at + "/split", "split index out of range");
    card.score.w[j] = read<int>(coefficients[k], "points", at);
  }
  const auto meta = read<json>(doc, "metadata", "");
  card.metadata.training_fingerprint = read<std::string>(meta, "training_fingerprint", "/metadata");
  card.metadata.score_table = read<std::vector<int>>(meta, "score_table", "/metadata");
  card.score.loss = read<double>(meta, "loss", "/metadata");
  card.score.provenance = read<std::size_t>(meta, "source_pool_entry", "/metadata");
  card.score.grid_multipliers = read<std::vector<double>>(meta, "grid_multipliers", "/metadata");
  card.score.grid_losses = read<std::vector<double>>(meta, "grid_losses", "/metadata");
  if (meta.contains("constraints")) card.metadata.constraints = constraints_from_json(meta["constraints"]);
  if (doc.contains("calibration") && !doc["calibration"].is_null()) {
    const auto& cal = doc["calibration"];
    IsotonicMap iso;
    iso.lower = read<std::vector<double>>(cal, "lower", "/calibration");
    iso.upper = read<std::vector<double>>(cal, "upper", "/calibration");
    iso.level = read<std::vector<double>>(cal, "level", "/calibration");
    if (iso.lower.size() != iso.level.size() || iso.upper.size() != iso.level.size()) {
      throw ParseError("/calibration", "block arrays differ in length");
    }
    card.calibration = std::move(iso);
  }
  if (read<json>(doc, "variables", "") != variables_json(card)) {
    throw ParseError("/variables", "bins disagree with the coefficients and binarization");
  }
  return card;
}

std::string serialize(const Scorecard& card) { return to_json(card).dump(2) + "\n"; }

Scorecard deserialize(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return scorecard_from_json(doc);
}

}  // namespace riskcard
