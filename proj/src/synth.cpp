#include "riskcard/synth.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "riskcard/csv.hpp"
#include "riskcard/error.hpp"
#include "riskcard/random.hpp"

namespace riskcard {

using nlohmann::json;

namespace {

SynthDistribution::Type parse_type(const std::string& s) {
  using T = SynthDistribution::Type;
  if (s == "normal") return T::normal;
  if (s == "uniform") return T::uniform;
  if (s == "bernoulli") return T::bernoulli;
  if (s == "categorical") return T::categorical;
  throw ConfigError("unknown distribution '" + s + "'");
}

std::string type_name(SynthDistribution::Type t) {
  using T = SynthDistribution::Type;
  switch (t) {
    case T::normal:
      return "normal";
    case T::uniform:
      return "uniform";
    case T::bernoulli:
      return "bernoulli";
    case T::categorical:
      return "categorical";
  }
  return {};
}

bool is_categorical(const SynthVariable& v) {
  return v.distribution.type == SynthDistribution::Type::categorical;
}

SynthVariable numeric(std::string name, SynthDistribution::Type type, double a, double b,
                      std::vector<std::pair<double, int>> points, double missing_rate = 0.0,
                      int missing_points = 0, int decimals = 1) {
  SynthVariable v;
  v.name = std::move(name);
  v.distribution.type = type;
  v.distribution.a = a;
  v.distribution.b = b;
  v.threshold_points = std::move(points);
  v.missing_rate = missing_rate;
  v.missing_points = missing_points;
  v.decimals = decimals;
  return v;
}

}  // namespace

SynthSpec synth_spec_from_json(const json& doc) {
  try {
    SynthSpec spec;
    spec.name = doc.value("name", spec.name);
    spec.intercept = doc.value("intercept", 0);
    spec.multiplier = doc.value("multiplier", 1.0);
    spec.noise_variables = doc.value("noise_variables", std::size_t{0});
    spec.label = doc.value("label", spec.label);
    for (const auto& jv : doc.at("variables")) {
      SynthVariable v;
      v.name = jv.at("name").get<std::string>();
      const auto& jd = jv.at("distribution");
      v.distribution.type = parse_type(jd.at("type").get<std::string>());
      v.distribution.a = jd.value("a", 0.0);
      v.distribution.b = jd.value("b", 1.0);
      v.distribution.categories = jd.value("categories", std::vector<std::string>{});
      v.distribution.weights = jd.value("weights", std::vector<double>{});
      v.missing_rate = jv.value("missing_rate", 0.0);
      v.decimals = jv.value("decimals", -1);
      v.missing_points = jv.value("missing_points", 0);
      if (jv.contains("splits")) {
        for (const auto& s : jv.at("splits")) {
          v.threshold_points.emplace_back(s.at("le").get<double>(), s.at("points").get<int>());
        }
      }
      v.category_points = jv.value("category_points", std::vector<int>{});
      spec.variables.push_back(std::move(v));
    }
    if (!(spec.multiplier > 0.0)) throw ConfigError("synthetic multiplier must be positive");
    return spec;
  } catch (const json::exception& e) {
    throw ParseError("synth spec", e.what());
  }
}

json to_json(const SynthSpec& spec) {
  json vars = json::array();
  for (const auto& v : spec.variables) {
    json d{{"type", type_name(v.distribution.type)}, {"a", v.distribution.a}, {"b", v.distribution.b}};
    if (is_categorical(v)) {
      d["categories"] = v.distribution.categories;
      d["weights"] = v.distribution.weights;
    }
    json jv{{"name", v.name},
            {"distribution", d},
            {"missing_rate", v.missing_rate},
            {"decimals", v.decimals},
            {"missing_points", v.missing_points}};
    json splits = json::array();
    for (const auto& [t, p] : v.threshold_points) splits.push_back({{"le", t}, {"points", p}});
    jv["splits"] = splits;
    if (is_categorical(v)) jv["category_points"] = v.category_points;
    vars.push_back(std::move(jv));
  }
  return {{"name", spec.name},           {"intercept", spec.intercept},
          {"multiplier", spec.multiplier}, {"noise_variables", spec.noise_variables},
          {"label", spec.label},         {"variables", vars}};
}

SynthSpec reference_synth_spec(std::size_t noise_variables) {
  using T = SynthDistribution::Type;
  SynthSpec spec;
  spec.name = "reference-10";
  spec.intercept = -1;
  spec.multiplier = 2.0;
  spec.noise_variables = noise_variables;
  spec.variables = {
      numeric("age", T::uniform, 18, 90, {{40, -2}, {65, -1}, {80, -1}}),
      numeric("heart_rate", T::normal, 85, 18, {{60, 1}, {110, -2}}, 0.05, 1),
      numeric("systolic_bp", T::normal, 120, 22, {{90, 2}, {100, 1}}, 0.03, 0),
      numeric("gcs", T::uniform, 3, 16, {{6, 2}, {9, 1}, {13, 1}}, 0.0, 0, 0),
      numeric("bun", T::normal, 25, 12, {{20, -1}, {40, -1}}, 0.08, 1),
      numeric("lactate", T::normal, 2.5, 1.5, {{2, -1}, {4, -1}}, 0.2, 0, 2),
      numeric("temperature", T::normal, 37, 0.8, {{35.8, 2}}, 0.02, 0),
      numeric("ventilated", T::bernoulli, 0.3, 0, {{0, -2}}, 0.0, 0, 0),
  };
  SynthVariable admission;
  admission.name = "admission";
  admission.distribution.type = T::categorical;
  admission.distribution.categories = {"elective", "medical", "urgent"};
  admission.distribution.weights = {0.3, 0.5, 0.2};
  admission.category_points = {-1, 0, 1};
  spec.variables.push_back(admission);
  SynthVariable cancer;
  cancer.name = "cancer";
  cancer.distribution.type = T::categorical;
  cancer.distribution.categories = {"hematologic", "metastatic", "none"};
  cancer.distribution.weights = {0.05, 0.1, 0.85};
  cancer.category_points = {2, 3, 0};
  cancer.missing_rate = 0.05;
  spec.variables.push_back(cancer);
  return spec;
}

Scorecard truth_card(const SynthSpec& spec) {
  BinarizationMap map;
  std::vector<int> w;
  int intercept = spec.intercept;
  for (const auto& v : spec.variables) {
    VariableEncoding enc;
    enc.name = v.name;
    enc.missing_indicator = v.missing_rate > 0.0;
    if (is_categorical(v)) {
      enc.kind = VariableKind::categorical;
      const auto& cats = v.distribution.categories;
      if (cats.empty() || v.category_points.size() != cats.size() ||
          v.distribution.weights.size() != cats.size()) {
        throw ConfigError("categorical variable '" + v.name +
                          "' needs categories, weights and category_points of equal length");
      }
      std::vector<std::size_t> order(cats.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cats[a] < cats[b]; });
      for (std::size_t k : order) enc.categories.push_back(cats[k]);
      // Cumulative splits: split k fires on the first k + 1 sorted tokens, so
      // its weight is the step between consecutive category points and the
      // last category's points move into the intercept.
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        w.push_back(v.category_points[order[k]] - v.category_points[order[k + 1]]);
      }
      intercept += v.category_points[order.back()];
    } else {
      auto points = v.threshold_points;
      std::sort(points.begin(), points.end());
      for (const auto& [t, p] : points) {
        if (!enc.thresholds.empty() && t <= enc.thresholds.back()) {
          throw ConfigError("duplicate threshold in variable '" + v.name + "'");
        }
        enc.thresholds.push_back(t);
        w.push_back(p);
      }
    }
    if (enc.missing_indicator) w.push_back(v.missing_points);
    map.variables.push_back(std::move(enc));
  }
  for (std::size_t k = 0; k < spec.noise_variables; ++k) {
    VariableEncoding enc;
    enc.name = "noise" + std::to_string(k + 1);
    map.variables.push_back(std::move(enc));
  }
  map.rebuild_splits();
  map.fitted_on = "synthetic:" + spec.name;

  Scorecard card;
  card.name = spec.name;
  card.map = std::move(map);
  card.score.w = std::move(w);
  card.score.w0 = intercept;
  card.score.m = spec.multiplier;
  card.score.grid_multipliers = {spec.multiplier};
  card.score.grid_losses = {0.0};
  card.metadata.training_fingerprint = card.map.fitted_on;
  return card;
}

SynthResult synthesize(const SynthSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("synthetic sample size must be positive");
  Rng rng(seed);
  std::vector<std::string> names;
  std::vector<std::vector<RawValue>> columns;
  using T = SynthDistribution::Type;
  for (const auto& v : spec.variables) {
    names.push_back(v.name);
    std::vector<RawValue> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool missing = v.missing_rate > 0.0 && bernoulli(rng, v.missing_rate);
      double x = 0.0;
      switch (v.distribution.type) {
        case T::normal:
          x = v.distribution.a + v.distribution.b * standard_normal(rng);
          break;
        case T::uniform:
          x = v.distribution.a + (v.distribution.b - v.distribution.a) * uniform01(rng);
          break;
        case T::bernoulli:
          x = bernoulli(rng, v.distribution.a) ? 1.0 : 0.0;
          break;
        case T::categorical:
          col[i] = v.distribution.categories.at(categorical(rng, v.distribution.weights));
          break;
      }
      if (missing) {
        col[i] = std::monostate{};
      } else if (v.distribution.type != T::categorical) {
        if (v.decimals >= 0) {
          const double scale = std::pow(10.0, v.decimals);
          x = std::round(x * scale) / scale;
        }
        col[i] = x;
      }
    }
    columns.push_back(std::move(col));
  }
  for (std::size_t k = 0; k < spec.noise_variables; ++k) {
    names.push_back("noise" + std::to_string(k + 1));
    std::vector<RawValue> col(n);
    for (auto& c : col) c = std::round(standard_normal(rng) * 1000.0) / 1000.0;
    columns.push_back(std::move(col));
  }
  RawDataset data(std::move(names), std::move(columns));
  SynthResult out{std::move(data), truth_card(spec), {}};
  out.true_risk = predict_risk(out.truth, out.data);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = bernoulli(rng, out.true_risk[i]) ? 1 : 0;
  out.data.set_labels(labels);
  out.truth.map.fitted_on = out.data.fingerprint();
  out.truth.metadata.training_fingerprint = out.truth.map.fitted_on;
  return out;
}

void write_dataset_csv(std::ostream& out, const RawDataset& data, const std::string& label) {
  CsvTable table;
  table.header = data.names();
  table.header.push_back(label);
  const auto labels = data.labels01();
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(table.header.size());
    for (std::size_t v = 0; v < data.num_variables(); ++v) {
      const RawValue& x = data.at(i, v);
      row.push_back(is_missing(x) ? "NA" : to_token(x));
    }
    row.push_back(labels.empty() ? "" : std::to_string(labels[i]));
    table.rows.push_back(std::move(row));
  }
  write_csv(out, table);
}

}  // namespace riskcard
