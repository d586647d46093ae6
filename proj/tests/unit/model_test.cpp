#include <doctest.h>

#include <cmath>
#include <cstring>
#include <regex>

#include "../support/cards.hpp"
#include "riskcard/error.hpp"
#include "riskcard/scorecard.hpp"

using namespace riskcard;

namespace {

Scorecard intercept_only(int w0, double m) {
  Scorecard card;
  card.name = "GFR-0";
  VariableEncoding enc;
  enc.name = "x";
  enc.thresholds = {1.0, 2.0};
  card.map.variables.push_back(enc);
  card.map.rebuild_splits();
  card.score.w = {0, 0};
  card.score.w0 = w0;
  card.score.m = m;
  return card;
}

// Points read off the rendered component functions for one record.
int rendered_total(const Scorecard& card, const RawRecord& record) {
  int total = card.score.w0;
  for (const auto& f : component_functions(card)) {
    const RawValue& x = record.values[f.variable];
    if (is_missing(x)) {
      total += f.missing_points.value_or(0);
      continue;
    }
    const ScoreBin* hit = nullptr;
    for (const auto& b : f.bins) {
      if (f.kind == VariableKind::continuous) {
        const double v = std::get<double>(x);
        if ((!b.lower || v > *b.lower) && (!b.upper || v <= *b.upper)) hit = &b;
      } else {
        const auto& token = std::get<std::string>(x);
        if (std::find(b.categories.begin(), b.categories.end(), token) != b.categories.end()) hit = &b;
      }
    }
    if (!hit) hit = &f.bins.back();  // unseen category
    total += hit->points;
  }
  return total;
}

}  // namespace

TEST_CASE("risk is the sigmoid of total / m") {
  CHECK(risk_from_score(intercept_only(0, 1.0), 0) == 0.5);
  CHECK(risk_from_score(intercept_only(0, 2.0), 2) == doctest::Approx(0.7310585786300049));
  const auto card = intercept_only(0, 1.5);
  double previous = 1.0;
  for (int s = -1; s >= -60; --s) {
    const double r = risk_from_score(card, s);
    CHECK(r < previous);
    CHECK(r > 0.0);
    previous = r;
  }
  CHECK(risk_from_score(card, -1000) < 1e-200);
}

TEST_CASE("prediction on a record equals sigma((w.x + w0) / m)") {
  auto card = intercept_only(-1, 2.0);
  card.score.w = {3, -1};  // x <= 1: +3, x <= 2: -1
  const RawRecord low{{"x"}, {0.5}};
  const RawRecord mid{{"x"}, {1.5}};
  const RawRecord high{{"x"}, {7.0}};
  CHECK(predict_risk(card, low) == doctest::Approx(1.0 / (1.0 + std::exp(-(3 - 1 - 1) / 2.0))).epsilon(1e-15));
  CHECK(predict_risk(card, mid) == doctest::Approx(1.0 / (1.0 + std::exp(-(-1 - 1) / 2.0))).epsilon(1e-15));
  CHECK(predict_risk(card, high) == doctest::Approx(1.0 / (1.0 + std::exp(1 / 2.0))).epsilon(1e-15));
}

TEST_CASE("a record without a card variable is a schema mismatch naming it") {
  const auto card = intercept_only(0, 1.0);
  try {
    predict_risk(card, RawRecord{{"y"}, {1.0}});
    FAIL("expected SchemaMismatch");
  } catch (const SchemaMismatch& e) {
    CHECK(e.variable() == "x");
  }
}

TEST_CASE("intercept-only card renders only the footer") {
  const auto card = intercept_only(-2, 2.0);
  const auto text = render_scorecard(card);
  CHECK(component_functions(card).empty());
  CHECK(text.find("1. ") == std::string::npos);
  CHECK(text.find("Intercept:  -2 points") != std::string::npos);
  CHECK(text.find("26.9%") != std::string::npos);  // sigma(-1)
}

TEST_CASE("rendering lists one block per used variable with exact integer points") {
  Rng rng(15);
  Scorecard card = cards::random_card(rng, 20);
  // Use exactly 15 variables.
  for (std::size_t v = 0; v < 20; ++v) {
    for (std::size_t j : card.map.groups[v]) card.score.w[j] = 0;
    if (v < 15) card.score.w[card.map.groups[v].front()] = static_cast<int>(v) + 1;
  }
  const auto text = render_scorecard(card);
  const std::regex block("^[0-9]+\\. var", std::regex::multiline);
  const auto blocks = std::distance(std::sregex_iterator(text.begin(), text.end(), block),
                                    std::sregex_iterator());
  CHECK(blocks == 15);
  CHECK(sparsity(card).group_sparsity == 15);
  for (std::size_t v = 0; v < 15; ++v) {
    CHECK(text.find("+" + std::to_string(v + 1) + " points") != std::string::npos);
  }
}

TEST_CASE("sparsity counts nonzeros plus intercept and multiplier") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto card = cards::random_card(rng);
    const auto report = sparsity(card);
    const auto nnz = static_cast<std::size_t>(
        std::count_if(card.score.w.begin(), card.score.w.end(), [](int w) { return w != 0; }));
    CHECK(report.overall_sparsity == nnz + 2);
    CHECK(report.overall_sparsity >= report.group_sparsity);
  }
}

TEST_CASE("rendered points reproduce the prediction on random records") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto card = cards::random_card(rng, 1 + uniform_index(rng, 8), trial % 3 == 0);
    for (int r = 0; r < 20; ++r) {
      const auto record = cards::random_record(rng, card.map);
      const int total = rendered_total(card, record);
      CHECK(predict_risk(card, record) == risk_from_score(card, total));
      if (!card.calibration) {
        CHECK(predict_risk(card, record) ==
              doctest::Approx(1.0 / (1.0 + std::exp(-total / card.score.m))).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("sign-restricted variables render monotone component functions") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    auto card = cards::random_card(rng, 5);
    for (auto& w : card.score.w) w = std::abs(w);
    for (const auto& f : component_functions(card)) {
      if (f.kind != VariableKind::continuous) continue;
      for (std::size_t k = 1; k < f.bins.size(); ++k) CHECK(f.bins[k].points <= f.bins[k - 1].points);
    }
    for (auto& w : card.score.w) w = -w;
    for (const auto& f : component_functions(card)) {
      if (f.kind != VariableKind::continuous) continue;
      for (std::size_t k = 1; k < f.bins.size(); ++k) CHECK(f.bins[k].points >= f.bins[k - 1].points);
    }
  }
}

TEST_CASE("serialize and deserialize round-trip 100 random cards") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto card = cards::random_card(rng, 1 + uniform_index(rng, 10), trial % 2 == 0);
    if (trial % 4 == 1) {
      card.metadata.constraints =
          make_constraints(card.map, card.map.num_splits(), card.map.num_groups());
    }
    const auto text = serialize(card);
    const auto back = deserialize(text);
    CHECK(back == card);
    CHECK(serialize(back) == text);
    for (int r = 0; r < 10; ++r) {
      const auto record = cards::random_record(rng, card.map);
      const double a = predict_risk(card, record);
      const double b = predict_risk(back, record);
      CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
  }
}

TEST_CASE("calibration is absent from documents of uncalibrated cards") {
  Rng rng(5);
  const auto plain = cards::random_card(rng, 3, false);
  CHECK_FALSE(to_json(plain).contains("calibration"));
  const auto calibrated = cards::random_card(rng, 3, true);
  CHECK(to_json(calibrated).contains("calibration"));
}

TEST_CASE("malformed and mismatched documents raise located parse errors") {
  Rng rng(6);
  const auto card = cards::random_card(rng, 3);
  auto doc = to_json(card);

  auto expect_location = [](const std::string& text, const std::string& location) {
    try {
      deserialize(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.location() == location);
    }
  };
  auto wrong_version = doc;
  wrong_version["version"] = kScorecardVersion + 1;
  expect_location(wrong_version.dump(), "/version");

  auto no_multiplier = doc;
  no_multiplier.erase("multiplier");
  expect_location(no_multiplier.dump(), "/multiplier");

  auto edited = doc;
  edited["variables"] = nlohmann::json::array();
  if (!to_json(card)["variables"].empty()) expect_location(edited.dump(), "/variables");

  CHECK_THROWS_AS(deserialize("{\"version\": 1,"), ParseError);
  CHECK_THROWS_AS(deserialize("[]"), ParseError);
}
