// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 5        run only criteria 3 and 5

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "riskcard/csv.hpp"
#include "riskcard/logistic.hpp"
#include "riskcard/metrics.hpp"
#include "riskcard/pipeline.hpp"
#include "riskcard/pool.hpp"
#include "riskcard/rounding.hpp"
#include "riskcard/scorecard.hpp"
#include "riskcard/synth.hpp"

using namespace riskcard;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// ---- shared instance generation ------------------------------------------

struct Case {
  BinarizedDataset data;
  oracle::Problem problem;
  ConstraintSet constraints;
};

// Random binary design with random groups, boxes, and sign restrictions.
Case random_case(std::uint64_t seed, std::size_t max_n, std::size_t max_p, std::size_t max_lambda,
                 std::size_t max_gamma, bool restrict) {
  Rng rng(seed);
  const std::size_t n = 30 + uniform_index(rng, max_n - 29);
  const std::size_t p = 2 + uniform_index(rng, max_p - 1);
  auto inst = oracle::random_instance(rng, n, p);
  auto data = BinarizedDataset::from_dense(inst.x, inst.labels, inst.group_sizes);
  const std::size_t groups = inst.group_sizes.size();

  oracle::Problem pr;
  pr.lambda = 1 + uniform_index(rng, std::min(max_lambda, p));
  pr.gamma = 1 + uniform_index(rng, std::min(max_gamma, groups));
  pr.group_of = data.group_of();
  Interval def = kDefaultBox;
  if (restrict) {
    def = {-(0.5 + 6.0 * uniform01(rng)), 0.5 + 6.0 * uniform01(rng)};
    pr.intercept_lower = -(1.0 + 20.0 * uniform01(rng));
    pr.intercept_upper = 1.0 + 20.0 * uniform01(rng);
  }
  std::vector<VariableConstraint> per_group(groups);
  pr.sign.assign(groups, 0);
  std::vector<Interval> group_box(groups, def);
  for (std::size_t g = 0; g < groups && restrict; ++g) {
    if (bernoulli(rng, 0.3)) {
      group_box[g] = {-(6.0 * uniform01(rng)), 6.0 * uniform01(rng)};
      per_group[g].box = group_box[g];
    }
    const double u = uniform01(rng);
    if (u < 0.25) {
      per_group[g].monotone = Monotone::nonneg;
      pr.sign[g] = 1;
    } else if (u < 0.5) {
      per_group[g].monotone = Monotone::nonpos;
      pr.sign[g] = -1;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    pr.lower.push_back(group_box[pr.group_of[j]].lower);
    pr.upper.push_back(group_box[pr.group_of[j]].upper);
  }
  auto c = make_constraints(pr.group_of, groups, pr.lambda, pr.gamma, def, per_group,
                            {pr.intercept_lower, pr.intercept_upper});
  return {std::move(data), std::move(pr), std::move(c)};
}

// ---- criterion 1 ---------------------------------------------------------

Outcome constraint_suite() {
  const auto start = Clock::now();
  std::size_t checked = 0, violations = 0, instances = 0;
  std::string first;
  auto check = [&](const std::vector<double>& w, double w0, const oracle::Problem& pr,
                   bool integral, const std::string& what) {
    ++checked;
    const auto v = oracle::violations(pr, w, w0, integral);
    if (!v.empty()) {
      ++violations;
      if (first.empty()) first = what + " violates " + v.front();
    }
  };
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Case cs = random_case(1000 + seed, 500, 40, 8, 5, true);
    ++instances;
    BeamOptions beam;
    beam.beam_width = 3 + seed % 8;
    const auto base = fit_continuous(cs.data, cs.constraints, beam);
    check(base.w, base.w0, cs.problem, false, "base of seed " + std::to_string(seed));
    PoolOptions popt;
    popt.epsilon_u = 0.3;
    const auto pool = generate_pool(base, cs.data, cs.constraints, popt);
    for (const auto& e : pool.entries) {
      check(e.w, e.w0, cs.problem, false, "pool entry of seed " + std::to_string(seed));
    }
    for (const auto& r : round_pool(pool, cs.data, cs.constraints, 10)) {
      check(r.as_real(), r.w0, cs.problem, true, "rounded card of seed " + std::to_string(seed));
    }
  }
  const double t = seconds_since(start);
  Outcome o;
  o.pass = violations == 0 && t < 300.0;
  o.detail = fmt("%zu instances, %zu solutions checked, %zu violations, %.1fs (limit 300s)",
                 instances, checked, violations, t);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// ---- criterion 2 ---------------------------------------------------------

Outcome pool_tolerance() {
  std::size_t pools = 0, violations = 0, entries = 0;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Case cs = random_case(2000 + seed, 400, 30, 6, 4, seed % 2 == 0);
    const auto base = fit_continuous(cs.data, cs.constraints, {5});
    for (double eps : {0.0, 0.1, 0.3}) {
      PoolOptions opt;
      opt.epsilon_u = eps;
      opt.pool_size = 25;
      const auto pool = generate_pool(base, cs.data, cs.constraints, opt);
      ++pools;
      double max_loss = 0.0;
      for (const auto& e : pool.entries) {
        max_loss = std::max(max_loss, e.loss);
        ++entries;
      }
      if (!(max_loss <= (1.0 + eps) * pool.base_loss)) ++violations;
      worst_ratio = std::max(worst_ratio, max_loss / pool.base_loss - (1.0 + eps));
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = fmt("%zu pools (eps in {0, 0.1, 0.3}), %zu entries, %zu violations, "
                 "max of ratio - (1+eps) = %.3g",
                 pools, entries, violations, worst_ratio);
  return o;
}

// ---- criterion 3 ---------------------------------------------------------

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::vector<double> gaps;
  std::size_t below = 0;
  double min_gap = 1e300;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Case cs = random_case(3000 + seed, 200, 10, 3, 3, seed % 2 == 0);
    BeamOptions beam;
    beam.beam_width = 10;
    const auto found = fit_continuous(cs.data, cs.constraints, beam);
    const auto best = oracle::exhaustive_optimum(cs.data, cs.constraints);
    const double gap = (found.loss - best.loss) / best.loss;
    // The exhaustive optimum is itself a converged numerical minimum; a
    // difference below 1e-9 relative is rounding, not a better solution.
    if (found.loss < best.loss - 1e-9 * std::max(1.0, best.loss)) ++below;
    min_gap = std::min(min_gap, gap);
    gaps.push_back(std::max(0.0, gap));
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = 0.5 * (gaps[24] + gaps[25]);
  const double t = seconds_since(start);
  Outcome o;
  o.pass = below == 0 && median <= 0.05 && t < 600.0;
  o.detail = fmt("50 instances: %zu below the exhaustive optimum, median relative gap %.3g%% "
                 "(gate 5%%), max gap %.3g%%, min signed gap %.3g, %.1fs (limit 600s)",
                 below, 100.0 * median, 100.0 * gaps.back(), min_gap, t);
  return o;
}

// ---- criterion 4 ---------------------------------------------------------

long double loss_ld(const std::vector<std::vector<int>>& x, const std::vector<int>& y01,
                    const std::vector<long double>& w, long double w0, long double m) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double z = w0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (x[i][j]) z += w[j];
    }
    const long double t = -(y01[i] == 1 ? 1.0L : -1.0L) * z / m;
    total += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  return total;
}

Outcome gradient_check() {
  double worst = 0.0;
  std::size_t failures = 0, components = 0;
  Rng rng(4444);
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t n = 20 + uniform_index(rng, 200);
    const std::size_t p = 1 + uniform_index(rng, 15);
    const auto inst = oracle::random_instance(rng, n, p);
    const auto d = BinarizedDataset::from_dense(inst.x, inst.labels, inst.group_sizes);
    std::vector<double> w(p);
    for (auto& v : w) v = bernoulli(rng, 0.3) ? 0.0 : 3.0 * standard_normal(rng);
    const double w0 = 2.0 * standard_normal(rng);
    const double m = bernoulli(rng, 0.5) ? 1.0 : 1.0 + 4.0 * uniform01(rng);
    const auto g = logistic_gradient(w, w0, d, m);

    std::vector<long double> wl(w.begin(), w.end());
    const long double h = 1e-6L;
    auto rel = [&](double analytic, long double fd) {
      ++components;
      const long double denom = std::max(std::fabs(static_cast<long double>(analytic)), std::fabs(fd));
      const double e = denom == 0.0L ? 0.0 : static_cast<double>(std::fabs(analytic - fd) / denom);
      worst = std::max(worst, e);
      if (!(e < 1e-5)) ++failures;
    };
    for (std::size_t j = 0; j <= p; ++j) {
      auto plus = wl, minus = wl;
      long double b_plus = w0, b_minus = w0;
      if (j < p) {
        plus[j] += h;
        minus[j] -= h;
      } else {
        b_plus += h;
        b_minus -= h;
      }
      const long double fd =
          (loss_ld(inst.x, inst.labels, plus, b_plus, m) - loss_ld(inst.x, inst.labels, minus, b_minus, m)) /
          (2.0L * h);
      rel(j < p ? g.w[j] : g.w0, fd);
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = fmt("100 draws, %zu partial derivatives, max relative error %.3g (limit 1e-5), "
                 "%zu above limit",
                 components, worst, failures);
  return o;
}

// ---- criterion 5 ---------------------------------------------------------

struct ReplayStats {
  std::size_t steps = 0;
  std::size_t mismatches = 0;
  std::size_t near_ties = 0;
  std::string first;
};

// Recomputes the greedy rounding trajectory from scratch and compares it to
// the trace and result of the library.
void replay(const Case& cs, const ContinuousSolution& sol, double m, ReplayStats& st) {
  std::vector<RoundingStep> trace;
  const auto result = sequential_round(sol, cs.data, m, cs.constraints, &trace);
  const std::size_t p = sol.w.size();
  std::vector<double> value(p, 0.0);
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < p; ++j) {
    if (sol.w[j] != 0.0) {
      value[j] = m * sol.w[j];
      order.push_back(j);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(value[a]) > std::abs(value[b]); });
  double intercept = m * sol.w0;

  auto fail = [&](const std::string& why) {
    ++st.mismatches;
    if (st.first.empty()) st.first = why;
  };
  if (trace.size() != order.size() + 1) {
    fail("trace length");
    return;
  }
  for (std::size_t k = 0; k <= order.size(); ++k) {
    const bool is_intercept = k == order.size();
    double& v = is_intercept ? intercept : value[order[k]];
    double lo_box, hi_box;
    if (is_intercept) {
      lo_box = cs.problem.intercept_lower;
      hi_box = cs.problem.intercept_upper;
    } else {
      const std::size_t j = order[k];
      lo_box = cs.problem.lower[j];
      hi_box = cs.problem.upper[j];
      const int s = cs.problem.sign[cs.problem.group_of[j]];
      if (s > 0) lo_box = std::max(lo_box, 0.0);
      if (s < 0) hi_box = std::min(hi_box, 0.0);
    }
    const double ilo = std::ceil(lo_box), ihi = std::floor(hi_box);
    const double f = std::clamp(std::floor(v), ilo, ihi);
    const double c = std::clamp(std::ceil(v), ilo, ihi);
    const RoundingStep& step = trace[k];
    ++st.steps;
    if (step.coordinate.has_value() == is_intercept ||
        (!is_intercept && *step.coordinate != order[k])) {
      fail("visit order");
      return;
    }
    if (step.scaled_value != v || step.floor_value != f || step.ceil_value != c) {
      fail("scaled value or floor/ceil");
      return;
    }
    if (step.chosen != f && step.chosen != c) {
      fail("choice is neither floor nor ceil");
      return;
    }
    double expected = f;
    if (f != c) {
      v = f;
      const double loss_f = oracle::loss(cs.data, value, intercept, m);
      v = c;
      const double loss_c = oracle::loss(cs.data, value, intercept, m);
      expected = (loss_c < loss_f || (loss_c == loss_f && std::abs(c) < std::abs(f))) ? c : f;
      if (std::abs(loss_c - loss_f) <= 1e-12 * loss_f) {
        ++st.near_ties;
        expected = step.chosen;  // numerically indistinguishable
      }
    }
    if (step.chosen != expected) {
      fail(fmt("greedy choice differs at step %zu", k));
      return;
    }
    v = expected;
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (result.w[j] != value[j]) {
      fail("final coefficient differs from replay");
      return;
    }
  }
  if (result.w0 != intercept) fail("final intercept differs from replay");
}

std::vector<double> independent_grid(const std::vector<double>& w, const oracle::Problem& pr,
                                     std::size_t count) {
  double wmax = 0.0, bound = 0.0;
  for (double v : w) wmax = std::max(wmax, std::abs(v));
  for (std::size_t j = 0; j < pr.lower.size(); ++j) {
    double lo = pr.lower[j], hi = pr.upper[j];
    const int s = pr.sign[pr.group_of[j]];
    if (s > 0) lo = std::max(lo, 0.0);
    if (s < 0) hi = std::min(hi, 0.0);
    bound = std::max({bound, std::abs(lo), std::abs(hi)});
  }
  if (wmax == 0.0 || count == 1 || bound / wmax <= 1.0) return {1.0};
  const double top = bound / wmax;
  std::vector<double> g;
  for (std::size_t k = 0; k < count; ++k) {
    g.push_back(k + 1 == count ? top : 1.0 + (top - 1.0) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return g;
}

Outcome rounding_replay() {
  ReplayStats st;
  std::size_t cards = 0, grid_failures = 0;
  std::string grid_first;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const Case cs = random_case(5000 + seed, 300, 25, 6, 4, true);
    const auto base = fit_continuous(cs.data, cs.constraints, {4});
    const auto pool = generate_pool(base, cs.data, cs.constraints, {});
    const std::size_t nm = 8;
    for (const auto& entry : pool.entries) {
      for (double m : multiplier_grid(entry.w, cs.constraints, nm)) replay(cs, entry, m, st);
    }
    for (const auto& card : round_pool(pool, cs.data, cs.constraints, nm)) {
      ++cards;
      const auto& entry = pool.entries.at(card.provenance);
      const auto grid = independent_grid(entry.w, cs.problem, nm);
      bool ok = grid.size() == card.grid_multipliers.size() &&
                card.grid_losses.size() == grid.size();
      for (std::size_t k = 0; ok && k < grid.size(); ++k) {
        ok = std::abs(grid[k] - card.grid_multipliers[k]) <= 1e-12 * grid[k];
        const auto r = sequential_round(entry, cs.data, card.grid_multipliers[k], cs.constraints);
        const double l = oracle::loss(cs.data, r.as_real(), r.w0, card.grid_multipliers[k]);
        ok = ok && std::abs(l - card.grid_losses[k]) <= 1e-10 * l;
        ok = ok && card.loss <= card.grid_losses[k];
      }
      ok = ok && std::find(card.grid_losses.begin(), card.grid_losses.end(), card.loss) !=
                     card.grid_losses.end();
      ok = ok && std::abs(oracle::loss(cs.data, card.as_real(), card.w0, card.m) - card.loss) <=
                     1e-10 * card.loss;
      if (!ok) {
        ++grid_failures;
        if (grid_first.empty()) grid_first = "seed " + std::to_string(seed);
      }
    }
  }
  Outcome o;
  o.pass = st.mismatches == 0 && grid_failures == 0;
  o.detail = fmt("%zu rounding steps replayed, %zu mismatches (%zu numerical near-ties); "
                 "%zu cards, %zu grid-minimality failures",
                 st.steps, st.mismatches, st.near_ties, cards, grid_failures);
  if (!st.first.empty()) o.detail += "; first mismatch: " + st.first;
  if (!grid_first.empty()) o.detail += "; first grid failure: " + grid_first;
  return o;
}

// ---- CLI helpers -----------------------------------------------------------

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("riskcard_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(RISKCARD_CLI) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- criterion 6 ---------------------------------------------------------

Outcome synthetic_recovery() {
  const auto start = Clock::now();
  TempDir dir;
  const std::string log = dir / "log.txt";
  Outcome o;
  auto step = [&](const std::string& args) {
    const int code = run_cli(args, log);
    if (code != 0) o.detail = "command failed (" + std::to_string(code) + "): " + args + "\n" + slurp(log);
    return code == 0;
  };
  if (!step("synth --n 20000 --seed 101 --out " + (dir / "train.csv")) ||
      !step("synth --n 20000 --seed 202 --out " + (dir / "test.csv") + " --truth " + (dir / "truth.json")) ||
      !step("train --data " + (dir / "train.csv") + " --out " + (dir / "pool.json") +
            " --lambda 40 --gamma 10 --seed 7") ||
      !step("evaluate --pool " + (dir / "pool.json") + " --index 0 --data " + (dir / "test.csv") +
            " --out " + (dir / "report.json"))) {
    return o;
  }
  const json truth = json::parse(slurp(dir / "truth.json"));
  const auto true_risk = truth["true_risk"].get<std::vector<double>>();
  const auto test = to_raw_dataset(read_csv_file(dir / "test.csv"), std::string("y"));
  const double bayes = auroc(test.labels01(), true_risk);
  const json report = json::parse(slurp(dir / "report.json"));
  const double learned = report["metrics"]["auroc"].get<double>();
  const json pool = json::parse(slurp(dir / "pool.json"));
  const auto card = card_from_pool(pool, 0);
  const auto sp = sparsity(card);
  const double t = seconds_since(start);
  o.pass = std::abs(bayes - learned) <= 0.02 && t < 900.0 && card.name == "GFR-10";
  o.detail = fmt("test AUROC %.4f vs Bayes-optimal %.4f (|diff| %.4f, limit 0.02); card %s uses "
                 "%zu variables, %zu nonzero points; %.1fs end to end (limit 900s)",
                 learned, bayes, std::abs(bayes - learned), card.name.c_str(), sp.group_sparsity,
                 sp.overall_sparsity - 2, t);
  return o;
}

// ---- criterion 7 ---------------------------------------------------------

Outcome monotonicity() {
  std::size_t cards = 0, functions = 0, sweeps = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto synth = synthesize(reference_synth_spec(), 2500, 700 + seed);
    RunConfig config;
    config.lambda = 12;
    config.gamma = 6;
    config.seed = seed;
    config.pool_size = 5;
    config.multipliers = 10;
    Rng rng(seed);
    std::map<std::string, int> direction;
    for (const auto& name : synth.data.names()) {
      const double u = uniform01(rng);
      if (u < 0.4) {
        config.variables[name].monotone = Monotone::nonneg;
        direction[name] = 1;
      } else if (u < 0.8) {
        config.variables[name].monotone = Monotone::nonpos;
        direction[name] = -1;
      }
    }
    const auto result = train(synth.data, config);
    for (const auto& cr : result.cards) {
      ++cards;
      const Scorecard& card = cr.card;
      const auto fs_ = component_functions(card);
      for (const auto& f : fs_) {
        const auto it = direction.find(f.name);
        if (it == direction.end() || f.kind != VariableKind::continuous) continue;
        ++functions;
        const auto& enc = card.map.variables[f.variable];
        // Dense sweep: a uniform grid over the threshold range plus every
        // threshold and its immediate neighbours.
        std::vector<double> xs;
        const double lo = enc.thresholds.front() - 1.0, hi = enc.thresholds.back() + 1.0;
        for (int k = 0; k <= 2000; ++k) xs.push_back(lo + (hi - lo) * k / 2000.0);
        for (double t : enc.thresholds) {
          xs.push_back(t);
          xs.push_back(std::nextafter(t, -1e300));
          xs.push_back(std::nextafter(t, 1e300));
        }
        std::sort(xs.begin(), xs.end());
        // Points of the rendered bins and of the prediction path.
        auto rendered = [&](double x) {
          for (const auto& b : f.bins) {
            if ((!b.lower || x > *b.lower) && (!b.upper || x <= *b.upper)) return b.points;
          }
          return 0;
        };
        RawRecord rec;
        for (const auto& e : card.map.variables) {
          rec.names.push_back(e.name);
          rec.values.push_back(RawValue{});
        }
        int prev_r = 0, prev_t = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
          ++sweeps;
          rec.values[f.variable] = xs[k];
          const int r = rendered(xs[k]);
          Diagnostics quiet;
          const int total = total_score(card, binarize_record(card.map, rec, &quiet));
          if (k > 0) {
            const bool bad = it->second > 0 ? (r > prev_r || total > prev_t)
                                            : (r < prev_r || total < prev_t);
            if (bad) {
              ++violations;
              if (first.empty()) first = f.name + " at " + to_token(xs[k]);
            }
          }
          prev_r = r;
          prev_t = total;
        }
      }
    }
  }
  Outcome o;
  o.pass = violations == 0 && functions > 0;
  o.detail = fmt("%zu cards, %zu sign-restricted component functions, %zu sweep points, "
                 "%zu violations",
                 cards, functions, sweeps, violations);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// ---- criterion 8 ---------------------------------------------------------

Outcome metrics_cross_oracles() {
  using L = std::vector<int>;
  using V = std::vector<double>;
  std::vector<std::string> failed;
  // Hand-computed examples; tolerance is one rounding of the final division.
  auto exact = [&](const std::string& name, double got, double want) {
    if (!(std::abs(got - want) <= 1e-15)) failed.push_back(name + fmt(" (%.17g)", got));
  };
  exact("auroc perfect", auroc(L{0, 0, 1, 1}, V{0.1, 0.2, 0.3, 0.4}), 1.0);
  exact("auroc ties", auroc(L{0, 1, 0, 1}, V{0.5, 0.5, 0.5, 0.5}), 0.5);
  exact("auroc 0.75", auroc(L{0, 0, 1, 1}, V{0.1, 0.4, 0.35, 0.8}), 0.75);
  exact("auprc perfect", auprc(L{1, 1, 0}, V{0.9, 0.8, 0.1}), 1.0);
  exact("auprc last of 5", auprc(L{0, 0, 0, 0, 1}, V{0.9, 0.8, 0.7, 0.6, 0.5}), 1.0 / 5.0);
  exact("auprc 0.8333", auprc(L{1, 0, 1}, V{0.9, 0.8, 0.7}), (1.0 + 2.0 / 3.0) / 2.0);
  exact("brier perfect", brier(L{1, 0}, V{1.0, 0.0}), 0.0);
  exact("brier 0.25", brier(L{1, 0}, V{0.5, 0.5}), 0.25);
  exact("brier 0.10", brier(L{1, 0}, V{0.8, 0.4}), 0.10);
  exact("hl 2.5", hl_chi2(L{1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, V(10, 0.2), 1).chi2, 2.5);
  {
    L l;
    V p;
    for (int g = 0; g < 10; ++g) {
      for (int i = 0; i < 32; ++i) {
        p.push_back((2.0 * g + 1.0) / 32.0);
        l.push_back(i < 2 * g + 1 ? 1 : 0);
      }
    }
    exact("hl zero", hl_chi2(l, p).chi2, 0.0);
  }
  {
    L l(40, 0);
    for (int i = 0; i < 10; ++i) l[i] = 1;
    exact("smr 1", smr(l, V(40, 0.25)), 1.0);
    exact("smr 0.5", smr(l, V(40, 0.5)), 0.5);
  }
  {
    const auto iso = fit_isotonic(V{0.2, 0.8}, L{0, 1});
    exact("isotonic 0.2", iso(0.2), 0.0);
    exact("isotonic 0.8", iso(0.8), 1.0);
  }

  Rng rng(8888);
  double worst = 0.0;
  std::size_t auc_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 10 + uniform_index(rng, 500);
    L l(n);
    V s(n);
    const bool ties = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? std::round(uniform01(rng) * 20.0) / 20.0 : uniform01(rng);
      l[i] = bernoulli(rng, 0.1 + 0.8 * s[i]) ? 1 : 0;
    }
    l[0] = 1;
    l[1] = 0;
    const double diff = std::abs(auroc(l, s) - oracle::trapezoid_auroc(l, s));
    worst = std::max(worst, diff);
    if (!(diff < 1e-12)) ++auc_failures;
  }

  std::size_t iso_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 300);
    L l(n);
    V p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = std::round(uniform01(rng) * 100.0) / 100.0;
      l[i] = bernoulli(rng, p[i]) ? 1 : 0;
    }
    const auto iso = fit_isotonic(p, l);
    V grid;
    for (int k = -10; k <= 1010; ++k) grid.push_back(k / 1000.0);
    const auto out = apply_isotonic(iso, grid);
    for (std::size_t k = 1; k < out.size(); ++k) {
      if (out[k] < out[k - 1]) {
        ++iso_failures;
        break;
      }
    }
  }
  Outcome o;
  o.pass = failed.empty() && auc_failures == 0 && iso_failures == 0;
  o.detail = fmt("hand examples %zu failed; Mann-Whitney vs trapezoid on 1000 draws: max diff "
                 "%.3g (limit 1e-12), %zu failures; isotonic: %zu non-monotone of 1000 fits",
                 failed.size(), worst, auc_failures, iso_failures);
  for (const auto& f : failed) o.detail += "; " + f;
  return o;
}

// ---- criterion 9 ---------------------------------------------------------

Outcome determinism() {
  TempDir dir;
  const std::string log = dir / "log.txt";
  Outcome o;
  if (run_cli("synth --n 4000 --seed 31 --noise 5 --out " + (dir / "data.csv"), log) != 0) {
    o.detail = "synth failed: " + slurp(log);
    return o;
  }
  const std::string args = "train --data " + (dir / "data.csv") +
                           " --lambda 15 --gamma 6 --seed 11 --validation-fraction 0.25 --cv-folds 2";
  std::vector<std::string> files;
  for (unsigned threads : {1u, 4u, 3u}) {
    const std::string out = dir / ("pool_" + std::to_string(threads) + ".json");
    const int code = run_cli(args + " --threads " + std::to_string(threads) + " --out " + out, log);
    if (code != 0) {
      o.detail = "train failed: " + slurp(log);
      return o;
    }
    files.push_back(slurp(out));
  }
  const bool same = files[0] == files[1] && files[1] == files[2];
  o.pass = same && !files[0].empty();
  o.detail = fmt("pool files from 1, 4, and 3 threads: %s (%zu bytes)",
                 same ? "byte-identical" : "DIFFER", files[0].size());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constraint suite", constraint_suite},
      {"pool tolerance", pool_tolerance},
      {"oracle equivalence", oracle_equivalence},
      {"gradient check", gradient_check},
      {"rounding replay", rounding_replay},
      {"synthetic recovery", synthetic_recovery},
      {"monotonicity", monotonicity},
      {"metrics cross-oracles", metrics_cross_oracles},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all_pass = all_pass && o.pass;
    std::printf("criterion %d [%s] %s: %s\n", id, criteria[k].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
