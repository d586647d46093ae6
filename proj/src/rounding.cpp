#include "riskcard/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernel.hpp"
#include "riskcard/error.hpp"
#include "riskcard/logistic.hpp"
#include "riskcard/parallel.hpp"

namespace riskcard {

std::vector<std::size_t> IntegerRiskScore::support() const {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0) s.push_back(j);
  }
  return s;
}

std::vector<double> multiplier_grid(std::span<const double> w_star, const ConstraintSet& c,
                                    std::size_t num_multipliers) {
  if (num_multipliers < 1) throw ConfigError("the multiplier grid needs at least one point");
  double w_norm = 0.0;
  for (double v : w_star) w_norm = std::max(w_norm, std::abs(v));
  double bound = 0.0;
  for (const Interval& b : c.box) bound = std::max({bound, std::abs(b.lower), std::abs(b.upper)});
  if (w_norm == 0.0 || num_multipliers == 1) return {1.0};
  const double m_max = bound / w_norm;
  if (!(m_max > 1.0)) return {1.0};
  std::vector<double> grid(num_multipliers);
  const double step = (m_max - 1.0) / static_cast<double>(num_multipliers - 1);
  for (std::size_t k = 0; k < num_multipliers; ++k) grid[k] = 1.0 + static_cast<double>(k) * step;
  grid.back() = m_max;
  return grid;
}

IntegerRiskScore sequential_round(const ContinuousSolution& solution, const BinarizedDataset& data,
                                  double m, const ConstraintSet& c,
                                  std::vector<RoundingStep>* trace) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("multiplier must be positive and finite");
  const auto violated = check_feasibility(solution.w, solution.w0, c);
  if (!violated.empty()) {
    throw ConstraintViolation(violated.front(), "solution to round violates the " +
                                                    violated.front() + " constraint");
  }
  const auto& y = data.signed_labels();
  const std::size_t p = data.num_columns();

  std::vector<double> value(p, 0.0);
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < p; ++j) {
    if (solution.w[j] != 0.0) {
      value[j] = m * solution.w[j];
      order.push_back(j);
    }
  }
  double intercept = m * solution.w0;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(value[a]) > std::abs(value[b]);
  });
  std::vector<double> z = detail::margins(data, value, intercept);
  if (trace) trace->clear();

  auto round_one = [&](const detail::RowSet& rows, double& v, Interval box,
                       std::optional<std::size_t> coordinate) {
    const Interval ints = integer_range(box);
    const double lo = std::clamp(std::floor(v), ints.lower, ints.upper);
    const double hi = std::clamp(std::ceil(v), ints.lower, ints.upper);
    double chosen = lo;
    if (lo != hi) {
      const double loss_lo = detail::partial_loss(rows, z, y, lo - v, m);
      const double loss_hi = detail::partial_loss(rows, z, y, hi - v, m);
      if (loss_hi < loss_lo || (loss_hi == loss_lo && std::abs(hi) < std::abs(lo))) chosen = hi;
    }
    if (trace) {
      trace->push_back({coordinate, v, static_cast<int>(lo), static_cast<int>(hi),
                        static_cast<int>(chosen)});
    }
    const double delta = chosen - v;
    v = chosen;
    if (delta != 0.0) rows.for_each([&](std::size_t i) { z[i] += delta; });
  };

  for (std::size_t j : order) round_one(detail::RowSet::column(data, j), value[j], c.box[j], j);
  round_one(detail::RowSet::everything(data), intercept, c.intercept_box, std::nullopt);

  IntegerRiskScore out;
  out.w.resize(p);
  for (std::size_t j = 0; j < p; ++j) out.w[j] = static_cast<int>(value[j]);
  out.w0 = static_cast<int>(intercept);
  out.m = m;
  out.loss = logistic_loss(value, intercept, data, m);
  out.grid_multipliers = {m};
  out.grid_losses = {out.loss};
  return out;
}

std::vector<IntegerRiskScore> round_pool(const SolutionPool& pool, const BinarizedDataset& data,
                                         const ConstraintSet& c, std::size_t num_multipliers,
                                         unsigned threads) {
  if (pool.entries.empty()) throw ConfigError("cannot round an empty pool");
  struct Job {
    std::size_t entry;
    double m;
  };
  std::vector<std::vector<double>> grids;
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < pool.entries.size(); ++t) {
    grids.push_back(multiplier_grid(pool.entries[t].w, c, num_multipliers));
    for (double m : grids.back()) jobs.push_back({t, m});
  }
  std::vector<IntegerRiskScore> rounded(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t k) {
    rounded[k] = sequential_round(pool.entries[jobs[k].entry], data, jobs[k].m, c);
  });

  std::vector<IntegerRiskScore> out;
  std::size_t k = 0;
  for (std::size_t t = 0; t < pool.entries.size(); ++t) {
    std::size_t best = k;
    std::vector<double> losses;
    for (std::size_t g = 0; g < grids[t].size(); ++g, ++k) {
      losses.push_back(rounded[k].loss);
      if (rounded[k].loss < rounded[best].loss) best = k;
    }
    IntegerRiskScore score = std::move(rounded[best]);
    score.provenance = t;
    score.grid_multipliers = grids[t];
    score.grid_losses = std::move(losses);
    out.push_back(std::move(score));
  }
  std::stable_sort(out.begin(), out.end(), [](const IntegerRiskScore& a, const IntegerRiskScore& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.provenance < b.provenance;
  });
  return out;
}

}  // namespace riskcard
