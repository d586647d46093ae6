#include "riskcard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "kernel.hpp"
#include "riskcard/error.hpp"
#include "riskcard/logistic.hpp"
#include "riskcard/parallel.hpp"

namespace riskcard {

namespace {

std::vector<std::size_t> nonzero_indices(std::span<const double> w) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) s.push_back(j);
  }
  return s;
}

void require_feasible_start(const BinarizedDataset& data, std::span<const std::size_t> support,
                            const ContinuousSolution& init, const ConstraintSet& c) {
  const std::size_t p = data.num_columns();
  if (c.num_coordinates() != p || init.w.size() != p) {
    throw ConstraintViolation("dimension", "solution, constraints and data disagree on p");
  }
  std::vector<char> in_support(p, 0);
  for (std::size_t j : support) {
    if (j >= p) throw ConstraintViolation("support", "support index out of range");
    if (in_support[j]) throw ConstraintViolation("support", "support lists an index twice");
    in_support[j] = 1;
  }
  if (support.size() > c.lambda) {
    throw ConstraintViolation("sparsity", "support of size " + std::to_string(support.size()) +
                                              " exceeds lambda = " + std::to_string(c.lambda));
  }
  if (groups_used(support, c.group_of) > c.gamma) {
    throw ConstraintViolation("group", "support spans more than gamma = " +
                                           std::to_string(c.gamma) + " groups");
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (!in_support[j] && init.w[j] != 0.0) {
      throw ConstraintViolation("support", "initial coefficient " + std::to_string(j) +
                                               " is nonzero outside the support");
    }
  }
  const auto violated = check_feasibility(init.w, init.w0, c);
  if (!violated.empty()) {
    throw ConstraintViolation(violated.front(),
                              "initial solution violates the " + violated.front() + " constraint");
  }
}

// Residual-based gradient of the loss at margins z, restricted to the
// direction the box allows: a coordinate pinned at a zero bound whose
// gradient points out of the box scores 0.
std::vector<double> feasible_gradient_magnitude(const BinarizedDataset& data,
                                                std::span<const double> z,
                                                const ConstraintSet& c) {
  const auto r = detail::residuals(z, data.signed_labels());
  std::vector<double> score(data.num_columns(), 0.0);
  for (std::size_t j = 0; j < score.size(); ++j) {
    double g = 0.0;
    for (std::uint32_t i : data.column(j)) g += r[i];
    if ((c.box[j].lower == 0.0 && g > 0.0) || (c.box[j].upper == 0.0 && g < 0.0)) g = 0.0;
    score[j] = std::abs(g);
  }
  return score;
}

bool by_loss_then_support(const ContinuousSolution& a, const ContinuousSolution& b) {
  if (a.loss != b.loss) return a.loss < b.loss;
  return a.support < b.support;
}

}  // namespace

ContinuousSolution zero_solution(const BinarizedDataset& data) {
  ContinuousSolution s;
  s.w.assign(data.num_columns(), 0.0);
  refresh(s, data);
  return s;
}

void refresh(ContinuousSolution& solution, const BinarizedDataset& data) {
  solution.support = nonzero_indices(solution.w);
  solution.loss = logistic_loss(solution.w, solution.w0, data);
}

ContinuousSolution coordinate_descent(const BinarizedDataset& data,
                                      std::span<const std::size_t> support,
                                      const ContinuousSolution& init, const ConstraintSet& c,
                                      const DescentOptions& options,
                                      std::vector<double>* loss_trace) {
  require_feasible_start(data, support, init, c);
  const auto& y = data.signed_labels();
  if (y.empty()) throw DataError("coordinate descent needs labelled data");

  std::vector<std::size_t> order(support.begin(), support.end());
  std::sort(order.begin(), order.end());

  ContinuousSolution start = init;
  refresh(start, data);

  std::vector<double> w = start.w;
  double w0 = start.w0;
  detail::MarginCache cache(data, w, w0);
  double loss = cache.loss();
  if (loss_trace) {
    loss_trace->clear();
    loss_trace->push_back(loss);
  }

  const auto all_rows = detail::RowSet::everything(data);
  for (int sweep = 0; sweep < options.max_iter; ++sweep) {
    const detail::MarginCache saved_cache = cache;
    const std::vector<double> saved_w = w;
    const double saved_w0 = w0;

    auto update = [&](const detail::RowSet& rows, double& value, Interval box) {
      const double t = cache.line_minimize(rows, box.lower - value, box.upper - value);
      if (t == 0.0) return;
      const double next = std::clamp(value + t, box.lower, box.upper);
      const double delta = next - value;
      value = next;
      if (delta != 0.0) cache.shift(rows, delta);
    };

    update(all_rows, w0, c.intercept_box);
    for (std::size_t j : order) update(detail::RowSet::column(data, j), w[j], c.box[j]);

    cache.resync();
    const double next_loss = cache.loss();
    if (next_loss > loss) {
      cache = saved_cache;
      w = saved_w;
      w0 = saved_w0;
      break;
    }
    const double improvement = loss - next_loss;
    loss = next_loss;
    if (loss_trace) loss_trace->push_back(loss);
    if (improvement < options.tol) break;
  }

  ContinuousSolution out;
  out.w = std::move(w);
  out.w0 = w0;
  refresh(out, data);
  // Guard the descent property against drift in the incrementally updated margins.
  if (out.loss > start.loss) return start;
  return out;
}

ContinuousSolution fit_continuous(const BinarizedDataset& data, const ConstraintSet& c,
                                  const BeamOptions& options) {
  if (options.beam_width < 1) throw ConfigError("beam width must be at least 1");
  validate(c);
  const std::size_t p = data.num_columns();
  const std::size_t width = options.beam_width;
  const std::size_t shortlist = 2 * width;

  ContinuousSolution root = coordinate_descent(data, {}, zero_solution(data), c, options.descent);
  if (c.lambda == 0) return root;

  std::vector<ContinuousSolution> beam{root};
  ContinuousSolution best = root;

  struct Expansion {
    std::size_t parent;
    std::vector<std::size_t> support;
  };

  for (std::size_t round = 0; round < c.lambda; ++round) {
    // Shortlist additions per state, merging identical supports reached from
    // different parents; beam states are sorted, so the first parent wins.
    std::map<std::vector<std::size_t>, std::size_t> seen;
    std::vector<Expansion> expansions;
    for (std::size_t s = 0; s < beam.size(); ++s) {
      const ContinuousSolution& state = beam[s];
      if (state.support.size() >= c.lambda) continue;
      const auto z = detail::margins(data, state.w, state.w0);
      const auto score = feasible_gradient_magnitude(data, z, c);
      std::set<std::size_t> groups;
      for (std::size_t j : state.support) groups.insert(c.group_of[j]);

      std::vector<std::size_t> candidates;
      for (std::size_t j = 0; j < p; ++j) {
        if (state.w[j] != 0.0 || !c.admissible(j) || !(score[j] > 0.0)) continue;
        if (!groups.count(c.group_of[j]) && groups.size() + 1 > c.gamma) continue;
        candidates.push_back(j);
      }
      const std::size_t keep = std::min(shortlist, candidates.size());
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                        candidates.end(), [&](std::size_t a, std::size_t b) {
                          if (score[a] != score[b]) return score[a] > score[b];
                          return a < b;
                        });
      for (std::size_t k = 0; k < keep; ++k) {
        std::vector<std::size_t> support = state.support;
        support.insert(std::upper_bound(support.begin(), support.end(), candidates[k]), candidates[k]);
        if (seen.emplace(support, expansions.size()).second) {
          expansions.push_back({s, std::move(support)});
        }
      }
    }
    if (expansions.empty()) break;

    DescentOptions screening = options.descent;
    screening.max_iter = std::max(1, options.screening_sweeps);
    std::vector<ContinuousSolution> screened(expansions.size());
    parallel_for(expansions.size(), options.threads, [&](std::size_t k) {
      screened[k] = coordinate_descent(data, expansions[k].support, beam[expansions[k].parent], c,
                                       screening);
    });

    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < expansions.size(); ++k) {
      if (screened[k].loss < beam[expansions[k].parent].loss - options.descent.tol) order.push_back(k);
    }
    if (order.empty()) break;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (screened[a].loss != screened[b].loss) return screened[a].loss < screened[b].loss;
      return expansions[a].support < expansions[b].support;
    });
    order.resize(std::min(order.size(), width));

    std::vector<ContinuousSolution> refined(order.size());
    parallel_for(order.size(), options.threads, [&](std::size_t k) {
      const std::size_t e = order[k];
      refined[k] = coordinate_descent(data, expansions[e].support, screened[e], c, options.descent);
    });
    std::sort(refined.begin(), refined.end(), by_loss_then_support);

    std::vector<ContinuousSolution> next;
    std::set<std::vector<std::size_t>> kept;
    for (auto& sol : refined) {
      if (kept.insert(sol.support).second) next.push_back(std::move(sol));
    }
    beam = std::move(next);
    if (by_loss_then_support(beam.front(), best)) best = beam.front();
  }
  return best;
}

}  // namespace riskcard
