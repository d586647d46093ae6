#include "riskcard/pool.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kernel.hpp"
#include "riskcard/error.hpp"
#include "riskcard/parallel.hpp"

namespace riskcard {

namespace {

struct SwapJob {
  std::size_t source;  // index into the current frontier
  std::size_t removed;
  std::vector<std::size_t> support;
};

bool by_loss_then_support(const ContinuousSolution& a, const ContinuousSolution& b) {
  if (a.loss != b.loss) return a.loss < b.loss;
  return a.support < b.support;
}

}  // namespace

SolutionPool generate_pool(const ContinuousSolution& base_in, const BinarizedDataset& data,
                           const ConstraintSet& c, const PoolOptions& options) {
  ContinuousSolution base = base_in;
  refresh(base, data);
  if (!(options.epsilon_u >= 0.0)) throw ConfigError("epsilon_u must be nonnegative");
  if (options.pool_size < 1) throw ConfigError("pool size M must be at least 1");
  if (options.swap_candidates < 1) throw ConfigError("swap candidate count T must be at least 1");
  {
    const auto violated = check_feasibility(base.w, base.w0, c);
    if (!violated.empty()) {
      throw ConstraintViolation(violated.front(), "base solution violates the " + violated.front() +
                                                      " constraint");
    }
  }

  SolutionPool pool;
  pool.epsilon_u = options.epsilon_u;
  pool.base_loss = base.loss;
  const double limit = (1.0 + options.epsilon_u) * base.loss;
  const std::size_t p = data.num_columns();

  std::set<std::vector<std::size_t>> seen{base.support};
  std::vector<ContinuousSolution> harvest;
  std::vector<ContinuousSolution> frontier{base};

  for (std::size_t pass = 0; pass < options.passes && !frontier.empty(); ++pass) {
    std::vector<SwapJob> jobs;
    std::vector<ContinuousSolution> reduced_solutions;
    std::vector<std::size_t> reduced_of_job;
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const ContinuousSolution& from = frontier[f];
      for (std::size_t removed : from.support) {
        ContinuousSolution reduced = from;
        reduced.w[removed] = 0.0;
        std::vector<std::size_t> kept_support;
        for (std::size_t j : from.support) {
          if (j != removed) kept_support.push_back(j);
        }
        reduced.support = kept_support;
        const auto z = detail::margins(data, reduced.w, reduced.w0);
        const auto r = detail::residuals(z, data.signed_labels());
        std::set<std::size_t> groups;
        for (std::size_t j : kept_support) groups.insert(c.group_of[j]);

        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t j = 0; j < p; ++j) {
          if (from.w[j] != 0.0 || !c.admissible(j)) continue;
          if (!groups.count(c.group_of[j]) && groups.size() + 1 > c.gamma) continue;
          double g = 0.0;
          for (std::uint32_t i : data.column(j)) g += r[i];
          if ((c.box[j].lower == 0.0 && g > 0.0) || (c.box[j].upper == 0.0 && g < 0.0)) g = 0.0;
          if (std::abs(g) > 0.0) ranked.emplace_back(std::abs(g), j);
        }
        const std::size_t take = std::min(options.swap_candidates, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take),
                          ranked.end(), [](const auto& a, const auto& b) {
                            if (a.first != b.first) return a.first > b.first;
                            return a.second < b.second;
                          });
        const std::size_t reduced_index = reduced_solutions.size();
        reduced_solutions.push_back(std::move(reduced));
        for (std::size_t k = 0; k < take; ++k) {
          std::vector<std::size_t> support = kept_support;
          const std::size_t added = ranked[k].second;
          support.insert(std::upper_bound(support.begin(), support.end(), added), added);
          jobs.push_back({f, removed, std::move(support)});
          reduced_of_job.push_back(reduced_index);
        }
      }
    }

    std::vector<ContinuousSolution> results(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
      results[k] = coordinate_descent(data, jobs[k].support, reduced_solutions[reduced_of_job[k]], c,
                                      options.descent);
    });

    std::vector<ContinuousSolution> next_frontier;
    for (auto& sol : results) {
      if (!(sol.loss <= limit)) continue;
      if (!check_feasibility(sol.w, sol.w0, c).empty()) continue;
      if (!seen.insert(sol.support).second) continue;
      harvest.push_back(sol);
      next_frontier.push_back(std::move(sol));
    }
    frontier = std::move(next_frontier);
  }

  std::sort(harvest.begin(), harvest.end(), by_loss_then_support);
  pool.entries.push_back(base);
  for (std::size_t k = 0; k < harvest.size() && pool.entries.size() < options.pool_size; ++k) {
    pool.entries.push_back(std::move(harvest[k]));
  }
  std::stable_sort(pool.entries.begin(), pool.entries.end(), by_loss_then_support);
  return pool;
}

}  // namespace riskcard
