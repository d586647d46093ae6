#pragma once

#include <optional>
#include <span>
#include <vector>

#include "riskcard/pool.hpp"

namespace riskcard {

// Integer scorecard coefficients with multiplier m and loss on D/m.
struct IntegerRiskScore {
  std::vector<int> w;
  int w0 = 0;
  double m = 1.0;
  double loss = 0.0;
  std::size_t provenance = 0;  // index of the source pool entry
  // Every multiplier tried and the loss of its rounded solution.
  std::vector<double> grid_multipliers;
  std::vector<double> grid_losses;

  std::vector<std::size_t> support() const;
  std::vector<double> as_real() const { return {w.begin(), w.end()}; }

  bool operator==(const IntegerRiskScore&) const = default;
};

inline constexpr std::size_t kDefaultMultipliers = 25;

// N_m equally spaced multipliers from 1 to max(|a|, |b|) / max|w*|, or {1}
// when that range is empty or w* = 0.
std::vector<double> multiplier_grid(std::span<const double> w_star,
                                    const ConstraintSet& constraints,
                                    std::size_t num_multipliers);

// One greedy rounding decision.
struct RoundingStep {
  std::optional<std::size_t> coordinate;  // nullopt is the intercept
  double scaled_value = 0.0;              // value being rounded
  int floor_value = 0;                    // after clipping to the box
  int ceil_value = 0;
  int chosen = 0;
};

// Scales (w, w0) by m and rounds coordinates one at a time, largest
// |scaled coefficient| first and the intercept last, each to whichever of
// floor and ceil gives the lower loss on D/m with the others held fixed.
// Ties go to the smaller magnitude.
IntegerRiskScore sequential_round(const ContinuousSolution& solution,
                                  const BinarizedDataset& data, double m,
                                  const ConstraintSet& constraints,
                                  std::vector<RoundingStep>* trace = nullptr);

// Rounds every pool entry at every grid multiplier and keeps, per entry, the
// lowest-loss result. Sorted by loss, then provenance.
std::vector<IntegerRiskScore> round_pool(const SolutionPool& pool,
                                         const BinarizedDataset& data,
                                         const ConstraintSet& constraints,
                                         std::size_t num_multipliers = kDefaultMultipliers,
                                         unsigned threads = 1);

}  // namespace riskcard
