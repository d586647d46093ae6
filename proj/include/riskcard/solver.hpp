#pragma once

#include <span>
#include <vector>

#include "riskcard/binarize.hpp"
#include "riskcard/constraints.hpp"

namespace riskcard {

// Real-valued coefficients with their nonzero set and training loss (m = 1).
struct ContinuousSolution {
  std::vector<double> w;
  double w0 = 0.0;
  std::vector<std::size_t> support;  // sorted indices with w_j != 0
  double loss = 0.0;

  bool operator==(const ContinuousSolution&) const = default;
};

// All-zero solution of dimension p with its loss on `data`.
ContinuousSolution zero_solution(const BinarizedDataset& data);

// Recomputes `support` and `loss` from (w, w0).
void refresh(ContinuousSolution& solution, const BinarizedDataset& data);

struct DescentOptions {
  double tol = 1e-8;   // stop when one sweep improves the loss by less
  int max_iter = 100;  // sweeps
};

// Box-projected cyclic coordinate descent over `support` plus the intercept.
// Every coordinate update exactly minimizes the loss along that coordinate
// within its box. Coordinates outside `support` must be zero in `init` and stay
// zero. When given, `loss_trace` receives the loss after each sweep, starting
// with the initial loss.
//
// Throws ConstraintViolation when `support` or `init` is infeasible.
ContinuousSolution coordinate_descent(const BinarizedDataset& data,
                                      std::span<const std::size_t> support,
                                      const ContinuousSolution& init,
                                      const ConstraintSet& constraints,
                                      const DescentOptions& options = {},
                                      std::vector<double>* loss_trace = nullptr);

struct BeamOptions {
  std::size_t beam_width = 10;
  DescentOptions descent;
  // Sweeps spent on each shortlisted candidate before the beam is cut; the
  // kept supports are then refined to `descent` convergence.
  int screening_sweeps = 2;
  unsigned threads = 1;
};

// Near-optimal solution under every constraint, found by beam search over
// supports grown one coordinate at a time. Candidates are shortlisted by
// gradient magnitude (2 * beam_width per state, ties to the lower index).
ContinuousSolution fit_continuous(const BinarizedDataset& data,
                                  const ConstraintSet& constraints,
                                  const BeamOptions& options = {});

}  // namespace riskcard
