#pragma once

#include <vector>

#include "riskcard/solver.hpp"

namespace riskcard {

// Support-distinct continuous solutions within (1 + epsilon_u) of base_loss,
// sorted by loss and then lexicographically by support.
struct SolutionPool {
  std::vector<ContinuousSolution> entries;
  double epsilon_u = 0.0;
  double base_loss = 0.0;
};

struct PoolOptions {
  double epsilon_u = 0.3;
  std::size_t swap_candidates = 10;  // T
  std::size_t pool_size = 10;        // M
  // Swap passes; pass k > 1 swaps out of every solution found in pass k - 1.
  std::size_t passes = 1;
  DescentOptions descent;
  unsigned threads = 1;
};

// Single-coordinate swaps out of `base`: for each support index, the
// `swap_candidates` non-support coordinates with the largest gradient at the
// reduced solution are tried, refined by coordinate descent, and kept when
// their loss stays within the tolerance. `base` is always kept.
SolutionPool generate_pool(const ContinuousSolution& base,
                           const BinarizedDataset& data,
                           const ConstraintSet& constraints,
                           const PoolOptions& options = {});

}  // namespace riskcard
