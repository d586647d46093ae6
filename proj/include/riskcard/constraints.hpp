#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "riskcard/binarize.hpp"

namespace riskcard {

enum class Monotone { free, nonneg, nonpos };

std::string to_string(Monotone m);
Monotone parse_monotone(const std::string& text);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
  bool operator==(const Interval&) const = default;
};

inline constexpr Interval kDefaultBox{-5.0, 5.0};
inline constexpr Interval kDefaultInterceptBox{-100.0, 100.0};

// Sparsity, group sparsity, box, and monotone-sign constraints over p split
// coefficients. `box` holds the effective intervals, i.e. already intersected
// with the sign restriction of each coordinate's group.
struct ConstraintSet {
  std::size_t lambda = 0;
  std::size_t gamma = 0;
  std::vector<Interval> box;
  Interval intercept_box = kDefaultInterceptBox;
  std::vector<Monotone> monotone;     // per group
  std::vector<std::size_t> group_of;  // per coordinate

  std::size_t num_coordinates() const noexcept { return box.size(); }
  std::size_t num_groups() const noexcept { return monotone.size(); }
  // A coordinate whose effective box is {0} can never enter a support.
  bool admissible(std::size_t j) const {
    return !(box[j].lower == 0.0 && box[j].upper == 0.0);
  }

  bool operator==(const ConstraintSet&) const = default;
};

// Per-variable override of the default box and sign restriction.
struct VariableConstraint {
  std::optional<Interval> box;
  Monotone monotone = Monotone::free;
};

// Builds constraints for the coordinates of `map`. Throws ConfigError when
// an override names an unknown variable or validation fails.
ConstraintSet make_constraints(
    const BinarizationMap& map, std::size_t lambda, std::size_t gamma,
    Interval default_box = kDefaultBox,
    const std::map<std::string, VariableConstraint>& per_variable = {},
    Interval intercept_box = kDefaultInterceptBox);

// Same, addressed by group index; `per_group` may be shorter than the number
// of groups.
ConstraintSet make_constraints(std::span<const std::size_t> group_of,
                               std::size_t num_groups, std::size_t lambda,
                               std::size_t gamma, Interval default_box = kDefaultBox,
                               std::span<const VariableConstraint> per_group = {},
                               Interval intercept_box = kDefaultInterceptBox);

// Rejects constraint sets that admit no valid scorecard: lambda > p,
// gamma > number of groups, inverted or zero-excluding boxes, and boxes
// without an integer value. `group_names` only improves messages.
void validate(const ConstraintSet& constraints, std::span<const std::string> group_names = {});

// Smallest and largest integers inside an interval.
Interval integer_range(Interval box);

// Names of every violated constraint ("sparsity", "group", "box",
// "intercept_box", "monotone", "integrality"); empty means feasible.
std::vector<std::string> check_feasibility(std::span<const double> w, double w0,
                                           const ConstraintSet& constraints,
                                           bool require_integral = false);

// Number of groups with at least one coordinate in `support`.
std::size_t groups_used(std::span<const std::size_t> support,
                        std::span<const std::size_t> group_of);

}  // namespace riskcard
