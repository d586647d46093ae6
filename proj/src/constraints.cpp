#include "riskcard/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "riskcard/error.hpp"

namespace riskcard {

std::string to_string(Monotone m) {
  switch (m) {
    case Monotone::nonneg:
      return "nonneg";
    case Monotone::nonpos:
      return "nonpos";
    case Monotone::free:
      break;
  }
  return "free";
}

Monotone parse_monotone(const std::string& text) {
  if (text == "free") return Monotone::free;
  if (text == "nonneg") return Monotone::nonneg;
  if (text == "nonpos") return Monotone::nonpos;
  throw ConfigError("unknown monotone direction '" + text + "' (expected free, nonneg or nonpos)");
}

namespace {

Interval restrict_sign(Interval box, Monotone m) {
  if (m == Monotone::nonneg) box.lower = std::max(box.lower, 0.0);
  if (m == Monotone::nonpos) box.upper = std::min(box.upper, 0.0);
  return box;
}

}  // namespace

namespace {

std::string group_label(std::size_t k, std::span<const std::string> names) {
  return k < names.size() ? "variable '" + names[k] + "'" : "group " + std::to_string(k);
}

ConstraintSet build_constraints(std::span<const std::size_t> group_of, std::size_t num_groups,
                                std::size_t lambda, std::size_t gamma, Interval default_box,
                                std::span<const VariableConstraint> per_group,
                                Interval intercept_box, std::span<const std::string> names) {
  ConstraintSet c;
  c.lambda = lambda;
  c.gamma = gamma;
  c.intercept_box = intercept_box;
  c.group_of.assign(group_of.begin(), group_of.end());
  c.monotone.assign(num_groups, Monotone::free);
  std::vector<Interval> group_box(num_groups, default_box);
  for (std::size_t k = 0; k < per_group.size() && k < num_groups; ++k) {
    if (per_group[k].box) group_box[k] = *per_group[k].box;
    c.monotone[k] = per_group[k].monotone;
    // Checked before the sign restriction can hide an inverted box.
    if (group_box[k].lower > group_box[k].upper) {
      throw ConfigError("box of " + group_label(k, names) + " has lower bound above upper bound");
    }
  }
  c.box.resize(group_of.size());
  for (std::size_t j = 0; j < group_of.size(); ++j) {
    if (group_of[j] >= num_groups) throw ConfigError("group index out of range");
    c.box[j] = restrict_sign(group_box[group_of[j]], c.monotone[group_of[j]]);
  }
  validate(c, names);
  return c;
}

}  // namespace

ConstraintSet make_constraints(std::span<const std::size_t> group_of, std::size_t num_groups,
                               std::size_t lambda, std::size_t gamma, Interval default_box,
                               std::span<const VariableConstraint> per_group,
                               Interval intercept_box) {
  return build_constraints(group_of, num_groups, lambda, gamma, default_box, per_group,
                           intercept_box, {});
}

ConstraintSet make_constraints(const BinarizationMap& map, std::size_t lambda, std::size_t gamma,
                               Interval default_box,
                               const std::map<std::string, VariableConstraint>& per_variable,
                               Interval intercept_box) {
  std::vector<VariableConstraint> per_group(map.variables.size());
  std::vector<std::string> names;
  for (const auto& v : map.variables) names.push_back(v.name);
  for (const auto& [name, vc] : per_variable) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw ConfigError("constraint override names unknown variable '" + name + "'");
    }
    per_group[static_cast<std::size_t>(it - names.begin())] = vc;
  }
  const auto group_of = map.group_of();
  return build_constraints(group_of, map.num_groups(), lambda, gamma, default_box, per_group,
                           intercept_box, names);
}

Interval integer_range(Interval box) { return {std::ceil(box.lower), std::floor(box.upper)}; }

void validate(const ConstraintSet& c, std::span<const std::string> group_names) {
  const std::size_t p = c.box.size();
  if (c.group_of.size() != p) throw ConfigError("group assignment does not cover every coordinate");
  if (c.lambda > p) {
    throw ConfigError("lambda = " + std::to_string(c.lambda) + " exceeds the number of splits (" +
                      std::to_string(p) + ")");
  }
  if (c.gamma > c.num_groups()) {
    throw ConfigError("gamma = " + std::to_string(c.gamma) + " exceeds the number of variables (" +
                      std::to_string(c.num_groups()) + ")");
  }
  auto check_box = [](Interval b, const std::string& what) {
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper)) {
      throw ConfigError(what + " must be finite");
    }
    if (b.lower > b.upper) throw ConfigError(what + " has lower bound above upper bound");
    const Interval ints = integer_range(b);
    if (ints.lower > ints.upper) {
      throw ConfigError(what + " [" + std::to_string(b.lower) + ", " + std::to_string(b.upper) +
                        "] contains no integer");
    }
  };
  check_box(c.intercept_box, "intercept box");
  for (std::size_t j = 0; j < p; ++j) {
    const std::string what = "box of " + group_label(c.group_of[j], group_names);
    check_box(c.box[j], what);
    if (!c.box[j].contains(0.0)) throw ConfigError(what + " must contain 0");
  }
}

std::size_t groups_used(std::span<const std::size_t> support,
                        std::span<const std::size_t> group_of) {
  std::vector<std::size_t> groups;
  groups.reserve(support.size());
  for (std::size_t j : support) groups.push_back(group_of[j]);
  std::sort(groups.begin(), groups.end());
  return static_cast<std::size_t>(std::unique(groups.begin(), groups.end()) - groups.begin());
}

std::vector<std::string> check_feasibility(std::span<const double> w, double w0,
                                           const ConstraintSet& c, bool require_integral) {
  std::vector<std::string> violated;
  auto flag = [&](const char* name) {
    if (std::find(violated.begin(), violated.end(), name) == violated.end()) violated.push_back(name);
  };
  if (w.size() != c.box.size()) {
    flag("dimension");
    return violated;
  }
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!std::isfinite(w[j])) flag("box");
    if (w[j] != 0.0) support.push_back(j);
    if (!c.box[j].contains(w[j])) flag("box");
    const Monotone m = c.monotone[c.group_of[j]];
    if ((m == Monotone::nonneg && w[j] < 0.0) || (m == Monotone::nonpos && w[j] > 0.0)) {
      flag("monotone");
    }
    if (require_integral && w[j] != std::floor(w[j])) flag("integrality");
  }
  if (support.size() > c.lambda) flag("sparsity");
  if (groups_used(support, c.group_of) > c.gamma) flag("group");
  if (!std::isfinite(w0) || !c.intercept_box.contains(w0)) flag("intercept_box");
  if (require_integral && w0 != std::floor(w0)) flag("integrality");
  return violated;
}

}  // namespace riskcard
