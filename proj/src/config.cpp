#include "riskcard/config.hpp"

#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "riskcard/error.hpp"

namespace riskcard {

namespace pt = boost::property_tree;

namespace {

template <class T>
void read_key(const pt::ptree& section, const std::string& section_name, const char* key,
              T& out) {
  const auto value = section.get_optional<std::string>(key);
  if (!value) return;
  const auto parsed = section.get_optional<T>(key);
  if (!parsed) {
    throw ConfigError("[" + section_name + "] " + key + ": cannot parse '" + *value + "'");
  }
  out = *parsed;
}

template <class T>
void read_key(const pt::ptree& section, const std::string& section_name, const char* key,
              std::optional<T>& out) {
  T value{};
  if (section.get_optional<std::string>(key)) {
    read_key(section, section_name, key, value);
    out = value;
  }
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : section) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("[" + name + "]: unknown key '" + key + "'");
    }
  }
}

}  // namespace

void load_config(std::istream& in, RunConfig& config) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("line " + std::to_string(e.line()), e.message());
  }
  for (const auto& [name, section] : tree) {
    if (name == "train") {
      reject_unknown(section, name,
                     {"lambda", "gamma", "seed", "label", "bins_per_variable", "beam_width",
                      "epsilon_u", "swap_candidates", "pool_size", "multipliers", "swap_passes",
                      "screening_sweeps", "cv_folds", "validation_fraction", "tol", "max_iter",
                      "threads"});
      read_key(section, name, "lambda", config.lambda);
      read_key(section, name, "gamma", config.gamma);
      read_key(section, name, "seed", config.seed);
      read_key(section, name, "label", config.label);
      read_key(section, name, "bins_per_variable", config.bins_per_variable);
      read_key(section, name, "beam_width", config.beam_width);
      read_key(section, name, "epsilon_u", config.epsilon_u);
      read_key(section, name, "swap_candidates", config.swap_candidates);
      read_key(section, name, "pool_size", config.pool_size);
      read_key(section, name, "multipliers", config.multipliers);
      read_key(section, name, "swap_passes", config.swap_passes);
      read_key(section, name, "screening_sweeps", config.screening_sweeps);
      read_key(section, name, "cv_folds", config.cv_folds);
      read_key(section, name, "validation_fraction", config.validation_fraction);
      read_key(section, name, "tol", config.tol);
      read_key(section, name, "max_iter", config.max_iter);
      read_key(section, name, "threads", config.threads);
    } else if (name == "box") {
      reject_unknown(section, name, {"lower", "upper", "intercept_lower", "intercept_upper"});
      read_key(section, name, "lower", config.box.lower);
      read_key(section, name, "upper", config.box.upper);
      read_key(section, name, "intercept_lower", config.intercept_box.lower);
      read_key(section, name, "intercept_upper", config.intercept_box.upper);
    } else if (name.rfind("variable ", 0) == 0) {
      const std::string variable = name.substr(9);
      if (variable.empty()) throw ConfigError("[variable]: missing variable name");
      reject_unknown(section, name, {"lower", "upper", "monotone", "kind"});
      const bool has_lower = section.get_optional<std::string>("lower").has_value();
      const bool has_upper = section.get_optional<std::string>("upper").has_value();
      VariableConstraint& vc = config.variables[variable];
      if (has_lower != has_upper) {
        throw ConfigError("[" + name + "]: lower and upper must be given together");
      }
      if (has_lower) {
        Interval box;
        read_key(section, name, "lower", box.lower);
        read_key(section, name, "upper", box.upper);
        vc.box = box;
      }
      if (auto m = section.get_optional<std::string>("monotone")) vc.monotone = parse_monotone(*m);
      if (auto k = section.get_optional<std::string>("kind")) {
        config.schema[variable] = parse_variable_kind(*k);
      }
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config(in, config);
}

void load_schema_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file '" + path + "'");
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path + ":" + std::to_string(e.line()), e.message());
  }
  for (const auto& [name, value] : tree) {
    if (!value.empty()) throw ConfigError("schema file must not contain sections");
    config.schema[name] = parse_variable_kind(value.data());
  }
}

void check(const RunConfig& c) {
  if (!c.lambda) throw ConfigError("lambda is required");
  if (!c.gamma) throw ConfigError("gamma is required");
  if (!c.seed) throw ConfigError("seed is required");
  if (*c.lambda < 1) throw ConfigError("lambda must be at least 1");
  if (*c.gamma < 1) throw ConfigError("gamma must be at least 1");
  if (c.bins_per_variable < 2) throw ConfigError("bins_per_variable must be at least 2");
  if (c.beam_width < 1) throw ConfigError("beam_width must be at least 1");
  if (!(c.epsilon_u >= 0.0) || !std::isfinite(c.epsilon_u)) {
    throw ConfigError("epsilon_u must be a finite nonnegative number");
  }
  if (c.pool_size < 1) throw ConfigError("pool_size must be at least 1");
  if (c.multipliers < 1) throw ConfigError("multipliers must be at least 1");
  if (c.screening_sweeps < 1) throw ConfigError("screening_sweeps must be at least 1");
  if (c.cv_folds == 1) throw ConfigError("cv_folds must be 0 or at least 2");
  if (!(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must be in [0, 1)");
  }
  if (!(c.tol >= 0.0)) throw ConfigError("tol must be nonnegative");
  if (c.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (c.label.empty()) throw ConfigError("label column name is empty");
}

DescentOptions descent_options(const RunConfig& c) { return {c.tol, c.max_iter}; }

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, vc] : c.variables) {
    nlohmann::json v{{"monotone", to_string(vc.monotone)}};
    if (vc.box) v["box"] = {vc.box->lower, vc.box->upper};
    vars[name] = v;
  }
  nlohmann::json schema = nlohmann::json::object();
  for (const auto& [name, kind] : c.schema) schema[name] = to_string(kind);
  nlohmann::json doc{{"label", c.label},
                     {"bins_per_variable", c.bins_per_variable},
                     {"beam_width", c.beam_width},
                     {"epsilon_u", c.epsilon_u},
                     {"swap_candidates", c.swap_candidates},
                     {"pool_size", c.pool_size},
                     {"multipliers", c.multipliers},
                     {"swap_passes", c.swap_passes},
                     {"screening_sweeps", c.screening_sweeps},
                     {"cv_folds", c.cv_folds},
                     {"validation_fraction", c.validation_fraction},
                     {"tol", c.tol},
                     {"max_iter", c.max_iter},
                     {"box", {c.box.lower, c.box.upper}},
                     {"intercept_box", {c.intercept_box.lower, c.intercept_box.upper}},
                     {"variables", vars},
                     {"schema", schema}};
  doc["lambda"] = c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json();
  doc["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json();
  doc["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json();
  return doc;
}

}  // namespace riskcard
