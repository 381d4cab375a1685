#include "nlod/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nlod/errors.hpp"

namespace nlod {

namespace {

using nlohmann::json;

const std::set<std::string>& known_commands() {
  static const std::set<std::string> commands = {
      "solve-hard",  "solve-soft",   "optimize-hard", "optimize-soft",
      "oracle",      "continuation", "gamma-limit",   "bbm-check"};
  return commands;
}

json parse_strict_json(const std::string& text) {
  std::vector<std::set<std::string>> object_keys;
  json::parser_callback_t cb = [&](int /*depth*/, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      object_keys.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      object_keys.pop_back();
    } else if (event == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!object_keys.back().insert(key).second) {
        throw ValidationError("duplicate key '" + key + "' in configuration");
      }
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("configuration is not valid JSON: ") + e.what());
  }
}

/// Strict field access: every schema lookup registers the key as known, and
/// finish() rejects any present-but-never-requested key by name.
class Reader {
 public:
  Reader(const json& object, std::string where) : object_(object), where_(std::move(where)) {}

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) require(key, "a number");
    return v->get<double>();
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) require(key, "an integer");
    return v->get<long long>();
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!(v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0))) {
      require(key, "a nonnegative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) require(key, "a boolean");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) require(key, "a string");
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> number_array(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) require(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) require(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<std::vector<int>> integer_array(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) require(key, "an array of integers");
    std::vector<int> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) require(key, "an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const json* object(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return nullptr;
    if (!v->is_object()) require(key, "an object");
    return v;
  }

  const json* raw(const std::string& key) { return find(key); }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (known_.count(item.key()) == 0) {
        throw ValidationError("unknown key '" + item.key() + "' in " + where_);
      }
    }
  }

 private:
  const json* find(const std::string& key) {
    known_.insert(key);
    if (!object_.contains(key)) return nullptr;
    return &object_.at(key);
  }

  [[noreturn]] void require(const std::string& key, const char* what) const {
    throw ValidationError("key '" + key + "' in " + where_ + " must be " + what);
  }

  const json& object_;
  std::string where_;
  std::set<std::string> known_;
};

Domain parse_domain(const json& j) {
  if (!j.is_object()) {
    throw ValidationError("key 'domain' in configuration must be an object");
  }
  Reader r(j, "domain");
  const std::string kind = r.string("kind").value_or("interval");
  if (kind == "interval") {
    const auto bounds = r.number_array("bounds").value_or(std::vector<double>{0.0, 1.0});
    r.finish();
    if (bounds.size() != 2) {
      throw ValidationError("interval domain bounds must be [low, high]");
    }
    return make_interval(bounds[0], bounds[1]);
  }
  if (kind == "rectangle") {
    const json* b = r.raw("bounds");
    r.finish();
    if (b == nullptr || !b->is_array() || b->size() != 2) {
      throw ValidationError("rectangle domain bounds must be [[x_low, x_high], [y_low, y_high]]");
    }
    double v[2][2];
    for (int axis = 0; axis < 2; ++axis) {
      const json& side = (*b)[static_cast<std::size_t>(axis)];
      if (!side.is_array() || side.size() != 2 || !side[0].is_number() || !side[1].is_number()) {
        throw ValidationError(
            "rectangle domain bounds must be [[x_low, x_high], [y_low, y_high]]");
      }
      v[axis][0] = side[0].get<double>();
      v[axis][1] = side[1].get<double>();
    }
    return make_rectangle(v[0][0], v[0][1], v[1][0], v[1][1]);
  }
  throw ValidationError("domain kind must be 'interval' or 'rectangle', got '" + kind + "'");
}

SolverOptions parse_solver(const json& j) {
  if (!j.is_object()) {
    throw ValidationError("key 'solver' in configuration must be an object");
  }
  Reader r(j, "solver");
  SolverOptions opts;
  if (const auto v = r.number("tol_lambda")) opts.tol_lambda = *v;
  if (const auto v = r.number("tol_residual")) opts.tol_residual = *v;
  if (const auto v = r.integer("max_iterations")) opts.max_iterations = static_cast<int>(*v);
  if (const auto v = r.unsigned_integer("seed")) opts.seed = *v;
  if (const auto v = r.string("p2_mode")) {
    if (*v == "exact") {
      opts.p2_mode = P2Mode::exact;
    } else if (*v == "iterative") {
      opts.p2_mode = P2Mode::iterative;
    } else {
      throw ValidationError("key 'p2_mode' in solver must be 'exact' or 'iterative', got '" + *v +
                            "'");
    }
  }
  r.finish();
  return opts;
}

bool command_allows(const std::string& command, const std::string& key) {
  auto in = [&](std::initializer_list<const char*> cmds) {
    for (const char* c : cmds) {
      if (command == c) return true;
    }
    return false;
  };
  if (key == "s") {
    return in({"solve-hard", "solve-soft", "optimize-hard", "optimize-soft", "oracle",
               "continuation"});
  }
  if (key == "s_values") return in({"gamma-limit", "bbm-check"});
  if (key == "alpha") {
    return in({"solve-hard", "solve-soft", "optimize-hard", "optimize-soft", "oracle",
               "continuation", "gamma-limit"});
  }
  if (key == "sigma") return in({"solve-soft", "optimize-soft", "oracle"});
  if (key == "sigma_values") return in({"continuation"});
  if (key == "design_cells") return in({"solve-hard", "solve-soft"});
  if (key == "design_values") return in({"solve-soft"});
  if (key == "max_outer_iterations" || key == "multistart" || key == "local_search") {
    return in({"optimize-hard", "optimize-soft", "continuation", "gamma-limit"});
  }
  if (key == "profile") return in({"bbm-check"});
  if (key == "quadrature") return in({"gamma-limit"});
  return true;  // domain, cells, p, solver are common
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& command) {
  if (known_commands().count(command) == 0) {
    throw ValidationError("unknown command '" + command + "'");
  }
  const json doc = parse_strict_json(text);
  if (!doc.is_object()) {
    throw ValidationError("configuration must be a single top-level object");
  }

  RunConfig cfg;
  Reader r(doc, "configuration");

  if (const json* d = r.object("domain")) cfg.domain = parse_domain(*d);

  // "cells" accepts a single integer (1D) or one count per axis.
  if (const json* c = r.raw("cells")) {
    if (c->is_number_integer()) {
      cfg.cells = {c->get<int>()};
    } else if (c->is_array()) {
      cfg.cells.clear();
      for (const auto& e : *c) {
        if (!e.is_number_integer()) {
          throw ValidationError("key 'cells' in configuration must be an integer or integer array");
        }
        cfg.cells.push_back(e.get<int>());
      }
    } else {
      throw ValidationError("key 'cells' in configuration must be an integer or integer array");
    }
  } else {
    cfg.cells = std::vector<int>(static_cast<std::size_t>(cfg.domain.dim()), 48);
  }

  if (const auto v = r.number("p")) cfg.p = *v;
  if (const json* sv = r.object("solver")) cfg.solver = parse_solver(*sv);

  auto reject_unless_allowed = [&](const std::string& key) {
    if (!command_allows(command, key)) {
      throw ValidationError("key '" + key + "' does not apply to the '" + command + "' command");
    }
  };

  if (const auto v = r.number("s")) {
    reject_unless_allowed("s");
    cfg.s = *v;
  }
  if (const auto v = r.number_array("s_values")) {
    reject_unless_allowed("s_values");
    cfg.s_values = *v;
  }
  if (const auto v = r.number("alpha")) {
    reject_unless_allowed("alpha");
    cfg.alpha = *v;
  }
  if (const auto v = r.number("sigma")) {
    reject_unless_allowed("sigma");
    cfg.sigma = *v;
  }
  if (const auto v = r.number_array("sigma_values")) {
    reject_unless_allowed("sigma_values");
    cfg.sigma_values = *v;
  }
  if (const auto v = r.integer_array("design_cells")) {
    reject_unless_allowed("design_cells");
    cfg.design_cells = *v;
  }
  if (const auto v = r.number_array("design_values")) {
    reject_unless_allowed("design_values");
    cfg.design_values = *v;
  }
  if (const auto v = r.integer("max_outer_iterations")) {
    reject_unless_allowed("max_outer_iterations");
    cfg.max_outer_iterations = static_cast<int>(*v);
  }
  if (const auto v = r.boolean("multistart")) {
    reject_unless_allowed("multistart");
    cfg.multistart = *v;
  }
  if (const auto v = r.boolean("local_search")) {
    reject_unless_allowed("local_search");
    cfg.local_search = *v;
  }
  if (const auto v = r.string("profile")) {
    reject_unless_allowed("profile");
    if (*v == "constant") {
      cfg.profile = BbmProfile::constant;
    } else if (*v == "linear") {
      cfg.profile = BbmProfile::linear;
    } else if (*v == "cos_pi_x") {
      cfg.profile = BbmProfile::cos_pi_x;
    } else {
      throw ValidationError("key 'profile' must be 'constant', 'linear' or 'cos_pi_x', got '" +
                            *v + "'");
    }
  }
  if (const auto v = r.string("quadrature")) {
    reject_unless_allowed("quadrature");
    if (*v == "corrected") {
      cfg.quadrature = Quadrature::corrected;
    } else if (*v == "midpoint") {
      cfg.quadrature = Quadrature::midpoint;
    } else {
      throw ValidationError("key 'quadrature' must be 'corrected' or 'midpoint', got '" + *v +
                            "'");
    }
  }

  r.finish();
  validate_config(cfg, command);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open configuration file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), command);
}

void validate_config(const RunConfig& config, const std::string& command) {
  if (static_cast<int>(config.cells.size()) != config.domain.dim()) {
    throw ValidationError("cells must list one count per domain axis (" +
                          std::to_string(config.domain.dim()) + " expected, " +
                          std::to_string(config.cells.size()) + " given)");
  }
  for (const int c : config.cells) {
    if (c < 2) {
      throw ValidationError("cells per axis must be at least 2");
    }
  }
  if (!(config.s > 0.0 && config.s < 1.0)) {
    throw ValidationError("s must satisfy 0 < s < 1");
  }
  for (const double s : config.s_values) {
    if (!(s > 0.0 && s < 1.0)) {
      throw ValidationError("every s in s_values must satisfy 0 < s < 1");
    }
  }
  if (!(config.p > 1.0)) {
    throw ValidationError("p must satisfy p > 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ValidationError("alpha must satisfy 0 < alpha < 1");
  }
  if (config.sigma && !(*config.sigma >= 0.0)) {
    throw ValidationError("sigma must satisfy sigma >= 0");
  }
  for (const double sig : config.sigma_values) {
    if (!(sig > 0.0)) {
      throw ValidationError("every sigma in sigma_values must satisfy sigma > 0");
    }
  }
  if (!(config.solver.tol_lambda > 0.0)) {
    throw ValidationError("solver tol_lambda must be positive");
  }
  if (!(config.solver.tol_residual > 0.0)) {
    throw ValidationError("solver tol_residual must be positive");
  }
  if (config.solver.max_iterations < 1) {
    throw ValidationError("solver max_iterations must be at least 1");
  }
  if (config.max_outer_iterations < 1) {
    throw ValidationError("max_outer_iterations must be at least 1");
  }
  if (config.design_values) {
    for (const double v : *config.design_values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("every design value must satisfy 0 <= phi <= 1");
      }
    }
  }
  if (config.design_cells) {
    for (const int c : *config.design_cells) {
      if (c < 0) {
        throw ValidationError("design cell indices must be nonnegative");
      }
    }
  }
  if ((command == "solve-soft" || command == "optimize-soft") && !config.sigma) {
    throw ValidationError("the '" + command + "' command requires sigma");
  }
  if (config.quadrature && *config.quadrature == Quadrature::corrected &&
      config.domain.dim() != 1) {
    throw ValidationError(
        "the corrected quadrature requires a 1D grid; choose the midpoint quadrature for 2D runs");
  }
}

Grid config_grid(const RunConfig& config) { return build_grid(config.domain, config.cells); }

OptimizeOptions config_optimize_options(const RunConfig& config) {
  OptimizeOptions opts;
  opts.solver = config.solver;
  opts.max_outer_iterations = config.max_outer_iterations;
  opts.multistart = config.multistart;
  opts.local_search = config.local_search;
  return opts;
}

}  // namespace nlod
