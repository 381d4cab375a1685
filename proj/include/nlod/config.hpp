#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlod/design.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/geometry.hpp"
#include "nlod/limits.hpp"

namespace nlod {

/// Validated run configuration: defaults describe the reference instance
/// (unit interval, 48 cells, s = 0.5, p = 2, alpha = 0.25).
struct RunConfig {
  Domain domain = make_interval(0.0, 1.0);
  std::vector<int> cells = {48};  ///< per-axis cell counts, size == domain dimension
  double s = 0.5;
  double p = 2.0;
  double alpha = 0.25;
  std::optional<double> sigma;          ///< required by the soft commands
  std::vector<double> s_values;         ///< sweep commands; empty -> command default
  std::vector<double> sigma_values;     ///< continuation ladder; empty -> command default
  SolverOptions solver;
  int max_outer_iterations = 100;
  bool multistart = true;
  bool local_search = true;
  std::optional<std::vector<int>> design_cells;      ///< explicit binary design
  std::optional<std::vector<double>> design_values;  ///< explicit relaxed design
  BbmProfile profile = BbmProfile::cos_pi_x;
  std::optional<Quadrature> quadrature;  ///< default: corrected in 1D, midpoint in 2D
};

/// Parses and validates a strict JSON document for the given command. Unknown
/// keys are rejected by name, duplicate keys are a schema error, and range
/// violations echo the mathematical constraint.
RunConfig parse_config(const std::string& text, const std::string& command);

/// parse_config on the contents of a file; unreadable path -> IoError.
RunConfig load_config(const std::string& path, const std::string& command);

/// Range validation shared by parse_config and the CLI flag overrides.
void validate_config(const RunConfig& config, const std::string& command);

/// Grid construction from the validated domain and cell counts.
Grid config_grid(const RunConfig& config);

/// Optimizer options carried by the config (solver options included).
OptimizeOptions config_optimize_options(const RunConfig& config);

}  // namespace nlod
