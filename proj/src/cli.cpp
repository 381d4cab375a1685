#include "nlod/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlod/config.hpp"
#include "nlod/design.hpp"
#include "nlod/design_vector.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/errors.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"
#include "nlod/limits.hpp"
#include "nlod/record.hpp"

namespace nlod {

namespace {

class WallTimer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  int threads = 1;
  std::uint64_t seed = 0;
  double s = 0.0;
  double p = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  std::vector<int> cells;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_s = nullptr;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_cells = nullptr;
};

void add_common_flags(CLI::App* sub, CommonFlags& f, bool with_sigma) {
  f.o_config = sub->add_option("--config", f.config_path, "JSON configuration file");
  f.o_out = sub->add_option("--out", f.out_path, "write result records to this file");
  sub->add_option("--format", f.format, "record format: csv or jsonlines (default csv)");
  sub->add_option("--threads", f.threads, "worker threads (default 1)");
  f.o_seed = sub->add_option("--seed", f.seed, "seed for the iterative solver's initial guess");
  f.o_s = sub->add_option("--s", f.s, "fractional order, 0 < s < 1");
  f.o_p = sub->add_option("--p", f.p, "integrability exponent, p > 1");
  f.o_alpha = sub->add_option("--alpha", f.alpha, "design mass fraction, 0 < alpha < 1");
  if (with_sigma) f.o_sigma = sub->add_option("--sigma", f.sigma, "penalty strength sigma");
  f.o_cells = sub->add_option("--cells", f.cells, "cells per axis");
}

RunConfig make_config(const CommonFlags& f, const std::string& command) {
  RunConfig cfg = f.o_config->count() > 0 ? load_config(f.config_path, command) : RunConfig{};
  if (f.o_s->count() > 0) cfg.s = f.s;
  if (f.o_p->count() > 0) cfg.p = f.p;
  if (f.o_alpha->count() > 0) cfg.alpha = f.alpha;
  if (f.o_sigma != nullptr && f.o_sigma->count() > 0) cfg.sigma = f.sigma;
  if (f.o_cells->count() > 0) cfg.cells = f.cells;
  if (f.o_seed->count() > 0) cfg.solver.seed = f.seed;
  if (f.threads < 1) {
    throw ValidationError("threads must be at least 1");
  }
  validate_config(cfg, command);
  return cfg;
}

ExperimentRecord base_record(const std::string& command, const RunConfig& cfg, const Grid& grid) {
  ExperimentRecord r;
  r.command = command;
  r.s = cfg.s;
  r.p = cfg.p;
  r.alpha = cfg.alpha;
  r.N = grid.size();
  r.seed = cfg.solver.seed;
  return r;
}

void deliver(const std::vector<ExperimentRecord>& records, const CommonFlags& f,
             std::ostream& out) {
  const RecordFormat fmt = record_format_from_name(f.format);
  if (f.o_out->count() > 0) {
    emit_records(records, f.out_path, fmt);
  } else {
    emit_records(records, out, fmt);
  }
}

DesignVector hard_design_from(const RunConfig& cfg, const Grid& grid) {
  if (cfg.design_cells) return design_from_cells(*cfg.design_cells, grid);
  // Constant ranking input: the bathtub tie rule selects the leading block.
  return bathtub_update(Eigen::VectorXd::Ones(grid.size()), cfg.alpha, grid, BathtubMode::binary);
}

DesignVector soft_design_from(const RunConfig& cfg, const Grid& grid) {
  if (cfg.design_values) {
    if (static_cast<int>(cfg.design_values->size()) != grid.size()) {
      throw ValidationError("design_values must list one value per grid cell");
    }
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
        cfg.design_values->data(), static_cast<Eigen::Index>(cfg.design_values->size()));
    return make_design(v, grid);
  }
  if (cfg.design_cells) return design_from_cells(*cfg.design_cells, grid);
  return bathtub_update(Eigen::VectorXd::Ones(grid.size()), cfg.alpha, grid, BathtubMode::relaxed);
}

std::string cells_to_text(const DesignVector& design) {
  std::string text = "[";
  bool first = true;
  for (int i = 0; i < design.size(); ++i) {
    if (design.values[i] == 0.0) continue;
    if (!first) text += ", ";
    first = false;
    text += std::to_string(i);
    if (design.values[i] != 1.0) {
      text += ":" + format_double(design.values[i]);
    }
  }
  return text + "]";
}

void run_solve_hard(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = make_config(f, "solve-hard");
  const Grid grid = config_grid(cfg);
  const DesignVector A = hard_design_from(cfg, grid);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const Extremal e = solve_hard(kernel, grid, A, cfg.solver);
  const double wall = timer.ms();

  out << "lambda = " << format_double(e.lambda) << "\n"
      << "el_residual = " << format_double(e.el_residual) << "\n"
      << "iterations = " << e.iterations << "\n"
      << "obstacle_cells = " << cells_to_text(A) << "\n"
      << "threads = " << f.threads << "\n";

  ExperimentRecord r = base_record("solve-hard", cfg, grid);
  r.alpha = A.mass / grid.domain.measure();
  r.lambda = e.lambda;
  r.seminorm_term = e.breakdown.seminorm_term;
  r.penalty_term = e.breakdown.penalty_term;
  r.iterations = e.iterations;
  r.el_residual = e.el_residual;
  r.design_checksum = design_checksum(A.values);
  r.wall_time_ms = wall;
  deliver({r}, f, out);
}

void run_solve_soft(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = make_config(f, "solve-soft");
  const Grid grid = config_grid(cfg);
  const DesignVector phi = soft_design_from(cfg, grid);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const Extremal e = solve_soft(kernel, grid, phi, *cfg.sigma, cfg.solver);
  const double wall = timer.ms();

  out << "lambda = " << format_double(e.lambda) << "\n"
      << "el_residual = " << format_double(e.el_residual) << "\n"
      << "iterations = " << e.iterations << "\n"
      << "threads = " << f.threads << "\n";

  ExperimentRecord r = base_record("solve-soft", cfg, grid);
  r.alpha = phi.mass / grid.domain.measure();
  r.sigma = *cfg.sigma;
  r.lambda = e.lambda;
  r.seminorm_term = e.breakdown.seminorm_term;
  r.penalty_term = e.breakdown.penalty_term;
  r.iterations = e.iterations;
  r.el_residual = e.el_residual;
  r.design_checksum = design_checksum(phi.values);
  r.wall_time_ms = wall;
  deliver({r}, f, out);
}

void run_optimize_hard(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = make_config(f, "optimize-hard");
  const Grid grid = config_grid(cfg);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const DesignResult res = optimize_hard(kernel, grid, cfg.alpha, config_optimize_options(cfg));
  const double wall = timer.ms();

  out << "lambda = " << format_double(res.lambda) << "\n"
      << "design_cells = " << cells_to_text(res.design) << "\n"
      << "outer_iterations = " << res.outer_iterations << "\n"
      << "cycle_detected = " << (res.cycle_detected ? "true" : "false") << "\n"
      << "threads = " << f.threads << "\n";

  ExperimentRecord r = base_record("optimize-hard", cfg, grid);
  r.lambda = res.lambda;
  r.seminorm_term = res.extremal.breakdown.seminorm_term;
  r.penalty_term = res.extremal.breakdown.penalty_term;
  r.iterations = res.extremal.iterations;
  r.el_residual = res.extremal.el_residual;
  r.design_checksum = design_checksum(res.design.values);
  r.wall_time_ms = wall;
  deliver({r}, f, out);
}

void run_optimize_soft(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = make_config(f, "optimize-soft");
  const Grid grid = config_grid(cfg);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const DesignResult res =
      optimize_soft(kernel, grid, cfg.alpha, *cfg.sigma, config_optimize_options(cfg));
  const double wall = timer.ms();

  out << "lambda = " << format_double(res.lambda) << "\n"
      << "design_cells = " << cells_to_text(res.design) << "\n"
      << "outer_iterations = " << res.outer_iterations << "\n"
      << "cycle_detected = " << (res.cycle_detected ? "true" : "false") << "\n"
      << "threads = " << f.threads << "\n";

  ExperimentRecord r = base_record("optimize-soft", cfg, grid);
  r.sigma = *cfg.sigma;
  r.lambda = res.lambda;
  r.seminorm_term = res.extremal.breakdown.seminorm_term;
  r.penalty_term = res.extremal.breakdown.penalty_term;
  r.iterations = res.extremal.iterations;
  r.el_residual = res.extremal.el_residual;
  r.design_checksum = design_checksum(res.design.values);
  r.wall_time_ms = wall;
  deliver({r}, f, out);
}

void run_oracle(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = make_config(f, "oracle");
  const Grid grid = config_grid(cfg);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const DesignResult res =
      exhaustive_oracle(kernel, grid, cfg.alpha, cfg.sigma, f.threads, cfg.solver);
  const double wall = timer.ms();

  out << "lambda = " << format_double(res.lambda) << "\n"
      << "design_cells = " << cells_to_text(res.design) << "\n"
      << "threads = " << f.threads << "\n";

  ExperimentRecord r = base_record("oracle", cfg, grid);
  r.sigma = cfg.sigma;
  r.lambda = res.lambda;
  r.seminorm_term = res.extremal.breakdown.seminorm_term;
  r.penalty_term = res.extremal.breakdown.penalty_term;
  r.iterations = res.extremal.iterations;
  r.el_residual = res.extremal.el_residual;
  r.design_checksum = design_checksum(res.design.values);
  r.wall_time_ms = wall;
  deliver({r}, f, out);
}

void run_continuation(const CommonFlags& f, std::ostream& out) {
  RunConfig cfg = make_config(f, "continuation");
  if (cfg.sigma_values.empty()) {
    cfg.sigma_values = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  }
  const Grid grid = config_grid(cfg);
  const KernelMatrix kernel = assemble_kernel(grid, cfg.s, cfg.p);

  const WallTimer timer;
  const ContinuationLadder ladder =
      sigma_continuation(kernel, grid, cfg.alpha, cfg.sigma_values, config_optimize_options(cfg));
  const double wall = timer.ms();

  out << "hard_lambda = " << format_double(ladder.hard_lambda) << "\n"
      << "hard_design_cells = " << cells_to_text(ladder.hard_design) << "\n";
  for (const ContinuationRecord& rec : ladder.records) {
    out << "sigma = " << format_double(rec.sigma) << "  lambda = " << format_double(rec.lambda)
        << "  lambda/hard = " << format_double(rec.lambda / ladder.hard_lambda)
        << "  penalty_residual = " << format_double(rec.penalty_residual) << "\n";
  }
  out << "threads = " << f.threads << "\n";

  std::vector<ExperimentRecord> records;
  {
    // Reference row: the hard optimum, marked by the empty sigma column.
    ExperimentRecord r = base_record("continuation", cfg, grid);
    r.lambda = ladder.hard_lambda;
    r.seminorm_term = ladder.hard_extremal.breakdown.seminorm_term;
    r.penalty_term = ladder.hard_extremal.breakdown.penalty_term;
    r.iterations = ladder.hard_extremal.iterations;
    r.el_residual = ladder.hard_extremal.el_residual;
    r.design_checksum = design_checksum(ladder.hard_design.values);
    r.wall_time_ms = wall;
    records.push_back(std::move(r));
  }
  for (const ContinuationRecord& rec : ladder.records) {
    ExperimentRecord r = base_record("continuation", cfg, grid);
    r.sigma = rec.sigma;
    r.lambda = rec.lambda;
    r.seminorm_term = rec.extremal.breakdown.seminorm_term;
    r.penalty_term = rec.extremal.breakdown.penalty_term;
    r.iterations = rec.extremal.iterations;
    r.el_residual = rec.extremal.el_residual;
    r.design_checksum = design_checksum(rec.design.values);
    r.wall_time_ms = wall;
    records.push_back(std::move(r));
  }
  deliver(records, f, out);
}

void run_gamma_limit(const CommonFlags& f, std::ostream& out) {
  RunConfig cfg = make_config(f, "gamma-limit");
  if (cfg.s_values.empty()) {
    cfg.s_values = {0.6, 0.8, 0.9, 0.95};
  }
  const Grid grid = config_grid(cfg);
  const Quadrature quadrature =
      cfg.quadrature.value_or(grid.dim() == 1 ? Quadrature::corrected : Quadrature::midpoint);

  const WallTimer timer;
  const std::vector<GammaLimitRecord> rows = gamma_limit_experiment(
      grid, cfg.p, cfg.alpha, cfg.s_values, config_optimize_options(cfg), quadrature);
  const double wall = timer.ms();

  if (!rows.empty()) {
    out << "local_lambda = " << format_double(rows.front().local_lambda)
        << "  K = " << format_double(rows.front().K) << "\n";
  }
  for (const GammaLimitRecord& rec : rows) {
    out << "s = " << format_double(rec.s)
        << "  scaled_lambda = " << format_double(rec.scaled_lambda)
        << "  ratio = " << format_double(rec.ratio)
        << "  symmetric_difference = " << rec.symmetric_difference << "\n";
  }
  out << "threads = " << f.threads << "\n";

  std::vector<ExperimentRecord> records;
  for (const GammaLimitRecord& rec : rows) {
    ExperimentRecord r = base_record("gamma-limit", cfg, grid);
    r.s = rec.s;
    r.lambda = rec.lambda;
    r.seminorm_term = rec.scaled_lambda;
    r.penalty_term = rec.K * rec.local_lambda;
    r.iterations = rec.extremal.iterations;
    r.el_residual = rec.ratio;
    r.design_checksum = design_checksum(rec.design.values);
    r.wall_time_ms = wall;
    records.push_back(std::move(r));
  }
  deliver(records, f, out);
}

void run_bbm_check(const CommonFlags& f, std::ostream& out) {
  RunConfig cfg = make_config(f, "bbm-check");
  if (cfg.s_values.empty()) {
    cfg.s_values = {0.6, 0.8, 0.9, 0.95, 0.99};
  }
  const Grid grid = config_grid(cfg);

  const WallTimer timer;
  const std::vector<BbmRow> rows = bbm_pointwise_check(cfg.profile, grid, cfg.p, cfg.s_values);
  const double wall = timer.ms();
  const std::uint64_t checksum = design_checksum(bbm_profile_samples(cfg.profile, grid));

  for (const BbmRow& row : rows) {
    out << "s = " << format_double(row.s)
        << "  scaled_seminorm = " << format_double(row.scaled_seminorm)
        << "  target = " << format_double(row.target) << "  ratio = " << format_double(row.ratio)
        << "\n";
  }
  out << "threads = " << f.threads << "\n";

  std::vector<ExperimentRecord> records;
  for (const BbmRow& row : rows) {
    ExperimentRecord r = base_record("bbm-check", cfg, grid);
    r.s = row.s;
    r.alpha = 0.0;
    r.lambda = row.ratio;
    r.seminorm_term = row.scaled_seminorm;
    r.penalty_term = row.target;
    r.iterations = 0;
    r.el_residual = row.ratio_midpoint;
    r.design_checksum = checksum;
    r.wall_time_ms = wall;
    records.push_back(std::move(r));
  }
  deliver(records, f, out);
}

void run_constant_k(int n, double p, const std::string& method, std::ostream& out) {
  if (method != "gamma" && method != "sphere" && method != "both") {
    throw ValidationError("method must be 'gamma', 'sphere' or 'both', got '" + method + "'");
  }
  std::optional<double> gamma_value, sphere_value;
  if (method == "gamma" || method == "both") {
    gamma_value = compute_K(n, p, KMethod::gamma);
    out << "gamma = " << format_double(*gamma_value) << "\n";
  }
  if (method == "sphere" || method == "both") {
    sphere_value = compute_K(n, p, KMethod::sphere);
    out << "sphere = " << format_double(*sphere_value) << "\n";
  }
  if (gamma_value && sphere_value) {
    out << "difference = " << format_double(std::abs(*gamma_value - *sphere_value)) << "\n";
  }
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal optimal design: fractional obstacle eigenvalues, design optimization "
               "and the sigma/s limit experiments"};
  app.require_subcommand(1);

  CommonFlags f_solve_hard, f_solve_soft, f_opt_hard, f_opt_soft, f_oracle, f_cont, f_gamma,
      f_bbm;

  CLI::App* sub_solve_hard =
      app.add_subcommand("solve-hard", "eigenvalue of a fixed hard obstacle set");
  add_common_flags(sub_solve_hard, f_solve_hard, false);
  sub_solve_hard->callback([&] { run_solve_hard(f_solve_hard, out); });

  CLI::App* sub_solve_soft =
      app.add_subcommand("solve-soft", "eigenvalue of a fixed penalized potential");
  add_common_flags(sub_solve_soft, f_solve_soft, true);
  sub_solve_soft->callback([&] { run_solve_soft(f_solve_soft, out); });

  CLI::App* sub_opt_hard =
      app.add_subcommand("optimize-hard", "optimal hard obstacle set at mass fraction alpha");
  add_common_flags(sub_opt_hard, f_opt_hard, false);
  sub_opt_hard->callback([&] { run_optimize_hard(f_opt_hard, out); });

  CLI::App* sub_opt_soft =
      app.add_subcommand("optimize-soft", "optimal penalized potential at mass fraction alpha");
  add_common_flags(sub_opt_soft, f_opt_soft, true);
  sub_opt_soft->callback([&] { run_optimize_soft(f_opt_soft, out); });

  CLI::App* sub_oracle =
      app.add_subcommand("oracle", "exhaustive global minimum over binary designs");
  add_common_flags(sub_oracle, f_oracle, true);
  sub_oracle->callback([&] { run_oracle(f_oracle, out); });

  CLI::App* sub_cont =
      app.add_subcommand("continuation", "sigma ladder converging to the hard optimum");
  add_common_flags(sub_cont, f_cont, false);
  sub_cont->callback([&] { run_continuation(f_cont, out); });

  CLI::App* sub_gamma =
      app.add_subcommand("gamma-limit", "s -> 1 scaling against the local design optimum");
  add_common_flags(sub_gamma, f_gamma, false);
  sub_gamma->callback([&] { run_gamma_limit(f_gamma, out); });

  CLI::App* sub_bbm =
      app.add_subcommand("bbm-check", "pointwise (1-s)-scaled seminorm limit on a fixed profile");
  add_common_flags(sub_bbm, f_bbm, false);
  sub_bbm->callback([&] { run_bbm_check(f_bbm, out); });

  int k_n = 0;
  double k_p = 0.0;
  std::string k_method = "both";
  CLI::App* sub_k = app.add_subcommand("constant-k", "the limit constant K(n,p)");
  sub_k->add_option("--n", k_n, "space dimension")->required();
  sub_k->add_option("--p", k_p, "integrability exponent, p > 1")->required();
  sub_k->add_option("--method", k_method, "gamma, sphere or both (default both)");
  sub_k->callback([&] { run_constant_k(k_n, k_p, k_method, out); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace nlod
