#include <doctest.h>

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlod/cli.hpp"
#include "nlod/config.hpp"
#include "nlod/errors.hpp"
#include "nlod/record.hpp"

using namespace nlod;

namespace {

std::vector<ExperimentRecord> sample_records() {
  ExperimentRecord hard;
  hard.command = "solve-hard";
  hard.s = 0.5;
  hard.p = 2.0;
  hard.alpha = 0.25;
  hard.N = 24;
  hard.lambda = 2.0864733895142127;
  hard.seminorm_term = 2.0864733895142127;
  hard.penalty_term = 0.0;
  hard.iterations = 1;
  hard.el_residual = 3.1e-16;
  hard.design_checksum = 9081273736598015605ull;
  hard.seed = 42;
  hard.wall_time_ms = 1.25;

  ExperimentRecord soft = hard;
  soft.command = "solve-soft";
  soft.sigma = 1000.0;
  soft.lambda = 2.0684410724945246;
  soft.penalty_term = 0.017671037142859654;
  soft.iterations = 318;

  ExperimentRecord odd = hard;
  odd.command = "bbm-check";
  odd.s = 0.99;
  odd.p = 3.5;
  odd.alpha = 0.0;
  odd.lambda = -0.987654321098765432;  // negative and full-precision
  odd.el_residual = 1.7976931348623157e+308;
  return {hard, soft, odd};
}

std::string emit_to_string(const std::vector<ExperimentRecord>& rs, RecordFormat fmt) {
  std::ostringstream out;
  emit_records(rs, out, fmt);
  return out.str();
}

void check_equal(const ExperimentRecord& a, const ExperimentRecord& b) {
  CHECK(a.command == b.command);
  CHECK(a.s == b.s);
  CHECK(a.p == b.p);
  CHECK(a.alpha == b.alpha);
  CHECK(a.sigma.has_value() == b.sigma.has_value());
  if (a.sigma && b.sigma) CHECK(*a.sigma == *b.sigma);
  CHECK(a.N == b.N);
  CHECK(a.lambda == b.lambda);
  CHECK(a.seminorm_term == b.seminorm_term);
  CHECK(a.penalty_term == b.penalty_term);
  CHECK(a.iterations == b.iterations);
  CHECK(a.el_residual == b.el_residual);
  CHECK(a.design_checksum == b.design_checksum);
  CHECK(a.seed == b.seed);
  CHECK(a.wall_time_ms == b.wall_time_ms);
}

/// RAII temp file in the test working directory.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path(name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream out(path);
    out << text;
  }
  std::string read() const {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

int run_cli(const std::vector<std::string>& args, std::string* stdout_text = nullptr,
            std::string* stderr_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_run(args, out, err);
  if (stdout_text) *stdout_text = out.str();
  if (stderr_text) *stderr_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("record header and double formatting") {
  CHECK(record_header() ==
        "command,s,p,alpha,sigma,N,lambda,seminorm_term,penalty_term,iterations,el_residual,"
        "design_checksum,seed,wall_time_ms");
  // 17 significant digits round-trip doubles exactly.
  for (const double v : {3.141592653589793, -1.0 / 3.0, 1e-300, 2.0864733895142127}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(record_format_from_name("csv") == RecordFormat::csv);
  CHECK(record_format_from_name("jsonlines") == RecordFormat::jsonlines);
  CHECK_THROWS_AS(record_format_from_name("yaml"), ValidationError);
}

TEST_CASE("csv round trip is bit exact") {
  const std::vector<ExperimentRecord> rs = sample_records();
  const std::string text = emit_to_string(rs, RecordFormat::csv);
  std::istringstream in(text);
  const std::vector<ExperimentRecord> back = parse_records(in, RecordFormat::csv);
  REQUIRE(back.size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) check_equal(rs[i], back[i]);
  CHECK(emit_to_string(back, RecordFormat::csv) == text);
  // The hard record has no sigma: its sigma column is empty.
  CHECK(text.find("solve-hard,0.5,2,0.25,,24,") != std::string::npos);
}

TEST_CASE("jsonlines round trip is bit exact") {
  const std::vector<ExperimentRecord> rs = sample_records();
  const std::string text = emit_to_string(rs, RecordFormat::jsonlines);
  std::istringstream in(text);
  const std::vector<ExperimentRecord> back = parse_records(in, RecordFormat::jsonlines);
  REQUIRE(back.size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) check_equal(rs[i], back[i]);
  CHECK(emit_to_string(back, RecordFormat::jsonlines) == text);
  CHECK(text.find("\"sigma\":null") != std::string::npos);
}

TEST_CASE("empty record list emits just the csv header") {
  CHECK(emit_to_string({}, RecordFormat::csv) == record_header() + "\n");
  CHECK(emit_to_string({}, RecordFormat::jsonlines).empty());
}

TEST_CASE("record parsing rejects malformed input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_records(empty, RecordFormat::csv), ValidationError);

  std::istringstream bad_header("song,s,p\n");
  CHECK_THROWS_AS(parse_records(bad_header, RecordFormat::csv), ValidationError);

  std::istringstream short_row(record_header() + "\nsolve-hard,0.5,2\n");
  CHECK_THROWS_AS(parse_records(short_row, RecordFormat::csv), ValidationError);

  std::istringstream bad_number(record_header() +
                                "\nsolve-hard,zebra,2,0.25,,24,1,1,0,1,0,0,0,0\n");
  CHECK_THROWS_AS(parse_records(bad_number, RecordFormat::csv), ValidationError);

  std::istringstream bad_json("{not json}\n");
  CHECK_THROWS_AS(parse_records(bad_json, RecordFormat::jsonlines), ValidationError);

  std::istringstream missing_field("{\"command\":\"x\"}\n");
  CHECK_THROWS_AS(parse_records(missing_field, RecordFormat::jsonlines), ValidationError);
}

TEST_CASE("design checksum: deterministic, order-sensitive, 1e-12 rounding") {
  Eigen::VectorXd a(3), b(3), c(3), d(3);
  a << 0.0, 1.0, 0.5;
  b << 1.0, 0.0, 0.5;
  c << 0.0, 1.0, 0.5 + 4e-13;  // rounds to the same 1e-12 lattice point
  d << 0.0, 1.0, 0.5 + 2e-12;  // rounds away
  CHECK(design_checksum(a) == design_checksum(a));
  CHECK(design_checksum(a) != design_checksum(b));
  CHECK(design_checksum(a) == design_checksum(c));
  CHECK(design_checksum(a) != design_checksum(d));
}

TEST_CASE("config: defaults from the empty document") {
  const RunConfig cfg = parse_config("{}", "optimize-hard");
  CHECK(cfg.domain.dim() == 1);
  CHECK(cfg.cells == std::vector<int>{48});
  CHECK(cfg.s == 0.5);
  CHECK(cfg.p == 2.0);
  CHECK(cfg.alpha == 0.25);
  CHECK_FALSE(cfg.sigma.has_value());
  CHECK(cfg.solver.tol_lambda == 1e-9);
  CHECK(cfg.solver.p2_mode == P2Mode::exact);
  CHECK(cfg.multistart);
  CHECK(cfg.local_search);
}

TEST_CASE("config: full document round") {
  const std::string text = R"({
    "domain": {"kind": "rectangle", "bounds": [[0.0, 2.0], [0.0, 1.0]]},
    "cells": [8, 4],
    "s": 0.6,
    "p": 2.5,
    "alpha": 0.5,
    "sigma": 25.0,
    "solver": {"tol_lambda": 1e-10, "tol_residual": 1e-8, "max_iterations": 900,
               "seed": 7, "p2_mode": "iterative"},
    "max_outer_iterations": 40,
    "multistart": false,
    "local_search": false
  })";
  const RunConfig cfg = parse_config(text, "optimize-soft");
  CHECK(cfg.domain.dim() == 2);
  CHECK(cfg.domain.measure() == 2.0);
  CHECK(cfg.cells == std::vector<int>{8, 4});
  CHECK(cfg.s == 0.6);
  CHECK(cfg.p == 2.5);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.sigma == 25.0);
  CHECK(cfg.solver.tol_lambda == 1e-10);
  CHECK(cfg.solver.max_iterations == 900);
  CHECK(cfg.solver.seed == 7);
  CHECK(cfg.solver.p2_mode == P2Mode::iterative);
  CHECK(cfg.max_outer_iterations == 40);
  CHECK_FALSE(cfg.multistart);
  CHECK_FALSE(cfg.local_search);

  const Grid g = config_grid(cfg);
  CHECK(g.size() == 32);
  const OptimizeOptions opts = config_optimize_options(cfg);
  CHECK(opts.max_outer_iterations == 40);
  CHECK_FALSE(opts.multistart);
}

TEST_CASE("config: strict schema") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"s": 0.5, "s": 0.6})", "solve-hard"),
                       doctest::Contains("duplicate key 's'"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"sss": 0.5})", "solve-hard"),
                       doctest::Contains("unknown key 'sss'"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"solver": {"tol": 1}})", "solve-hard"),
                       doctest::Contains("unknown key 'tol'"), ValidationError);
  CHECK_THROWS_AS(parse_config("[1, 2]", "solve-hard"), ValidationError);
  CHECK_THROWS_AS(parse_config("{", "solve-hard"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"sigma_values": [1.0]})", "solve-hard"),
                       doctest::Contains("does not apply to the 'solve-hard' command"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"profile": "linear"})", "optimize-hard"),
                       doctest::Contains("does not apply"), ValidationError);
}

TEST_CASE("config: range diagnostics echo the mathematical constraint") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"s": 1.2})", "solve-hard"),
                       doctest::Contains("s must satisfy 0 < s < 1"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"p": 1.0})", "solve-hard"),
                       doctest::Contains("p must satisfy p > 1"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"alpha": 0.0})", "solve-hard"),
                       doctest::Contains("alpha must satisfy 0 < alpha < 1"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("{}", "solve-soft"), doctest::Contains("requires sigma"),
                       ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"cells": [4, 4]})", "solve-hard"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"max_iterations": 0}})", "solve-hard"),
                  ValidationError);
}

TEST_CASE("cli: hard solve on the closed-form instance") {
  std::string out;
  const int code = run_cli({"solve-hard", "--cells", "2", "--s", "0.5", "--p", "2", "--alpha",
                            "0.5", "--format", "csv"},
                           &out);
  CHECK(code == 0);
  CHECK(out.find("lambda = 2\n") != std::string::npos);
  CHECK(out.find(record_header()) != std::string::npos);
  CHECK(out.find("solve-hard,0.5,2,0.5,,2,2,") != std::string::npos);
}

TEST_CASE("cli: constant-k output") {
  std::string out;
  CHECK(run_cli({"constant-k", "--n", "1", "--p", "2"}, &out) == 0);
  CHECK(out.find("gamma = ") != std::string::npos);
  CHECK(out.find("sphere = 1\n") != std::string::npos);
  CHECK(out.find("difference = ") != std::string::npos);

  CHECK(run_cli({"constant-k", "--n", "3", "--p", "3", "--method", "sphere"}, &out) == 0);
  CHECK(out.find("sphere = 0.25\n") != std::string::npos);

  std::string err;
  CHECK(run_cli({"constant-k", "--n", "9", "--p", "2", "--method", "sphere"}, &out, &err) == 1);
  CHECK(err.find("sphere method supports n <= 3") != std::string::npos);
}

TEST_CASE("cli: validation failures exit with code 1") {
  std::string out, err;
  CHECK(run_cli({"solve-hard", "--s", "1.5"}, &out, &err) == 1);
  CHECK(err.find("s must satisfy 0 < s < 1") != std::string::npos);
  CHECK(run_cli({}, &out, &err) == 1);                       // missing subcommand
  CHECK(run_cli({"solve-hard", "--zebra"}, &out, &err) == 1);  // unknown flag
  CHECK(run_cli({"optimize-hard", "--cells", "10", "--alpha", "0.25"}, &out, &err) == 1);
  CHECK(err.find("alpha * N") != std::string::npos);
  CHECK(run_cli({"oracle", "--cells", "64", "--alpha", "0.5"}, &out, &err) == 1);
  CHECK(err.find("exceeds the budget") != std::string::npos);
  CHECK(run_cli({"solve-soft", "--cells", "8"}, &out, &err) == 1);  // sigma missing
  CHECK(run_cli({"solve-hard", "--format", "yaml"}, &out, &err) == 1);
}

TEST_CASE("cli: help exits with code 0") {
  std::string out;
  CHECK(run_cli({"--help"}, &out) == 0);
  CHECK(out.find("solve-hard") != std::string::npos);
  CHECK(run_cli({"solve-soft", "--help"}, &out) == 0);
  CHECK(out.find("--sigma") != std::string::npos);
}

TEST_CASE("cli: non-convergence exits with code 2") {
  const TempFile cfg("nlod_test_starved_config.json");
  cfg.write(R"({"p": 2.5, "sigma": 5.0, "cells": 8, "solver": {"max_iterations": 1}})");
  std::string out, err;
  CHECK(run_cli({"solve-soft", "--config", cfg.path}, &out, &err) == 2);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("cli: io failures exit with code 3") {
  std::string out, err;
  CHECK(run_cli({"solve-hard", "--config", "no_such_config.json"}, &out, &err) == 3);
  CHECK(run_cli({"solve-hard", "--cells", "4", "--out", "no_such_dir/records.csv"}, &out,
                &err) == 3);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("cli: records written to a file parse back") {
  const TempFile tmp("nlod_test_records.jsonl");
  std::string out;
  const int code = run_cli({"solve-soft", "--cells", "6", "--sigma", "10", "--alpha", "0.5",
                            "--format", "jsonlines", "--out", tmp.path},
                           &out);
  CHECK(code == 0);
  const std::vector<ExperimentRecord> rs =
      parse_records_file(tmp.path, RecordFormat::jsonlines);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].command == "solve-soft");
  CHECK(rs[0].sigma == 10.0);
  CHECK(rs[0].N == 6);
  CHECK(rs[0].lambda > 0.0);
}

TEST_CASE("cli: config file drives a run and flags override it") {
  const TempFile cfg("nlod_test_run_config.json");
  cfg.write(R"({"cells": 10, "s": 0.5, "p": 2.0, "alpha": 0.3})");
  std::string a, b;
  CHECK(run_cli({"optimize-hard", "--config", cfg.path}, &a) == 0);
  CHECK(a.find("design_cells = [0, 1, 2]") != std::string::npos);
  // Override alpha on the command line: 0.2 * 10 = 2 obstacle cells.
  CHECK(run_cli({"optimize-hard", "--config", cfg.path, "--alpha", "0.2"}, &b) == 0);
  CHECK(b.find("design_cells = [0, 1]") != std::string::npos);
}
