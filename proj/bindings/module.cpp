#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>

#include "nlod/cli.hpp"
#include "nlod/config.hpp"
#include "nlod/design.hpp"
#include "nlod/design_vector.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/errors.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"
#include "nlod/limits.hpp"
#include "nlod/record.hpp"

namespace py = pybind11;

using namespace nlod;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Nonlocal optimal design core: fractional Gagliardo energies, hard/soft obstacle "
      "eigenvalues, bathtub design optimization, and the sigma / s limit experiments.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  // --- geometry ---
  py::class_<Domain>(m, "Domain")
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("measure", &Domain::measure);
  m.def("make_interval", &make_interval, py::arg("low"), py::arg("high"));
  m.def("make_rectangle", &make_rectangle, py::arg("x_low"), py::arg("x_high"), py::arg("y_low"),
        py::arg("y_high"));
  m.def("diameter", &diameter, py::arg("domain"));

  py::class_<Grid>(m, "Grid")
      .def_readonly("domain", &Grid::domain)
      .def_readonly("h", &Grid::h)
      .def_readonly("cell_measure", &Grid::cell_measure)
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("centers", [](const Grid& g) {
        Eigen::MatrixXd c(g.size(), g.dim());
        for (int i = 0; i < g.size(); ++i) {
          for (int d = 0; d < g.dim(); ++d) {
            c(i, d) = g.centers[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
          }
        }
        return c;
      });
  m.def("build_grid", &build_grid, py::arg("domain"), py::arg("cells_per_axis"));

  // --- kernel & energies ---
  py::class_<KernelMatrix>(m, "KernelMatrix")
      .def_readonly("s", &KernelMatrix::s)
      .def_readonly("p", &KernelMatrix::p)
      .def_readonly("n", &KernelMatrix::n)
      .def_readonly("h", &KernelMatrix::h)
      .def_readonly("cell_measure", &KernelMatrix::cell_measure)
      .def_readonly("weights", &KernelMatrix::weights);
  m.def("assemble_kernel", &assemble_kernel, py::arg("grid"), py::arg("s"), py::arg("p"));
  m.def("gagliardo_energy", &gagliardo_energy, py::arg("u"), py::arg("kernel"));
  m.def("gagliardo_gradient", &gagliardo_gradient, py::arg("u"), py::arg("kernel"));
  m.def("gagliardo_energy_corrected", &gagliardo_energy_corrected, py::arg("u"),
        py::arg("kernel"), py::arg("grid"));
  m.def("diag_correction_constant", &diag_correction_constant, py::arg("s"), py::arg("p"),
        py::arg("h"), py::arg("max_lag"));
  m.def("penalty_energy", &penalty_energy, py::arg("u"), py::arg("phi"), py::arg("sigma"),
        py::arg("grid"), py::arg("p"));
  m.def("lp_mass", &lp_mass, py::arg("u"), py::arg("grid"), py::arg("p"));
  m.def("local_energy", &local_energy, py::arg("u"), py::arg("grid"), py::arg("p"));
  m.def("local_gradient", &local_gradient, py::arg("u"), py::arg("grid"), py::arg("p"));

  // --- designs ---
  py::class_<DesignVector>(m, "DesignVector")
      .def_readonly("values", &DesignVector::values)
      .def_readonly("mass", &DesignVector::mass)
      .def_readonly("binary", &DesignVector::binary)
      .def("__len__", &DesignVector::size);
  m.def("make_design", &make_design, py::arg("values"), py::arg("grid"));
  m.def("design_from_cells", &design_from_cells, py::arg("cells"), py::arg("grid"));
  m.def("design_cells", &design_cells, py::arg("design"));
  m.def("in_mass_class", &in_mass_class, py::arg("design"), py::arg("alpha"), py::arg("grid"),
        py::arg("tol") = 1e-12);
  m.def("design_checksum", &design_checksum, py::arg("values"));

  py::enum_<BathtubMode>(m, "BathtubMode")
      .value("relaxed", BathtubMode::relaxed)
      .value("binary", BathtubMode::binary);
  m.def("bathtub_update", &bathtub_update, py::arg("u"), py::arg("alpha"), py::arg("grid"),
        py::arg("mode"));

  // --- eigensolver ---
  py::enum_<P2Mode>(m, "P2Mode").value("exact", P2Mode::exact).value("iterative",
                                                                     P2Mode::iterative);
  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("tol_lambda", &SolverOptions::tol_lambda)
      .def_readwrite("tol_residual", &SolverOptions::tol_residual)
      .def_readwrite("max_iterations", &SolverOptions::max_iterations)
      .def_readwrite("seed", &SolverOptions::seed)
      .def_readwrite("p2_mode", &SolverOptions::p2_mode);
  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("seminorm_term", &EnergyBreakdown::seminorm_term)
      .def_readonly("penalty_term", &EnergyBreakdown::penalty_term)
      .def_readonly("mass", &EnergyBreakdown::mass)
      .def("rayleigh", &EnergyBreakdown::rayleigh);
  py::class_<Extremal>(m, "Extremal")
      .def_readonly("lambda_", &Extremal::lambda)
      .def_readonly("u", &Extremal::u)
      .def_readonly("iterations", &Extremal::iterations)
      .def_readonly("el_residual", &Extremal::el_residual)
      .def_readonly("breakdown", &Extremal::breakdown);
  m.def("solve_hard", &solve_hard, py::arg("kernel"), py::arg("grid"), py::arg("A"),
        py::arg("opts") = SolverOptions{});
  m.def("solve_soft", &solve_soft, py::arg("kernel"), py::arg("grid"), py::arg("phi"),
        py::arg("sigma"), py::arg("opts") = SolverOptions{});

  // --- design optimization ---
  py::class_<OptimizeOptions>(m, "OptimizeOptions")
      .def(py::init<>())
      .def_readwrite("solver", &OptimizeOptions::solver)
      .def_readwrite("max_outer_iterations", &OptimizeOptions::max_outer_iterations)
      .def_readwrite("multistart", &OptimizeOptions::multistart)
      .def_readwrite("local_search", &OptimizeOptions::local_search)
      .def_readwrite("initial_design", &OptimizeOptions::initial_design);
  py::class_<DesignResult>(m, "DesignResult")
      .def_readonly("lambda_", &DesignResult::lambda)
      .def_readonly("extremal", &DesignResult::extremal)
      .def_readonly("design", &DesignResult::design)
      .def_readonly("outer_iterations", &DesignResult::outer_iterations)
      .def_readonly("objective_trace", &DesignResult::objective_trace)
      .def_readonly("cycle_detected", &DesignResult::cycle_detected);
  m.def("optimize_hard", &optimize_hard, py::arg("kernel"), py::arg("grid"), py::arg("alpha"),
        py::arg("opts") = OptimizeOptions{});
  m.def("optimize_soft", &optimize_soft, py::arg("kernel"), py::arg("grid"), py::arg("alpha"),
        py::arg("sigma"), py::arg("opts") = OptimizeOptions{});
  m.def("exhaustive_oracle", &exhaustive_oracle, py::arg("kernel"), py::arg("grid"),
        py::arg("alpha"), py::arg("sigma") = std::nullopt, py::arg("threads") = 1,
        py::arg("solver") = SolverOptions{});
  m.def("oracle_subset_count", &oracle_subset_count, py::arg("cells"), py::arg("chosen"));

  // --- limits ---
  py::enum_<KMethod>(m, "KMethod").value("gamma", KMethod::gamma).value("sphere",
                                                                        KMethod::sphere);
  m.def("compute_K", &compute_K, py::arg("n"), py::arg("p"), py::arg("method"));

  py::class_<ContinuationRecord>(m, "ContinuationRecord")
      .def_readonly("sigma", &ContinuationRecord::sigma)
      .def_readonly("lambda_", &ContinuationRecord::lambda)
      .def_readonly("penalty_residual", &ContinuationRecord::penalty_residual)
      .def_readonly("design", &ContinuationRecord::design)
      .def_readonly("extremal", &ContinuationRecord::extremal);
  py::class_<ContinuationLadder>(m, "ContinuationLadder")
      .def_readonly("sigma_values", &ContinuationLadder::sigma_values)
      .def_readonly("records", &ContinuationLadder::records)
      .def_readonly("hard_lambda", &ContinuationLadder::hard_lambda)
      .def_readonly("hard_design", &ContinuationLadder::hard_design)
      .def_readonly("hard_extremal", &ContinuationLadder::hard_extremal);
  m.def("sigma_continuation", &sigma_continuation, py::arg("kernel"), py::arg("grid"),
        py::arg("alpha"), py::arg("sigma_values"), py::arg("opts") = OptimizeOptions{});

  py::enum_<BbmProfile>(m, "BbmProfile")
      .value("constant", BbmProfile::constant)
      .value("linear", BbmProfile::linear)
      .value("cos_pi_x", BbmProfile::cos_pi_x);
  py::class_<BbmRow>(m, "BbmRow")
      .def_readonly("s", &BbmRow::s)
      .def_readonly("scaled_seminorm", &BbmRow::scaled_seminorm)
      .def_readonly("scaled_midpoint", &BbmRow::scaled_midpoint)
      .def_readonly("target", &BbmRow::target)
      .def_readonly("ratio", &BbmRow::ratio)
      .def_readonly("ratio_midpoint", &BbmRow::ratio_midpoint);
  m.def("bbm_profile_samples", &bbm_profile_samples, py::arg("profile"), py::arg("grid"));
  m.def("bbm_pointwise_check", &bbm_pointwise_check, py::arg("profile"), py::arg("grid"),
        py::arg("p"), py::arg("s_values"));

  py::enum_<Quadrature>(m, "Quadrature")
      .value("corrected", Quadrature::corrected)
      .value("midpoint", Quadrature::midpoint);
  py::class_<GammaLimitRecord>(m, "GammaLimitRecord")
      .def_readonly("s", &GammaLimitRecord::s)
      .def_readonly("lambda_", &GammaLimitRecord::lambda)
      .def_readonly("scaled_lambda", &GammaLimitRecord::scaled_lambda)
      .def_readonly("local_lambda", &GammaLimitRecord::local_lambda)
      .def_readonly("K", &GammaLimitRecord::K)
      .def_readonly("ratio", &GammaLimitRecord::ratio)
      .def_readonly("symmetric_difference", &GammaLimitRecord::symmetric_difference)
      .def_readonly("design", &GammaLimitRecord::design)
      .def_readonly("extremal", &GammaLimitRecord::extremal);
  m.def("gamma_limit_experiment", &gamma_limit_experiment, py::arg("grid"), py::arg("p"),
        py::arg("alpha"), py::arg("s_values"), py::arg("opts") = OptimizeOptions{},
        py::arg("quadrature") = Quadrature::corrected);

  // --- CLI passthrough ---
  m.def(
      "cli_run",
      [](const std::vector<std::string>& args) {
        const int code = cli_run(args);
        // The embedding process may not flush C++ streams on its own.
        std::cout.flush();
        std::cerr.flush();
        return code;
      },
      py::arg("args"), "Run the command-line interface; returns the exit code.");
}
