#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>

#include "nlod/design_vector.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"

namespace nlod {

/// Numerator/denominator split of the (penalized) Rayleigh quotient.
struct EnergyBreakdown {
  double seminorm_term = 0.0;  ///< (1/2)[u]^p_{s,p}
  double penalty_term = 0.0;   ///< sigma * sum phi |u|^p * cell_measure
  double mass = 0.0;           ///< ||u||_p^p

  double rayleigh() const { return (seminorm_term + penalty_term) / mass; }
};

/// Normalized extremal of a Rayleigh quotient: ||u||_p^p = 1, u >= 0
/// componentwise (constant-sign representative), lambda = rayleigh.
struct Extremal {
  double lambda = 0.0;
  Eigen::VectorXd u;
  int iterations = 0;
  double el_residual = 0.0;
  EnergyBreakdown breakdown;
};

enum class P2Mode { exact, iterative };

struct SolverOptions {
  double tol_lambda = 1e-9;
  double tol_residual = 1e-7;
  int max_iterations = 50000;
  std::uint64_t seed = 0;
  P2Mode p2_mode = P2Mode::exact;
};

/// A seminorm energy model: E(u) with exact gradient, and for p = 2 the
/// symmetric matrix with u^T S u = E(u) enabling the dense eigensolver path.
/// E carries the quotient-numerator 1/2, i.e. E = (1/2)[u]^p for the kernel
/// models and E = (1/2) local_energy for the s = 1 comparison model.
struct EnergyModel {
  double p = 2.0;
  std::function<double(const Eigen::VectorXd&)> energy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::optional<Eigen::MatrixXd> matrix_half;
};

/// E = (1/2) gagliardo_energy with the midpoint kernel quadrature.
EnergyModel midpoint_model(const KernelMatrix& kernel);

/// E = (1/2) gagliardo_energy_corrected (subgrid diagonal completion, 1D).
EnergyModel corrected_model(const KernelMatrix& kernel, const Grid& grid);

/// E = (1/2) local_energy; the Gamma-limit comparison functional.
EnergyModel local_model(const Grid& grid, double p);

/// Hard obstacle solve: minimizes (1/2)[u]^p / ||u||_p^p over u = 0 on A,
/// by eliminating the obstacle degrees of freedom. A must be binary with at
/// least one cell inside and one outside.
Extremal solve_hard(const KernelMatrix& kernel, const Grid& grid, const DesignVector& A,
                    const SolverOptions& opts);

/// Soft obstacle solve: minimizes ((1/2)[u]^p + sigma sum phi|u|^p m) / ||u||_p^p.
/// sigma = 0 returns the exact constant minimizer with lambda = 0.
Extremal solve_soft(const KernelMatrix& kernel, const Grid& grid, const DesignVector& phi,
                    double sigma, const SolverOptions& opts);

/// Model-generic variants; the public solvers above use midpoint_model.
Extremal solve_hard_model(const EnergyModel& model, const Grid& grid, const DesignVector& A,
                          const SolverOptions& opts);
Extremal solve_soft_model(const EnergyModel& model, const Grid& grid, const DesignVector& phi,
                          double sigma, const SolverOptions& opts);

/// Quotient minimization problem over { ||u||_p = 1 } for the general-p
/// backend: numerator energy/gradient callbacks plus the Euler-Lagrange
/// sup-norm residual used in the stopping test.
struct QuotientProblem {
  double p = 2.0;
  double cell_measure = 1.0;
  std::function<double(const Eigen::VectorXd&)> energy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<double(const Eigen::VectorXd&, double)> el_residual;
};

/// Projected gradient descent: Barzilai-Borwein trial step, Armijo
/// backtracking on the quotient, componentwise |u| sign projection, L^p
/// renormalization. Stops when the lambda increment falls below
/// tol_lambda * max(1, lambda) AND the E-L residual falls below tol_residual.
Extremal minimize_quotient(const QuotientProblem& problem, Eigen::VectorXd u0,
                           const SolverOptions& opts);

/// Deterministic uniform double in [0,1) from raw generator bits; standard
/// library distributions are implementation-defined, this mapping is not.
double uniform01(std::uint64_t raw);

}  // namespace nlod
