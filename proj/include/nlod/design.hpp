#pragma once

#include <optional>
#include <vector>

#include "nlod/design_vector.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"

namespace nlod {

/// Outcome of a design optimization (alternating minimization or oracle).
struct DesignResult {
  double lambda = 0.0;          ///< best objective value visited
  Extremal extremal;            ///< extremal attaining `lambda` for `design`
  DesignVector design;          ///< best design visited
  int outer_iterations = 0;     ///< completed outer (solve + update) rounds
  std::vector<double> objective_trace;  ///< objective after each outer solve; non-increasing
  bool cycle_detected = false;  ///< alternation revisited an older design (floating-point plateau)
};

enum class BathtubMode { relaxed, binary };

/// Minimizer of sum_i phi_i |u_i|^p * cell_measure over the admissible class B_alpha.
///
/// Cells are ranked by |u_i| ascending, ties broken by ascending cell index.
/// Relaxed mode fills whole cells and places the unique fractional value on the
/// pivot cell so that the mass equals alpha*|Omega| exactly. Binary mode
/// requires alpha*N to be an integer and selects exactly that many cells.
DesignVector bathtub_update(const Eigen::VectorXd& u, double alpha, const Grid& grid,
                            BathtubMode mode);

struct OptimizeOptions {
  SolverOptions solver;
  int max_outer_iterations = 100;
  /// Seed the search with every contiguous index block of the required
  /// cardinality (the hard alternation is stationary at any binary design, so
  /// a single start certifies only itself).
  bool multistart = true;
  /// Polish the incumbent with strict-improvement single-cell swaps before the
  /// final alternation rounds.
  bool local_search = true;
  /// Optional explicit starting design; replaces the multistart portfolio.
  std::optional<DesignVector> initial_design;
};

/// Hard-obstacle design optimization: minimizes lambda(A) over binary designs
/// of mass alpha*|Omega| by (i) seeding from a portfolio of candidate sets,
/// (ii) strict-improvement single-swap descent, and (iii) alternating
/// solve_hard / binary bathtub rounds until the design repeats.
DesignResult optimize_hard(const KernelMatrix& kernel, const Grid& grid, double alpha,
                           const OptimizeOptions& opts = {});

/// Same as optimize_hard but with an explicit energy model (corrected
/// quadrature or local Dirichlet energy instead of the midpoint kernel).
DesignResult optimize_hard_model(const EnergyModel& model, const Grid& grid, double alpha,
                                 const OptimizeOptions& opts = {});

/// Soft-obstacle design optimization: alternates solve_soft with the relaxed
/// bathtub update. The returned design is a characteristic function up to at
/// most one fractional cell.
DesignResult optimize_soft(const KernelMatrix& kernel, const Grid& grid, double alpha,
                           double sigma, const OptimizeOptions& opts = {});

/// Same as optimize_soft but with an explicit energy model.
DesignResult optimize_soft_model(const EnergyModel& model, const Grid& grid, double alpha,
                                 double sigma, const OptimizeOptions& opts = {});

/// Brute-force global minimum over all binary designs of cardinality alpha*N.
/// `sigma` empty selects the hard problem, otherwise the soft problem at that
/// penalty. Refuses instances with more than 10^6 subsets. Subset solves are
/// distributed over `threads` workers by rank stride with a deterministic
/// reduction: min by (lambda, then lexicographic cell indices).
DesignResult exhaustive_oracle(const KernelMatrix& kernel, const Grid& grid, double alpha,
                               std::optional<double> sigma = std::nullopt, int threads = 1,
                               const SolverOptions& solver = {});

/// Number of binary designs the oracle would enumerate (C(N, alpha*N)).
double oracle_subset_count(int cells, int chosen);

}  // namespace nlod
