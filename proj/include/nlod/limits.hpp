#pragma once

#include <vector>

#include "nlod/design.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"

namespace nlod {

enum class KMethod { gamma, sphere };

/// The constant K(n,p) = average of |z_n|^p over the unit sphere S^{n-1}.
///
/// gamma method: Gamma(n/2) Gamma((p+1)/2) / (sqrt(pi) Gamma((n+p)/2)), any n.
/// sphere method: n = 1 exact two-point average (= 1); n = 2 periodic
/// 2048-point trapezoid of |sin theta|^p; n = 3 exact surface integral
/// 1/(p+1); n > 3 unsupported (use the gamma method).
double compute_K(int n, double p, KMethod method);

/// One rung of the penalty ladder.
struct ContinuationRecord {
  double sigma = 0.0;
  double lambda = 0.0;            ///< lambda(sigma) = best soft eigenvalue found
  double penalty_residual = 0.0;  ///< integral of phi |u|^p (bounded by hard lambda / sigma)
  DesignVector design;
  Extremal extremal;
};

/// Penalty continuation sigma -> infinity against the hard optimum reference.
struct ContinuationLadder {
  std::vector<double> sigma_values;
  std::vector<ContinuationRecord> records;
  double hard_lambda = 0.0;
  DesignVector hard_design;
  Extremal hard_extremal;
};

/// Runs the sigma ladder: solves the hard problem once as the reference, then
/// optimizes the soft problem per rung with the previous rung's design as the
/// warm start. Each reported lambda(sigma) is the minimum of the soft
/// eigenvalue over the pool of all rung designs plus the hard optimal set,
/// which makes the ladder monotone and keeps every reported value the exact
/// eigenvalue of an admissible design.
ContinuationLadder sigma_continuation(const KernelMatrix& assembled_at_s, const Grid& grid,
                                      double alpha, const std::vector<double>& sigma_values,
                                      const OptimizeOptions& opts = {});

/// Named smooth sample profiles for the pointwise seminorm limit check.
enum class BbmProfile { constant, linear, cos_pi_x };

/// One row of the pointwise (1-s)[u]^p -> K(n,p) * integral |u'|^p table.
struct BbmRow {
  double s = 0.0;
  double scaled_seminorm = 0.0;   ///< (1-s) * corrected Gagliardo energy of u
  double scaled_midpoint = 0.0;   ///< (1-s) * plain midpoint Gagliardo energy of u
  double target = 0.0;            ///< K(n,p) * local_energy(u)
  double ratio = 0.0;             ///< scaled_seminorm / target (0 when both sides vanish)
  double ratio_midpoint = 0.0;    ///< scaled_midpoint / target (0 when both sides vanish)
};

/// Cell-center samples of a named profile on a 1D grid.
Eigen::VectorXd bbm_profile_samples(BbmProfile profile, const Grid& grid);

/// Evaluates the fixed-function limit table on a 1D grid for s_values
/// increasing toward 1. The corrected column is the quantity under test; the
/// midpoint column documents the raw quadrature's O(h^{p(1-s)}) deficit.
std::vector<BbmRow> bbm_pointwise_check(BbmProfile profile, const Grid& grid, double p,
                                        const std::vector<double>& s_values);

/// One s-value of the Gamma-limit experiment.
struct GammaLimitRecord {
  double s = 0.0;
  double lambda = 0.0;         ///< hard design optimum Lambda_s(alpha)
  double scaled_lambda = 0.0;  ///< (1-s) * lambda
  double local_lambda = 0.0;   ///< local reference Lambda(alpha), shared by all rows
  double K = 0.0;              ///< K(n,p)
  double ratio = 0.0;          ///< scaled_lambda / (K * local_lambda)
  int symmetric_difference = 0;  ///< cells differing between the s-design and the local design
  DesignVector design;
  Extremal extremal;
};

enum class Quadrature { corrected, midpoint };

/// s -> 1 experiment: per s, optimizes the hard design under the fractional
/// energy (corrected quadrature by default; corrected is 1D-only) and compares
/// (1-s) Lambda_s(alpha) against K(n,p) Lambda(alpha), where Lambda(alpha) is
/// obtained by the same alternating scheme with the local Dirichlet energy.
std::vector<GammaLimitRecord> gamma_limit_experiment(const Grid& grid, double p, double alpha,
                                                     const std::vector<double>& s_values,
                                                     const OptimizeOptions& opts = {},
                                                     Quadrature quadrature = Quadrature::corrected);

}  // namespace nlod
