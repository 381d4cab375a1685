#pragma once

#include <Eigen/Core>
#include <cstddef>

#include "nlod/design_vector.hpp"
#include "nlod/geometry.hpp"

namespace nlod {

/// Dense symmetric weights discretizing the singular kernel |x-y|^{-(n+sp)}
/// by midpoint (cell-center) quadrature with the diagonal excluded:
///   W_ij = cell_measure^2 / |x_i - x_j|^{n+sp},  W_ii = 0.
struct KernelMatrix {
  double s = 0.5;
  double p = 2.0;
  int n = 1;
  double h = 0.0;
  double cell_measure = 0.0;
  Eigen::MatrixXd weights;

  int size() const { return static_cast<int>(weights.rows()); }
};

/// Fixed-shape pairwise summation tree over f(lo..hi-1): deterministic
/// independently of chunking, so energies are bit-reproducible.
template <class F>
double pairwise_sum(std::size_t lo, std::size_t hi, F&& f) {
  const std::size_t count = hi - lo;
  if (count <= 32) {
    double acc = 0.0;
    for (std::size_t k = lo; k < hi; ++k) acc += f(k);
    return acc;
  }
  const std::size_t mid = lo + count / 2;
  return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

/// Signed p-power: |t|^{p-2} t, with phi_p(0) = 0 for every p > 1.
double signed_power(double t, double p);

KernelMatrix assemble_kernel(const Grid& grid, double s, double p);

/// [u]^p_disc = sum_{i != j} W_ij |u_i - u_j|^p  (each unordered pair twice).
double gagliardo_energy(const Eigen::VectorXd& u, const KernelMatrix& kernel);

/// Exact gradient of gagliardo_energy:
///   g_i = 2 p sum_j W_ij |u_i - u_j|^{p-2} (u_i - u_j).
/// For p = 2 this is the matrix action 4 (D - W) u with D the row-sum diagonal.
Eigen::VectorXd gagliardo_gradient(const Eigen::VectorXd& u, const KernelMatrix& kernel);

/// sigma * sum_i phi_i |u_i|^p * cell_measure.
double penalty_energy(const Eigen::VectorXd& u, const DesignVector& phi, double sigma,
                      const Grid& grid, double p);

/// ||u||_p^p = sum_i |u_i|^p * cell_measure.
double lp_mass(const Eigen::VectorXd& u, const Grid& grid, double p);

/// Forward-difference p-Dirichlet energy sum |(u_{i+1}-u_i)/h|^p h^n per axis,
/// one-sided at the high boundary (no wraparound).
double local_energy(const Eigen::VectorXd& u, const Grid& grid, double p);

/// Exact gradient of local_energy.
Eigen::VectorXd local_gradient(const Eigen::VectorXd& u, const Grid& grid, double p);

/// Subgrid completion constant C(s,p,h) for the midpoint kernel quadrature on
/// a 1D grid: the near-diagonal mass the midpoint rule misses, computed from
/// the exact cell-pair integrals of |x-y|^{p(1-s)-1} versus their midpoint
/// values, summed over lags 1..max_lag plus the self-cell block (exact for
/// linear profiles on the lattice). The corrected seminorm is
///   [u]^p_corr = gagliardo_energy(u) + C(s,p,h) * sum_i |slope_i|^p * h.
double diag_correction_constant(double s, double p, double h, int max_lag);

/// Cell-center slopes: centered differences in the interior, one-sided at the
/// two boundary cells. 1D grids only.
Eigen::VectorXd centered_slopes(const Eigen::VectorXd& u, const Grid& grid);

/// Diagonal-corrected Gagliardo seminorm (1D): midpoint pair sum plus the
/// subgrid completion term. Converges to the continuum [u]^p_{s,p} for smooth
/// u even as s -> 1, where the raw midpoint sum loses the near-diagonal mass.
double gagliardo_energy_corrected(const Eigen::VectorXd& u, const KernelMatrix& kernel,
                                  const Grid& grid);

/// Symmetric matrix S with u^T S u = (1/2) gagliardo_energy(u) for p = 2,
/// i.e. S = D - W with D the row-sum diagonal of W.
Eigen::MatrixXd seminorm_matrix_half(const KernelMatrix& kernel);

/// p = 2 matrix of the corrected half-energy: D - W + (C/2) h G^T G with G the
/// centered-slope operator. 1D grids only.
Eigen::MatrixXd corrected_seminorm_matrix_half(const KernelMatrix& kernel, const Grid& grid);

/// Symmetric matrix S with u^T S u = (1/2) local_energy(u) for p = 2.
Eigen::MatrixXd local_seminorm_matrix_half(const Grid& grid);

}  // namespace nlod
