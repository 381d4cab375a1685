#include "nlod/eigensolver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nlod/errors.hpp"

namespace nlod {

double uniform01(std::uint64_t raw) { return static_cast<double>(raw >> 11) * 0x1.0p-53; }

EnergyModel midpoint_model(const KernelMatrix& kernel) {
  EnergyModel m;
  m.p = kernel.p;
  auto K = std::make_shared<const KernelMatrix>(kernel);
  m.energy = [K](const Eigen::VectorXd& u) { return 0.5 * gagliardo_energy(u, *K); };
  m.gradient = [K](const Eigen::VectorXd& u) {
    return Eigen::VectorXd(0.5 * gagliardo_gradient(u, *K));
  };
  if (kernel.p == 2.0) m.matrix_half = seminorm_matrix_half(kernel);
  return m;
}

EnergyModel corrected_model(const KernelMatrix& kernel, const Grid& grid) {
  if (grid.dim() != 1) {
    throw ValidationError("the corrected quadrature model supports 1D grids only");
  }
  EnergyModel m;
  m.p = kernel.p;
  const double C = diag_correction_constant(kernel.s, kernel.p, grid.h, grid.size() - 1);
  auto K = std::make_shared<const KernelMatrix>(kernel);
  m.energy = [K, grid](const Eigen::VectorXd& u) {
    return 0.5 * gagliardo_energy_corrected(u, *K, grid);
  };
  m.gradient = [K, grid, C](const Eigen::VectorXd& u) {
    Eigen::VectorXd g = 0.5 * gagliardo_gradient(u, *K);
    // gradient of (C/2) * sum_i |slope_i|^p * h with centered slopes
    const int N = grid.size();
    const double h = grid.h;
    const double p = K->p;
    const Eigen::VectorXd slopes = centered_slopes(u, grid);
    Eigen::VectorXd sg = Eigen::VectorXd::Zero(N);
    auto add = [&](int row, int col, double coeff) {
      sg[col] += coeff * p * signed_power(slopes[row], p);
    };
    add(0, 1, 1.0 / h);
    add(0, 0, -1.0 / h);
    add(N - 1, N - 1, 1.0 / h);
    add(N - 1, N - 2, -1.0 / h);
    for (int i = 1; i + 1 < N; ++i) {
      add(i, i + 1, 0.5 / h);
      add(i, i - 1, -0.5 / h);
    }
    g += (0.5 * C * grid.cell_measure) * sg;
    return g;
  };
  if (kernel.p == 2.0) m.matrix_half = corrected_seminorm_matrix_half(kernel, grid);
  return m;
}

EnergyModel local_model(const Grid& grid, double p) {
  EnergyModel m;
  m.p = p;
  m.energy = [grid, p](const Eigen::VectorXd& u) { return 0.5 * local_energy(u, grid, p); };
  m.gradient = [grid, p](const Eigen::VectorXd& u) {
    return Eigen::VectorXd(0.5 * local_gradient(u, grid, p));
  };
  if (p == 2.0) m.matrix_half = local_seminorm_matrix_half(grid);
  return m;
}

namespace {

/// Nonnegative representative normalized to ||u||_p^p = 1.
void sign_normalize(Eigen::VectorXd& u, const Grid& grid, double p) {
  u = u.cwiseAbs();
  const double mass = lp_mass(u, grid, p);
  if (!(mass > 0.0)) {
    throw ValidationError("cannot normalize the zero function in L^p");
  }
  u /= std::pow(mass, 1.0 / p);
}

Eigen::VectorXd initial_guess(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd u(size);
  for (int i = 0; i < size; ++i) u[i] = 1.0 + 1e-3 * (2.0 * uniform01(rng()) - 1.0);
  return u;
}

/// Smallest eigenpair of a dense symmetric matrix.
void smallest_eigenpair(const Eigen::MatrixXd& S, double& value, Eigen::VectorXd& vec) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", 0.0, 0.0, 0);
  }
  value = es.eigenvalues()[0];
  vec = es.eigenvectors().col(0);
}

struct HardSpace {
  std::vector<int> free_cells;
  Eigen::VectorXd embed(const Eigen::VectorXd& v, int full_size) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(full_size);
    for (std::size_t k = 0; k < free_cells.size(); ++k) u[free_cells[k]] = v[static_cast<int>(k)];
    return u;
  }
  Eigen::VectorXd restrict_to(const Eigen::VectorXd& u) const {
    Eigen::VectorXd v(static_cast<int>(free_cells.size()));
    for (std::size_t k = 0; k < free_cells.size(); ++k) v[static_cast<int>(k)] = u[free_cells[k]];
    return v;
  }
};

HardSpace hard_space(const DesignVector& A, int full_size) {
  if (!A.binary) {
    throw ValidationError("hard obstacle set must be a binary design (values in {0,1})");
  }
  HardSpace sp;
  for (int i = 0; i < full_size; ++i) {
    if (A.values[i] == 0.0) sp.free_cells.push_back(i);
  }
  const int inside = full_size - static_cast<int>(sp.free_cells.size());
  if (inside == 0 || sp.free_cells.empty()) {
    throw ValidationError("hard obstacle set must leave at least one cell free and cover at "
                          "least one cell (it is " +
                          std::string(inside == 0 ? "empty" : "the whole domain") + ")");
  }
  return sp;
}

double hard_el_residual(const EnergyModel& model, const Grid& grid, const HardSpace& sp,
                        const Eigen::VectorXd& u, double lambda) {
  const Eigen::VectorXd g = model.gradient(u);
  const double p = model.p;
  double r = 0.0;
  for (int i : sp.free_cells) {
    const double ri = g[i] - lambda * p * signed_power(u[i], p) * grid.cell_measure;
    r = std::max(r, std::abs(ri));
  }
  return r;
}

double soft_el_residual(const EnergyModel& model, const Grid& grid, const DesignVector& phi,
                        double sigma, const Eigen::VectorXd& u, double lambda) {
  const Eigen::VectorXd g = model.gradient(u);
  const double p = model.p;
  double r = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double power = signed_power(u[i], p) * grid.cell_measure;
    const double ri = g[i] + sigma * phi.values[i] * p * power - lambda * p * power;
    r = std::max(r, std::abs(ri));
  }
  return r;
}

}  // namespace

Extremal minimize_quotient(const QuotientProblem& problem, Eigen::VectorXd u0,
                           const SolverOptions& opts) {
  const double p = problem.p;
  const double cm = problem.cell_measure;
  auto mass_of = [&](const Eigen::VectorXd& v) {
    return cm * pairwise_sum(0, static_cast<std::size_t>(v.size()), [&](std::size_t i) {
             return std::pow(std::abs(v[static_cast<int>(i)]), p);
           });
  };

  Eigen::VectorXd u = u0.cwiseAbs();
  {
    const double m0 = mass_of(u);
    if (!(m0 > 0.0)) throw ValidationError("initial guess has zero L^p norm");
    u /= std::pow(m0, 1.0 / p);
  }

  double lambda = problem.energy(u);
  double lambda_prev = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u_prev, grad_prev;
  double step = 1.0;
  int it = 0;

  for (it = 1; it <= opts.max_iterations; ++it) {
    // Euclidean gradient of the quotient at the normalized iterate.
    Eigen::VectorXd grad = problem.gradient(u);
    for (int i = 0; i < u.size(); ++i) grad[i] -= lambda * p * signed_power(u[i], p) * cm;

    const double residual = problem.el_residual(u, lambda);
    const bool lambda_settled =
        std::abs(lambda - lambda_prev) <= opts.tol_lambda * std::max(1.0, std::abs(lambda));
    if (lambda_settled && residual <= opts.tol_residual) break;

    const double gn2 = grad.squaredNorm();
    if (gn2 == 0.0) {
      if (residual <= opts.tol_residual) break;
      throw ConvergenceError("projected gradient stalled with zero gradient but residual " +
                                 std::to_string(residual) + " above tolerance",
                             lambda, residual, it);
    }

    if (u_prev.size() > 0) {
      const Eigen::VectorXd du = u - u_prev;
      const Eigen::VectorXd dg = grad - grad_prev;
      const double denom = du.dot(dg);
      step = denom > 1e-300 ? du.squaredNorm() / denom : 1.0;
      step = std::min(std::max(step, 1e-12), 1e12);
    }
    u_prev = u;
    grad_prev = grad;

    // Armijo backtracking on the quotient with sign projection.
    double t = step;
    bool accepted = false;
    Eigen::VectorXd v;
    double lambda_v = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      v = (u - t * grad).cwiseAbs();
      const double mv = mass_of(v);
      if (mv > 0.0) {
        v /= std::pow(mv, 1.0 / p);
        lambda_v = problem.energy(v);
        if (lambda_v <= lambda - 1e-4 * t * gn2) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (residual <= opts.tol_residual) break;  // at a fixed point within tolerance
      throw ConvergenceError(
          "Armijo backtracking failed at the minimum step with residual " +
              std::to_string(residual) + " above tolerance " + std::to_string(opts.tol_residual),
          lambda, residual, it);
    }

    lambda_prev = lambda;
    lambda = lambda_v;
    u = v;
  }

  if (it > opts.max_iterations) {
    // The loop exhausted its budget; give the final iterate one fair check.
    const double residual = problem.el_residual(u, lambda);
    const bool lambda_settled =
        std::abs(lambda - lambda_prev) <= opts.tol_lambda * std::max(1.0, std::abs(lambda));
    if (!(lambda_settled && residual <= opts.tol_residual)) {
      throw ConvergenceError("quotient minimization did not converge in " +
                                 std::to_string(opts.max_iterations) + " iterations",
                             lambda, residual, opts.max_iterations);
    }
    it = opts.max_iterations;
  }

  Extremal e;
  e.lambda = lambda;
  e.u = u;
  e.iterations = it;
  e.el_residual = problem.el_residual(u, lambda);
  return e;
}

Extremal solve_hard_model(const EnergyModel& model, const Grid& grid, const DesignVector& A,
                          const SolverOptions& opts) {
  const int N = grid.size();
  if (A.size() != N) {
    throw ValidationError("obstacle set size does not match the grid");
  }
  const HardSpace sp = hard_space(A, N);
  const int F = static_cast<int>(sp.free_cells.size());
  const double p = model.p;

  Extremal e;
  if (p == 2.0 && opts.p2_mode == P2Mode::exact && model.matrix_half.has_value()) {
    const Eigen::MatrixXd& S = *model.matrix_half;
    Eigen::MatrixXd Sff(F, F);
    for (int a = 0; a < F; ++a)
      for (int b = 0; b < F; ++b) Sff(a, b) = S(sp.free_cells[a], sp.free_cells[b]);
    double ev;
    Eigen::VectorXd vec;
    smallest_eigenpair(Sff, ev, vec);
    Eigen::VectorXd u = sp.embed(vec, N);
    sign_normalize(u, grid, p);
    e.lambda = ev / grid.cell_measure;
    e.u = u;
    e.iterations = 1;
  } else {
    QuotientProblem q;
    q.p = p;
    q.cell_measure = grid.cell_measure;
    q.energy = [&](const Eigen::VectorXd& v) { return model.energy(sp.embed(v, N)); };
    q.gradient = [&](const Eigen::VectorXd& v) {
      return sp.restrict_to(model.gradient(sp.embed(v, N)));
    };
    q.el_residual = [&](const Eigen::VectorXd& v, double lam) {
      return hard_el_residual(model, grid, sp, sp.embed(v, N), lam);
    };
    Extremal reduced = minimize_quotient(q, initial_guess(F, opts.seed), opts);
    e = reduced;
    e.u = sp.embed(reduced.u, N);
  }

  e.breakdown.seminorm_term = model.energy(e.u);
  e.breakdown.penalty_term = 0.0;
  e.breakdown.mass = lp_mass(e.u, grid, p);
  e.el_residual = hard_el_residual(model, grid, sp, e.u, e.lambda);
  return e;
}

Extremal solve_soft_model(const EnergyModel& model, const Grid& grid, const DesignVector& phi,
                          double sigma, const SolverOptions& opts) {
  const int N = grid.size();
  if (phi.size() != N) {
    throw ValidationError("potential size does not match the grid");
  }
  if (sigma < 0.0) {
    throw ValidationError("sigma must be >= 0, got " + std::to_string(sigma));
  }
  const double p = model.p;

  if (sigma == 0.0) {
    // The unconstrained problem is trivial: constants have zero energy.
    Extremal e;
    e.lambda = 0.0;
    e.u = Eigen::VectorXd::Constant(N, std::pow(grid.domain.measure(), -1.0 / p));
    e.iterations = 0;
    e.el_residual = 0.0;
    e.breakdown = {0.0, 0.0, lp_mass(e.u, grid, p)};
    return e;
  }

  Extremal e;
  if (p == 2.0 && opts.p2_mode == P2Mode::exact && model.matrix_half.has_value()) {
    Eigen::MatrixXd S = *model.matrix_half;
    for (int i = 0; i < N; ++i) S(i, i) += sigma * grid.cell_measure * phi.values[i];
    double ev;
    Eigen::VectorXd vec;
    smallest_eigenpair(S, ev, vec);
    Eigen::VectorXd u = vec;
    sign_normalize(u, grid, p);
    e.lambda = ev / grid.cell_measure;
    e.u = u;
    e.iterations = 1;
  } else {
    QuotientProblem q;
    q.p = p;
    q.cell_measure = grid.cell_measure;
    q.energy = [&](const Eigen::VectorXd& v) {
      return model.energy(v) + penalty_energy(v, phi, sigma, grid, p);
    };
    q.gradient = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd g = model.gradient(v);
      for (int i = 0; i < N; ++i)
        g[i] += sigma * phi.values[i] * p * signed_power(v[i], p) * grid.cell_measure;
      return g;
    };
    q.el_residual = [&](const Eigen::VectorXd& v, double lam) {
      return soft_el_residual(model, grid, phi, sigma, v, lam);
    };
    e = minimize_quotient(q, initial_guess(N, opts.seed), opts);
  }

  e.breakdown.seminorm_term = model.energy(e.u);
  e.breakdown.penalty_term = penalty_energy(e.u, phi, sigma, grid, p);
  e.breakdown.mass = lp_mass(e.u, grid, p);
  e.el_residual = soft_el_residual(model, grid, phi, sigma, e.u, e.lambda);
  return e;
}

Extremal solve_hard(const KernelMatrix& kernel, const Grid& grid, const DesignVector& A,
                    const SolverOptions& opts) {
  return solve_hard_model(midpoint_model(kernel), grid, A, opts);
}

Extremal solve_soft(const KernelMatrix& kernel, const Grid& grid, const DesignVector& phi,
                    double sigma, const SolverOptions& opts) {
  return solve_soft_model(midpoint_model(kernel), grid, phi, sigma, opts);
}

}  // namespace nlod
