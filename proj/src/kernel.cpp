#include "nlod/kernel.hpp"

#include <cmath>
#include <string>

#include "nlod/errors.hpp"

namespace nlod {

namespace {

void check_size(const Eigen::VectorXd& u, int n, const char* op) {
  if (static_cast<int>(u.size()) != n) {
    throw ValidationError(std::string(op) + ": expected " + std::to_string(n) +
                          " cell values, got " + std::to_string(u.size()));
  }
}

}  // namespace

double signed_power(double t, double p) {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

KernelMatrix assemble_kernel(const Grid& grid, double s, double p) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ValidationError("s must satisfy 0 < s < 1, got " + std::to_string(s));
  }
  if (!(p > 1.0)) {
    throw ValidationError("p must satisfy p > 1, got " + std::to_string(p));
  }
  KernelMatrix K;
  K.s = s;
  K.p = p;
  K.n = grid.dim();
  K.h = grid.h;
  K.cell_measure = grid.cell_measure;

  const int N = grid.size();
  const double exponent = K.n + s * p;
  const double cm2 = grid.cell_measure * grid.cell_measure;
  K.weights.resize(N, N);
  for (int i = 0; i < N; ++i) {
    K.weights(i, i) = 0.0;
    for (int j = i + 1; j < N; ++j) {
      const double w = cm2 / std::pow(grid.center_distance(i, j), exponent);
      K.weights(i, j) = w;
      K.weights(j, i) = w;
    }
  }
  return K;
}

double gagliardo_energy(const Eigen::VectorXd& u, const KernelMatrix& kernel) {
  const int N = kernel.size();
  check_size(u, N, "gagliardo_energy");
  const double p = kernel.p;
  const double upper = pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t i) {
    return pairwise_sum(i + 1, static_cast<std::size_t>(N), [&](std::size_t j) {
      const double d = u[static_cast<int>(i)] - u[static_cast<int>(j)];
      return kernel.weights(static_cast<int>(i), static_cast<int>(j)) * std::pow(std::abs(d), p);
    });
  });
  return 2.0 * upper;  // each unordered pair is counted twice in the Omega x Omega sum
}

Eigen::VectorXd gagliardo_gradient(const Eigen::VectorXd& u, const KernelMatrix& kernel) {
  const int N = kernel.size();
  check_size(u, N, "gagliardo_gradient");
  const double p = kernel.p;
  Eigen::VectorXd g(N);
  for (int i = 0; i < N; ++i) {
    const double row = pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t j) {
      const int jj = static_cast<int>(j);
      if (jj == i) return 0.0;
      return kernel.weights(i, jj) * signed_power(u[i] - u[jj], p);
    });
    g[i] = 2.0 * p * row;
  }
  return g;
}

double penalty_energy(const Eigen::VectorXd& u, const DesignVector& phi, double sigma,
                      const Grid& grid, double p) {
  const int N = grid.size();
  check_size(u, N, "penalty_energy");
  check_size(phi.values, N, "penalty_energy (design)");
  if (sigma < 0.0) {
    throw ValidationError("sigma must be >= 0, got " + std::to_string(sigma));
  }
  if (sigma == 0.0) return 0.0;
  return sigma * grid.cell_measure *
         pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t i) {
           const int ii = static_cast<int>(i);
           return phi.values[ii] * std::pow(std::abs(u[ii]), p);
         });
}

double lp_mass(const Eigen::VectorXd& u, const Grid& grid, double p) {
  const int N = grid.size();
  check_size(u, N, "lp_mass");
  return grid.cell_measure * pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t i) {
           return std::pow(std::abs(u[static_cast<int>(i)]), p);
         });
}

double local_energy(const Eigen::VectorXd& u, const Grid& grid, double p) {
  const int N = grid.size();
  check_size(u, N, "local_energy");
  const double scale = std::pow(grid.h, -p) * grid.cell_measure;
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  double total = 0.0;
  // x-direction forward differences within each row
  total += pairwise_sum(0, static_cast<std::size_t>(ny), [&](std::size_t iy) {
    return pairwise_sum(0, static_cast<std::size_t>(nx - 1), [&](std::size_t ix) {
      const int a = static_cast<int>(iy) * nx + static_cast<int>(ix);
      return std::pow(std::abs(u[a + 1] - u[a]), p);
    });
  });
  if (grid.dim() == 2) {
    total += pairwise_sum(0, static_cast<std::size_t>(ny - 1), [&](std::size_t iy) {
      return pairwise_sum(0, static_cast<std::size_t>(nx), [&](std::size_t ix) {
        const int a = static_cast<int>(iy) * nx + static_cast<int>(ix);
        return std::pow(std::abs(u[a + nx] - u[a]), p);
      });
    });
  }
  return scale * total;
}

Eigen::VectorXd local_gradient(const Eigen::VectorXd& u, const Grid& grid, double p) {
  const int N = grid.size();
  check_size(u, N, "local_gradient");
  const double scale = p * std::pow(grid.h, -p) * grid.cell_measure;
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int a = iy * nx + ix;
      const double t = signed_power(u[a + 1] - u[a], p);
      g[a + 1] += scale * t;
      g[a] -= scale * t;
    }
  }
  if (grid.dim() == 2) {
    for (int iy = 0; iy + 1 < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int a = iy * nx + ix;
        const double t = signed_power(u[a + nx] - u[a], p);
        g[a + nx] += scale * t;
        g[a] -= scale * t;
      }
    }
  }
  return g;
}

double diag_correction_constant(double s, double p, double h, int max_lag) {
  if (!(s > 0.0 && s < 1.0) || !(p > 1.0)) {
    throw ValidationError("diag_correction_constant requires 0 < s < 1 < p");
  }
  const double q = p * (1.0 - s) - 1.0;  // kernel power of |x-y| after the |u|^p Taylor factor
  // Self-cell block: integral of |x-y|^q over one cell pair with itself.
  double c = 2.0 / ((q + 1.0) * (q + 2.0));
  // Lag blocks: exact integral minus the midpoint value, per ordered pair.
  auto f = [&](double k) { return std::pow(k, q + 2.0); };
  for (int k = 1; k <= max_lag; ++k) {
    const double exact = (f(k + 1.0) - 2.0 * f(k) + f(k - 1.0)) / ((q + 1.0) * (q + 2.0));
    c += 2.0 * (exact - std::pow(static_cast<double>(k), q));
  }
  return c * std::pow(h, p * (1.0 - s));
}

Eigen::VectorXd centered_slopes(const Eigen::VectorXd& u, const Grid& grid) {
  if (grid.dim() != 1) {
    throw ValidationError("centered_slopes supports 1D grids only");
  }
  const int N = grid.size();
  check_size(u, N, "centered_slopes");
  Eigen::VectorXd g(N);
  const double h = grid.h;
  g[0] = (u[1] - u[0]) / h;
  g[N - 1] = (u[N - 1] - u[N - 2]) / h;
  for (int i = 1; i + 1 < N; ++i) g[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  return g;
}

double gagliardo_energy_corrected(const Eigen::VectorXd& u, const KernelMatrix& kernel,
                                  const Grid& grid) {
  if (grid.dim() != 1) {
    throw ValidationError("gagliardo_energy_corrected supports 1D grids only");
  }
  const int N = grid.size();
  const double C = diag_correction_constant(kernel.s, kernel.p, grid.h, N - 1);
  const Eigen::VectorXd slopes = centered_slopes(u, grid);
  const double sub = grid.cell_measure *
                     pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t i) {
                       return std::pow(std::abs(slopes[static_cast<int>(i)]), kernel.p);
                     });
  return gagliardo_energy(u, kernel) + C * sub;
}

Eigen::MatrixXd seminorm_matrix_half(const KernelMatrix& kernel) {
  const int N = kernel.size();
  Eigen::MatrixXd L = -kernel.weights;
  for (int i = 0; i < N; ++i) {
    L(i, i) = pairwise_sum(0, static_cast<std::size_t>(N), [&](std::size_t j) {
      return kernel.weights(i, static_cast<int>(j));
    });
  }
  return L;
}

Eigen::MatrixXd corrected_seminorm_matrix_half(const KernelMatrix& kernel, const Grid& grid) {
  if (grid.dim() != 1) {
    throw ValidationError("corrected_seminorm_matrix_half supports 1D grids only");
  }
  const int N = grid.size();
  const double C = diag_correction_constant(kernel.s, kernel.p, grid.h, N - 1);
  Eigen::MatrixXd L = seminorm_matrix_half(kernel);

  // Slope operator rows: cell 0 -> (u1-u0)/h, cell N-1 -> one-sided,
  // interior -> (u_{i+1}-u_{i-1})/(2h). Accumulate (C/2) h G^T G directly.
  const double w = 0.5 * C * grid.h;
  auto add_row = [&](int c0, double v0, int c1, double v1) {
    L(c0, c0) += w * v0 * v0;
    L(c0, c1) += w * v0 * v1;
    L(c1, c0) += w * v1 * v0;
    L(c1, c1) += w * v1 * v1;
  };
  const double inv_h = 1.0 / grid.h;
  add_row(0, -inv_h, 1, inv_h);
  add_row(N - 2, -inv_h, N - 1, inv_h);
  for (int i = 1; i + 1 < N; ++i) add_row(i - 1, -0.5 * inv_h, i + 1, 0.5 * inv_h);
  return L;
}

Eigen::MatrixXd local_seminorm_matrix_half(const Grid& grid) {
  const int N = grid.size();
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  const double w = 0.5 * std::pow(grid.h, -2.0) * grid.cell_measure;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  auto add_edge = [&](int a, int b) {
    L(a, a) += w;
    L(b, b) += w;
    L(a, b) -= w;
    L(b, a) -= w;
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) add_edge(iy * nx + ix, iy * nx + ix + 1);
  if (grid.dim() == 2) {
    for (int iy = 0; iy + 1 < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) add_edge(iy * nx + ix, (iy + 1) * nx + ix);
  }
  return L;
}

}  // namespace nlod
