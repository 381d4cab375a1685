#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "nlod/design_vector.hpp"
#include "nlod/eigensolver.hpp"
#include "nlod/errors.hpp"
#include "nlod/geometry.hpp"
#include "nlod/kernel.hpp"

using namespace nlod;

namespace {

Eigen::VectorXd linear_profile(const Grid& grid) {
  Eigen::VectorXd u(grid.size());
  for (int i = 0; i < grid.size(); ++i) u[i] = grid.centers[static_cast<std::size_t>(i)][0];
  return u;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = 2.0 * uniform01(rng()) - 1.0;
  return u;
}

}  // namespace

TEST_CASE("kernel weights: symmetry, zero diagonal, closed form at N = 2") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {2});
  const KernelMatrix k = assemble_kernel(g, 0.5, 2.0);
  CHECK(k.size() == 2);
  CHECK(k.weights(0, 0) == 0.0);
  CHECK(k.weights(1, 1) == 0.0);
  // W_01 = h^2 / |x_0 - x_1|^{1 + sp} = 0.25 / 0.5^2 = 1.
  CHECK(k.weights(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.weights(0, 1) == k.weights(1, 0));
}

TEST_CASE("kernel parameter validation") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {4});
  CHECK_THROWS_AS(assemble_kernel(g, 0.0, 2.0), ValidationError);
  CHECK_THROWS_AS(assemble_kernel(g, 1.0, 2.0), ValidationError);
  CHECK_THROWS_AS(assemble_kernel(g, 0.5, 1.0), ValidationError);
}

TEST_CASE("gagliardo energy: two cells, closed form") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {2});
  const KernelMatrix k = assemble_kernel(g, 0.5, 2.0);
  Eigen::VectorXd u(2);
  u << 0.0, 1.0;
  // Both ordered pairs contribute W_01 * 1^2 = 1.
  CHECK(gagliardo_energy(u, k) == doctest::Approx(2.0).epsilon(1e-15));

  const Eigen::VectorXd grad = gagliardo_gradient(u, k);
  CHECK(grad[0] == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(grad[1] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("gagliardo energy vanishes on constants and is translation invariant") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {12});
  const KernelMatrix k = assemble_kernel(g, 0.4, 2.5);
  CHECK(gagliardo_energy(Eigen::VectorXd::Constant(12, 3.7), k) == 0.0);

  const Eigen::VectorXd u = random_vector(12, 11);
  const Eigen::VectorXd shifted = u.array() + 0.9;
  CHECK(gagliardo_energy(u, k) == doctest::Approx(gagliardo_energy(shifted, k)).epsilon(1e-12));
}

TEST_CASE("gagliardo gradient matches central finite differences") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {10});
  for (const double p : {2.0, 2.5, 3.5}) {
    const KernelMatrix k = assemble_kernel(g, 0.6, p);
    const Eigen::VectorXd u = random_vector(10, 1000 + static_cast<std::uint64_t>(10 * p));
    const Eigen::VectorXd grad = gagliardo_gradient(u, k);
    for (int i = 0; i < 10; ++i) {
      const double eps = 1e-6;
      Eigen::VectorXd up = u, dn = u;
      up[i] += eps;
      dn[i] -= eps;
      const double fd = (gagliardo_energy(up, k) - gagliardo_energy(dn, k)) / (2.0 * eps);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("p = 2 half-energy matrix reproduces the pair sum") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {9});
  const KernelMatrix k = assemble_kernel(g, 0.5, 2.0);
  const Eigen::MatrixXd S = seminorm_matrix_half(k);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Eigen::VectorXd u = random_vector(9, seed);
    const double quad = u.dot(S * u);
    CHECK(quad == doctest::Approx(0.5 * gagliardo_energy(u, k)).epsilon(1e-12));
  }
}

TEST_CASE("corrected quadrature is exact for linear profiles when p(1-s) = 1") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {64});
  const KernelMatrix k = assemble_kernel(g, 0.5, 2.0);
  const Eigen::VectorXd u = linear_profile(g);
  // Continuum value: double integral of |x-y|^{p(1-s)-1} over the unit square = 1.
  CHECK(gagliardo_energy_corrected(u, k, g) == doctest::Approx(1.0).epsilon(1e-12));
  // The raw midpoint sum misses exactly the near-diagonal mass h.
  CHECK(gagliardo_energy(u, k) == doctest::Approx(1.0 - g.h).epsilon(1e-12));
}

TEST_CASE("corrected half-energy matrix matches the corrected energy functional") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {16});
  const KernelMatrix k = assemble_kernel(g, 0.7, 2.0);
  const Eigen::MatrixXd S = corrected_seminorm_matrix_half(k, g);
  for (std::uint64_t seed : {5ull, 6ull}) {
    const Eigen::VectorXd u = random_vector(16, seed);
    CHECK(u.dot(S * u) == doctest::Approx(0.5 * gagliardo_energy_corrected(u, k, g)).epsilon(1e-12));
  }
}

TEST_CASE("diag correction constant: closed form at p(1-s) = 1") {
  // q = p(1-s) - 1 = 0: every lag block cancels, the self block gives 1,
  // and the h-scaling is h^{p(1-s)} = h.
  CHECK(diag_correction_constant(0.5, 2.0, 1.0, 10) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(diag_correction_constant(0.5, 2.0, 0.25, 50) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(diag_correction_constant(0.75, 4.0, 1.0, 10) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(diag_correction_constant(1.5, 2.0, 0.1, 10), ValidationError);
}

TEST_CASE("centered slopes: exact for linear data") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {8});
  const Eigen::VectorXd u = 3.0 * linear_profile(g);
  const Eigen::VectorXd slopes = centered_slopes(u, g);
  for (int i = 0; i < 8; ++i) CHECK(slopes[i] == doctest::Approx(3.0).epsilon(1e-13));

  const Grid g2 = build_grid(make_rectangle(0.0, 1.0, 0.0, 1.0), {4, 4});
  CHECK_THROWS_AS(centered_slopes(Eigen::VectorXd::Zero(16), g2), ValidationError);
}

TEST_CASE("local energy: linear and cosine profiles") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {64});
  const Eigen::VectorXd lin = linear_profile(g);
  // Forward differences: N-1 terms of value h each.
  CHECK(local_energy(lin, g, 2.0) == doctest::Approx(1.0 - g.h).epsilon(1e-12));

  const Grid fine = build_grid(make_interval(0.0, 1.0), {256});
  Eigen::VectorXd cosu(fine.size());
  for (int i = 0; i < fine.size(); ++i) {
    cosu[i] = std::cos(3.14159265358979323846 * fine.centers[static_cast<std::size_t>(i)][0]);
  }
  // integral of |u'|^2 = pi^2 / 2
  CHECK(local_energy(cosu, fine, 2.0) ==
        doctest::Approx(4.9348022005446793).epsilon(1e-2));
}

TEST_CASE("local gradient matches finite differences, 1D and 2D") {
  const Grid g1 = build_grid(make_interval(0.0, 1.0), {7});
  const Grid g2 = build_grid(make_rectangle(0.0, 1.0, 0.0, 1.0), {3, 3});
  for (const Grid* g : {&g1, &g2}) {
    for (const double p : {2.0, 3.0}) {
      const Eigen::VectorXd u = random_vector(g->size(), 77);
      const Eigen::VectorXd grad = local_gradient(u, *g, p);
      for (int i = 0; i < g->size(); ++i) {
        const double eps = 1e-6;
        Eigen::VectorXd up = u, dn = u;
        up[i] += eps;
        dn[i] -= eps;
        const double fd = (local_energy(up, *g, p) - local_energy(dn, *g, p)) / (2.0 * eps);
        CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("penalty energy and L^p mass") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {4});
  Eigen::VectorXd u(4);
  u << 1.0, -2.0, 0.0, 3.0;
  CHECK(lp_mass(u, g, 2.0) == doctest::Approx(0.25 * 14.0).epsilon(1e-15));

  Eigen::VectorXd pv(4);
  pv << 1.0, 0.5, 0.0, 0.0;
  const DesignVector phi = make_design(pv, g);
  CHECK(penalty_energy(u, phi, 2.0, g, 2.0) ==
        doctest::Approx(2.0 * 0.25 * (1.0 * 1.0 + 0.5 * 4.0)).epsilon(1e-15));
  CHECK(penalty_energy(u, phi, 0.0, g, 2.0) == 0.0);
  CHECK_THROWS_AS(penalty_energy(u, phi, -1.0, g, 2.0), ValidationError);
}

TEST_CASE("signed power") {
  CHECK(signed_power(0.0, 2.5) == 0.0);
  CHECK(signed_power(2.0, 2.0) == 2.0);
  CHECK(signed_power(-2.0, 2.0) == -2.0);
  CHECK(signed_power(-3.0, 3.0) == doctest::Approx(-9.0).epsilon(1e-15));
}

TEST_CASE("pairwise sum is chunk-shape deterministic and correct") {
  std::vector<double> xs(1000);
  std::mt19937_64 rng(123);
  for (auto& x : xs) x = uniform01(rng());
  const double total = pairwise_sum(0, xs.size(), [&](std::size_t i) { return xs[i]; });
  double plain = 0.0;
  for (double x : xs) plain += x;
  CHECK(total == doctest::Approx(plain).epsilon(1e-12));
  // Same tree, same bits.
  CHECK(total == pairwise_sum(0, xs.size(), [&](std::size_t i) { return xs[i]; }));
}

TEST_CASE("design vectors: validation and cell lists") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {4});
  const DesignVector d = design_from_cells({1, 3}, g);
  CHECK(d.binary);
  CHECK(d.mass == 0.5);
  CHECK(design_cells(d) == std::vector<int>{1, 3});
  CHECK(in_mass_class(d, 0.5, g));
  CHECK_FALSE(in_mass_class(d, 0.25, g));

  Eigen::VectorXd bad(4);
  bad << 0.0, 1.5, 0.0, 0.0;
  CHECK_THROWS_AS(make_design(bad, g), ValidationError);
  CHECK_THROWS_AS(design_from_cells({4}, g), ValidationError);
  CHECK_THROWS_AS(make_design(Eigen::VectorXd::Zero(3), g), ValidationError);
}
