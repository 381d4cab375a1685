#include <doctest.h>

#include <cmath>

#include "nlod/errors.hpp"
#include "nlod/geometry.hpp"

using namespace nlod;

TEST_CASE("interval domain: dimension, measure, diameter") {
  const Domain d = make_interval(0.0, 1.0);
  CHECK(d.dim() == 1);
  CHECK(d.measure() == 1.0);
  CHECK(diameter(d) == 1.0);

  const Domain wide = make_interval(-2.0, 3.0);
  CHECK(wide.measure() == 5.0);
  CHECK(diameter(wide) == 5.0);
}

TEST_CASE("rectangle domain: dimension, measure, diameter") {
  const Domain d = make_rectangle(0.0, 2.0, 0.0, 1.0);
  CHECK(d.dim() == 2);
  CHECK(d.measure() == 2.0);
  CHECK(diameter(d) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("degenerate domain bounds are rejected") {
  CHECK_THROWS_AS(make_interval(1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_interval(2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_rectangle(0.0, 0.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_rectangle(0.0, 1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("1D grid: spacing, measure, centers") {
  const Grid g = build_grid(make_interval(0.0, 1.0), {4});
  CHECK(g.dim() == 1);
  CHECK(g.size() == 4);
  CHECK(g.h == 0.25);
  CHECK(g.cell_measure == 0.25);
  CHECK(g.centers[0][0] == 0.125);
  CHECK(g.centers[1][0] == 0.375);
  CHECK(g.centers[2][0] == 0.625);
  CHECK(g.centers[3][0] == 0.875);
  CHECK(g.center_distance(0, 3) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.center_distance(2, 2) == 0.0);
}

TEST_CASE("1D grid on a shifted interval") {
  const Grid g = build_grid(make_interval(-1.0, 1.0), {8});
  CHECK(g.h == 0.25);
  CHECK(g.centers[0][0] == -0.875);
  CHECK(g.centers[7][0] == 0.875);
}

TEST_CASE("2D grid: x-fastest ordering and equal spacing") {
  const Grid g = build_grid(make_rectangle(0.0, 2.0, 0.0, 1.0), {4, 2});
  CHECK(g.dim() == 2);
  CHECK(g.size() == 8);
  CHECK(g.h == 0.5);
  CHECK(g.cell_measure == 0.25);
  // index = iy * nx + ix
  CHECK(g.centers[0][0] == 0.25);
  CHECK(g.centers[0][1] == 0.25);
  CHECK(g.centers[1][0] == 0.75);
  CHECK(g.centers[1][1] == 0.25);
  CHECK(g.centers[4][0] == 0.25);
  CHECK(g.centers[4][1] == 0.75);
  CHECK(g.center_distance(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.center_distance(0, 4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.center_distance(0, 5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("grid validation: cell counts") {
  CHECK_THROWS_AS(build_grid(make_interval(0.0, 1.0), {1}), ValidationError);
  CHECK_THROWS_AS(build_grid(make_interval(0.0, 1.0), {4, 4}), ValidationError);
  CHECK_THROWS_AS(build_grid(make_rectangle(0.0, 2.0, 0.0, 1.0), {4}), ValidationError);
  // 4 x 4 cells on a 2 x 1 rectangle gives unequal spacings.
  CHECK_THROWS_AS(build_grid(make_rectangle(0.0, 2.0, 0.0, 1.0), {4, 4}), ValidationError);
  // 4 x 2 is commensurate.
  CHECK_NOTHROW(build_grid(make_rectangle(0.0, 2.0, 0.0, 1.0), {4, 2}));
}
