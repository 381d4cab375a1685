#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace nlod {

enum class DomainKind { interval, rectangle };

/// Axis-aligned interval (0,1)-style or rectangle domain with exact measure
/// and diameter bookkeeping. Only these two shapes are supported so that
/// "measure of a set of cells" stays exact.
struct Domain {
  DomainKind kind = DomainKind::interval;
  /// bounds[axis] = (low, high); axis 1 unused for intervals.
  std::array<std::array<double, 2>, 2> bounds{{{0.0, 1.0}, {0.0, 1.0}}};

  int dim() const { return kind == DomainKind::interval ? 1 : 2; }

  double side(int axis) const { return bounds[axis][1] - bounds[axis][0]; }

  /// |Omega| = product of side lengths.
  double measure() const;
};

Domain make_interval(double low, double high);
Domain make_rectangle(double x_low, double x_high, double y_low, double y_high);

/// Euclidean diameter of the closure of the domain.
double diameter(const Domain& domain);

/// Uniform cell-centered grid. Spacing h is identical on every axis;
/// cell_measure = h^n. Cell i has center centers[i]; cells are ordered
/// x-fastest (row-major over (iy, ix) in 2D).
struct Grid {
  Domain domain;
  std::array<int, 2> cells_per_axis{1, 1};
  std::vector<std::array<double, 2>> centers;
  double h = 0.0;
  double cell_measure = 0.0;

  int dim() const { return domain.dim(); }
  int size() const { return static_cast<int>(centers.size()); }

  /// Euclidean distance between cell centers i and j.
  double center_distance(int i, int j) const;
};

/// Builds the uniform grid. Requires >= 2 cells per axis and, for
/// rectangles, cell counts commensurate with the side lengths so that the
/// spacing h matches on both axes.
Grid build_grid(const Domain& domain, const std::vector<int>& cells_per_axis);

}  // namespace nlod
