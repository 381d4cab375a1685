#include "nlod/design_vector.hpp"

#include <cmath>
#include <string>

#include "nlod/errors.hpp"

namespace nlod {

DesignVector make_design(const Eigen::VectorXd& values, const Grid& grid) {
  if (values.size() != grid.size()) {
    throw ValidationError("design has " + std::to_string(values.size()) + " values for a grid of " +
                          std::to_string(grid.size()) + " cells");
  }
  DesignVector d;
  d.values = values;
  d.binary = true;
  double total = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("design value at cell " + std::to_string(i) + " is " +
                            std::to_string(v) + "; the admissible class requires 0 <= phi <= 1");
    }
    if (v != 0.0 && v != 1.0) d.binary = false;
    total += v;
  }
  d.mass = total * grid.cell_measure;
  return d;
}

DesignVector design_from_cells(const std::vector<int>& cells, const Grid& grid) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.size());
  for (int c : cells) {
    if (c < 0 || c >= grid.size()) {
      throw ValidationError("design cell index " + std::to_string(c) + " outside grid of " +
                            std::to_string(grid.size()) + " cells");
    }
    v[c] = 1.0;
  }
  return make_design(v, grid);
}

std::vector<int> design_cells(const DesignVector& design) {
  std::vector<int> cells;
  for (int i = 0; i < design.size(); ++i) {
    if (design.values[i] == 1.0) cells.push_back(i);
  }
  return cells;
}

bool in_mass_class(const DesignVector& design, double alpha, const Grid& grid, double tol) {
  return std::abs(design.mass - alpha * grid.domain.measure()) <= tol;
}

}  // namespace nlod
