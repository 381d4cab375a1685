#pragma once

#include <Eigen/Core>

#include "nlod/geometry.hpp"

namespace nlod {

/// Relaxed potential phi in [0,1]^N with its total mass sum(phi_i)*cell_measure.
/// Binary vectors double as hard obstacle sets A (value 1 = obstacle cell).
struct DesignVector {
  Eigen::VectorXd values;
  double mass = 0.0;
  bool binary = false;

  int size() const { return static_cast<int>(values.size()); }
};

/// Wraps raw values into a DesignVector, validating the [0,1] range and
/// computing the mass. Declares the vector binary when every entry is 0 or 1.
DesignVector make_design(const Eigen::VectorXd& values, const Grid& grid);

/// Binary design from a list of obstacle cell indices.
DesignVector design_from_cells(const std::vector<int>& cells, const Grid& grid);

/// Obstacle cell indices of a binary design, ascending.
std::vector<int> design_cells(const DesignVector& design);

/// True when the design lies in B_alpha: mass == alpha*|Omega| within tol.
bool in_mass_class(const DesignVector& design, double alpha, const Grid& grid, double tol = 1e-12);

}  // namespace nlod
