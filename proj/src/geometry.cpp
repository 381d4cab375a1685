#include "nlod/geometry.hpp"

#include <cmath>
#include <string>

#include "nlod/errors.hpp"

namespace nlod {

double Domain::measure() const {
  double m = side(0);
  if (kind == DomainKind::rectangle) m *= side(1);
  return m;
}

Domain make_interval(double low, double high) {
  if (!(high > low)) {
    throw ValidationError("interval bounds must satisfy high > low, got [" + std::to_string(low) +
                          ", " + std::to_string(high) + "]");
  }
  Domain d;
  d.kind = DomainKind::interval;
  d.bounds[0] = {low, high};
  return d;
}

Domain make_rectangle(double x_low, double x_high, double y_low, double y_high) {
  if (!(x_high > x_low)) {
    throw ValidationError("rectangle x-bounds must satisfy high > low");
  }
  if (!(y_high > y_low)) {
    throw ValidationError("rectangle y-bounds must satisfy high > low");
  }
  Domain d;
  d.kind = DomainKind::rectangle;
  d.bounds[0] = {x_low, x_high};
  d.bounds[1] = {y_low, y_high};
  return d;
}

double diameter(const Domain& domain) {
  if (domain.kind == DomainKind::interval) return domain.side(0);
  return std::hypot(domain.side(0), domain.side(1));
}

double Grid::center_distance(int i, int j) const {
  const double dx = centers[i][0] - centers[j][0];
  const double dy = centers[i][1] - centers[j][1];
  return dim() == 1 ? std::abs(dx) : std::hypot(dx, dy);
}

Grid build_grid(const Domain& domain, const std::vector<int>& cells_per_axis) {
  const int n = domain.dim();
  if (static_cast<int>(cells_per_axis.size()) != n) {
    throw ValidationError("cells_per_axis must list one count per domain axis (" +
                          std::to_string(n) + " expected, " +
                          std::to_string(cells_per_axis.size()) + " given)");
  }
  for (int a = 0; a < n; ++a) {
    if (cells_per_axis[a] < 2) {
      throw ValidationError("cells_per_axis must be >= 2 on every axis; axis " +
                            std::to_string(a) + " has " + std::to_string(cells_per_axis[a]));
    }
  }

  Grid g;
  g.domain = domain;
  g.cells_per_axis = {cells_per_axis[0], n == 2 ? cells_per_axis[1] : 1};

  const double hx = domain.side(0) / g.cells_per_axis[0];
  if (n == 2) {
    const double hy = domain.side(1) / g.cells_per_axis[1];
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) {
      throw ValidationError(
          "rectangle cell counts must give equal spacing on both axes; axis 1 spacing " +
          std::to_string(hy) + " differs from axis 0 spacing " + std::to_string(hx));
    }
  }
  g.h = hx;
  g.cell_measure = n == 1 ? g.h : g.h * g.h;

  g.centers.reserve(static_cast<std::size_t>(g.cells_per_axis[0]) * g.cells_per_axis[1]);
  for (int iy = 0; iy < g.cells_per_axis[1]; ++iy) {
    for (int ix = 0; ix < g.cells_per_axis[0]; ++ix) {
      const double cx = domain.bounds[0][0] + g.h * (ix + 0.5);
      const double cy = n == 2 ? domain.bounds[1][0] + g.h * (iy + 0.5) : 0.0;
      g.centers.push_back({cx, cy});
    }
  }
  return g;
}

}  // namespace nlod
