#pragma once

#include <array>
#include <iosfwd>

#include "spintf/model.hpp"

namespace spintf {

/// Three-component field on a uniform grid over the unit interval/square with
/// Dirichlet-zero boundary nodes. Components are flattened row-major
/// (index = i + nx*j).
struct GridField {
  int dim = 1;
  int nx = 0, ny = 1;
  double h = 0.0;
  std::array<Eigen::ArrayXd, 3> comp;

  static GridField zeros(int dim, int nodes);

  int size() const { return nx * ny; }
  int idx(int i, int j = 0) const { return i + nx * j; }

  bool is_boundary(int i, int j = 0) const {
    if (dim == 1) return i == 0 || i == nx - 1;
    return i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
  }

  /// Trapezoidal quadrature weight of a node (includes h^dim).
  double weight(int i, int j = 0) const {
    double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    if (dim == 1) return h * wx;
    double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    return h * h * wx * wy;
  }

  SpinState at(int k) const { return SpinState(comp[0][k], comp[1][k], comp[2][k]); }
  void set(int k, const SpinState& u) {
    comp[0][k] = u[0];
    comp[1][k] = u[1];
    comp[2][k] = u[2];
  }

  void zero_boundary();

  double mass() const;           // discrete N
  double magnetization() const;  // discrete M
};

/// CSV snapshot: header + one row per node (coordinates, three components).
void write_csv(const GridField& f, std::ostream& os);

}  // namespace spintf
