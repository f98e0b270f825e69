#include "spintf/grid.hpp"

#include <cstdio>
#include <ostream>

namespace spintf {

GridField GridField::zeros(int dim, int nodes) {
  if (nodes < 3) throw Error(Errc::invalid_argument, "grid needs at least 3 nodes per axis");
  if (dim != 1 && dim != 2) throw Error(Errc::invalid_argument, "dim must be 1 or 2");
  GridField f;
  f.dim = dim;
  f.nx = nodes;
  f.ny = dim == 2 ? nodes : 1;
  f.h = 1.0 / (nodes - 1);
  for (auto& c : f.comp) c = Eigen::ArrayXd::Zero(f.nx * f.ny);
  return f;
}

void GridField::zero_boundary() {
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (is_boundary(i, j))
        for (auto& c : comp) c[idx(i, j)] = 0.0;
}

double GridField::mass() const {
  double total = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int k = idx(i, j);
      total += weight(i, j) *
               (comp[0][k] * comp[0][k] + comp[1][k] * comp[1][k] + comp[2][k] * comp[2][k]);
    }
  return total;
}

double GridField::magnetization() const {
  double total = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int k = idx(i, j);
      total += weight(i, j) * (comp[0][k] * comp[0][k] - comp[2][k] * comp[2][k]);
    }
  return total;
}

void write_csv(const GridField& f, std::ostream& os) {
  char buf[160];
  if (f.dim == 1) {
    os << "x,u1,u0,um1\n";
    for (int i = 0; i < f.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", i * f.h, f.comp[0][i],
                    f.comp[1][i], f.comp[2][i]);
      os << buf;
    }
  } else {
    os << "x,y,u1,u0,um1\n";
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        int k = f.idx(i, j);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", i * f.h, j * f.h,
                      f.comp[0][k], f.comp[1][k], f.comp[2][k]);
        os << buf;
      }
  }
}

}  // namespace spintf
