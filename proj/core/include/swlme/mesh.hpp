#pragma once

#include <stdexcept>

namespace swlme {

/// Uniform 1D mesh. Interfaces are reproducible bit-exactly from
/// x_left + j * dx.
struct Mesh {
  double x_left = 0.0;
  double x_right = 1.0;
  int nx = 1;
  double dx = 1.0;

  Mesh() = default;
  Mesh(double xl, double xr, int n) : x_left(xl), x_right(xr), nx(n) {
    if (n < 1) throw std::invalid_argument("Mesh: need at least one cell");
    if (!(xl < xr)) throw std::invalid_argument("Mesh: degenerate domain");
    dx = (xr - xl) / n;
  }

  double interface(int j) const { return x_left + j * dx; }
  double center(int j) const { return x_left + (j + 0.5) * dx; }
  /// Physical coordinate of local point xi in [-1,1] within cell j.
  double to_x(int j, double xi) const { return center(j) + 0.5 * dx * xi; }
  double length() const { return x_right - x_left; }
};

}  // namespace swlme
