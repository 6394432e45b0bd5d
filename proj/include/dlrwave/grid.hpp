#ifndef DLRWAVE_GRID_HPP
#define DLRWAVE_GRID_HPP

#include <stdexcept>

namespace dlrwave {

// Uniform rectangular mesh on [x_lo,x_hi] x [y_lo,y_hi] with nx/ny intervals.
// Only interior nodes carry unknowns; the homogeneous Dirichlet boundary is
// implicit in the difference stencil.
struct GridSpec {
  double x_lo, x_hi;
  double y_lo, y_hi;
  int nx, ny;  // interval counts

  double hx() const { return (x_hi - x_lo) / nx; }
  double hy() const { return (y_hi - y_lo) / ny; }
  int interior_x() const { return nx - 1; }
  int interior_y() const { return ny - 1; }
  double x(int i) const { return x_lo + i * hx(); }  // i = 1..nx-1 interior
  double y(int j) const { return y_lo + j * hy(); }

  void validate() const {
    if (!(x_hi > x_lo) || !(y_hi > y_lo))
      throw std::invalid_argument("grid: domain bounds must be increasing");
    if (nx < 2 || ny < 2)
      throw std::invalid_argument("grid: need at least 2 intervals per direction");
  }
};

struct TimeGrid {
  double T;
  long M;

  double tau() const { return T / M; }
  double t(long k) const { return k * tau(); }

  void validate() const {
    if (!(T > 0)) throw std::invalid_argument("time: T must be positive");
    if (M < 1) throw std::invalid_argument("time: M must be at least 1");
  }
};

}  // namespace dlrwave

#endif
