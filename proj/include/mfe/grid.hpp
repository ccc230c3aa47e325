#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "mfe/errors.hpp"

namespace mfe {

// Uniform periodic grid on the unit flat torus [0,1)^2, nodes x_i = i/n.
struct Grid {
  int n = 0;

  Grid() = default;
  explicit Grid(int n_) : n(n_) {
    if (n < 16 || n % 2 != 0)
      throw Error("grid size must be even and at least 16");
  }

  double spacing() const { return 1.0 / n; }
  int size() const { return n * n; }
  bool operator==(const Grid&) const = default;
};

struct Point {
  double x = 0;
  double y = 0;
};

// Shift to the representative in [-1/2, 1/2).
inline double wrap_half(double d) {
  d -= std::floor(d + 0.5);
  return d;
}

// Minimal-image displacement a - b on the torus.
inline Point torus_displacement(Point a, Point b) {
  return {wrap_half(a.x - b.x), wrap_half(a.y - b.y)};
}

inline double torus_distance(Point a, Point b) {
  Point d = torus_displacement(a, b);
  return std::hypot(d.x, d.y);
}

// Nodal scalar field; values(i, j) lives at (x, y) = (i/n, j/n).
class Field {
 public:
  Field() = default;
  explicit Field(Grid g) : grid_(g), v_(Eigen::ArrayXXd::Zero(g.n, g.n)) {}
  Field(Grid g, Eigen::ArrayXXd values) : grid_(g), v_(std::move(values)) {
    if (v_.rows() != grid_.n || v_.cols() != grid_.n)
      throw Error("field values do not match grid size");
  }

  template <class F>
  static Field sample(Grid g, F&& f) {
    Field out(g);
    const double h = g.spacing();
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) out.v_(i, j) = f(i * h, j * h);
    out.dirty_ = true;
    return out;
  }

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXXd& values() const { return v_; }
  Eigen::ArrayXXd& values() {
    dirty_ = true;
    return v_;
  }
  double operator()(int i, int j) const { return v_(i, j); }

  // Exact trapezoid mean; equals the integral since the torus has unit area.
  double mean() const {
    if (dirty_) {
      mean_ = v_.mean();
      dirty_ = false;
    }
    return mean_;
  }

  Point node(int i, int j) const {
    return {i * grid_.spacing(), j * grid_.spacing()};
  }

 private:
  Grid grid_;
  Eigen::ArrayXXd v_;
  mutable double mean_ = 0;
  mutable bool dirty_ = true;
};

}  // namespace mfe
