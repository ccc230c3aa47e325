#pragma once

#include <complex>
#include <utility>

#include "mfe/grid.hpp"

namespace mfe {

// Fourier coefficients c_k of f(x) = sum_k c_k exp(2*pi*i k.x), with the
// wavenumber k = freq(index, n) running over [-n/2, n/2 - 1] per axis.
using Spectrum = Eigen::ArrayXXcd;

inline int freq(int i, int n) { return i < n / 2 ? i : i - n; }

Spectrum analyze(const Field& f);
Field synthesize(const Grid& g, const Spectrum& c);

// Exact integral over the unit torus (trapezoid rule == mean).
inline double integrate(const Field& f) { return f.mean(); }

Field laplacian(const Field& f);

// Mean-zero g with laplacian(g) == f; requires |mean(f)| <= 1e-10.
Field inverse_laplacian(const Field& f);

// Spectral partial derivative along axis 0 (x) or 1 (y); Nyquist row zeroed.
Field derivative(const Field& f, int axis);
std::pair<Field, Field> gradient(const Field& f);

// integral |grad f|^2 via Parseval.
double dirichlet_energy(const Field& f);

double l2_norm(const Field& f);

// Point evaluation of the trigonometric interpolant (and its derivatives)
// at an arbitrary torus point; O(n^2) separable sums.
double eval_at(const Spectrum& c, Point p, int dx = 0, int dy = 0);

// Average of the interpolant over the circle of given radius about center;
// exact per Fourier mode via the Bessel factor J0(2*pi*|k|*r).
double ring_average(const Spectrum& c, Point center, double radius);

// Second-order local model f(p+d) ~ value + k1 dx + k2 dy
//                                   + k3 dx^2 + k4 dx dy + k5 dy^2.
struct TaylorData {
  double value = 0;
  double k1 = 0, k2 = 0;      // gradient
  double k3 = 0, k4 = 0, k5 = 0;  // half Hessian: k3 = fxx/2, k4 = fxy, k5 = fyy/2
};

TaylorData taylor_at(const Field& f, Point p);
TaylorData taylor_at(const Spectrum& c, Point p);

// Background geometry at a point: Gauss curvature and the linear/quadratic
// coefficients of the conformal factor. The flat torus has all zeros.
struct LocalGeometry {
  double K = 0;
  double b1 = 0, b2 = 0;
  double c1 = 0, c2 = 0, c12 = 0;

  static LocalGeometry flat() { return {}; }
};

}  // namespace mfe
