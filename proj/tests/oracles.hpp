// Independent reference computations the unit tests compare against.
// Everything here is deliberately written with different algorithms than
// the library: lattice (Ewald-split) sums, adaptive quadrature, and
// low-order finite differences.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

inline double e1(double x) { return -std::expint(-x); }

// Periodic Green function of -lap G = delta - 1 on the unit torus,
// evaluated by Ewald splitting; G(x) ~ -(1/2pi) log|x| + A0 near 0.
inline double torus_green(double x, double y, double eta = 4.0) {
  const int K = 24;
  double s = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double k2sum = double(k1) * k1 + double(k2) * k2;
      s += std::cos(2.0 * pi * (k1 * x + k2 * y)) *
           std::exp(-pi * pi * k2sum / (eta * eta)) / (4.0 * pi * pi * k2sum);
    }
  for (int n1 = -K; n1 <= K; ++n1)
    for (int n2 = -K; n2 <= K; ++n2) {
      const double r2 = (x + n1) * (x + n1) + (y + n2) * (y + n2);
      s += e1(eta * eta * r2) / (4.0 * pi);
    }
  return s - 1.0 / (4.0 * eta * eta);
}

// Constant term of the expansion of torus_green about its pole.
inline double green_regular_part(double eta = 4.0) {
  const int K = 24;
  double s = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double k2sum = double(k1) * k1 + double(k2) * k2;
      s += std::exp(-pi * pi * k2sum / (eta * eta)) / (4.0 * pi * pi * k2sum);
    }
  for (int n1 = -K; n1 <= K; ++n1)
    for (int n2 = -K; n2 <= K; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const double r2 = double(n1) * n1 + double(n2) * n2;
      s += e1(eta * eta * r2) / (4.0 * pi);
    }
  const double gamma = 0.57721566490153286060;
  return s - 1.0 / (4.0 * eta * eta) -
         (gamma + 2.0 * std::log(eta)) / (4.0 * pi);
}

// Composite trapezoid rule on the periodic unit interval.
inline double periodic_quad(const std::function<double(double)>& f, int n = 4096) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += f(double(i) / n);
  return s / n;
}

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Capacity of the radial annulus r_in..r_out with boundary values a, b:
// minimize 2 pi int r |phi'|^2 by a conservative finite-difference solve
// (constant flux), with Richardson extrapolation over two meshes.
inline double neck_energy_fd(double a, double b, double r_in, double r_out) {
  auto solve = [&](int n) {
    // log-uniform mesh; the minimizer keeps r phi' constant, so the energy
    // of the FD minimizer is 2 pi c^2 log(r_out/r_in) with c fixed by the
    // boundary gap.
    std::vector<double> r(n + 1);
    for (int i = 0; i <= n; ++i)
      r[i] = r_in * std::pow(r_out / r_in, double(i) / n);
    // tridiagonal solve for phi minimizing sum w_i (phi_{i+1}-phi_i)^2,
    // w_i = 2 pi r_{i+1/2} / (r_{i+1}-r_i)
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
      w[i] = 2.0 * pi * 0.5 * (r[i] + r[i + 1]) / (r[i + 1] - r[i]);
    // flux continuity: w_i (phi_{i+1}-phi_i) = c; sum of gaps = b - a
    double inv = 0;
    for (int i = 0; i < n; ++i) inv += 1.0 / w[i];
    const double c = (b - a) / inv;
    double energy = 0;
    for (int i = 0; i < n; ++i) energy += c * c / w[i];
    return energy;
  };
  const double e1v = solve(2000);
  const double e2v = solve(4000);
  return e2v + (e2v - e1v) / 3.0;
}

// Kendall rank correlation, brute force.
inline double kendall(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0;
  int pairs = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      const double s = (a[j] > a[i]) - (a[j] < a[i]);
      const double t = (b[j] > b[i]) - (b[j] < b[i]);
      num += s * t;
      ++pairs;
    }
  return num / pairs;
}

}  // namespace oracle
