#pragma once

#include <optional>
#include <vector>

#include "mfe/functional.hpp"

namespace mfe {

struct Pole {
  Point x;
  double strength = eight_pi;  // coefficient of the delta source
};

// Local expansion of the Green field about a pole p:
//   G(p + d) = -(strength/(2*pi)) log|d| + A + lambda dx + nu dy
//              + alpha dx^2 + xi dx dy + beta dy^2 + O(|d|^3).
struct RegularExpansion {
  double A = 0;
  double lambda = 0, nu = 0;
  double alpha = 0, beta = 0, xi = 0;
  double fit_residual = 0;
};

struct GreenFunction {
  Field field;
  Spectrum spectrum;
  std::vector<Pole> poles;
  double sigma = 0;                 // Gaussian source width (in grid units)
  std::optional<double> beta2;      // 1 / int h2 e^-G for the nonlinear kind
  std::vector<RegularExpansion> regulars;
};

// Gaussian approximation of a unit delta at p, minus its own mean; the
// width sigma = 1.5 h keeps the spectrum fully resolved.
Field mollified_delta(const Grid& g, Point p);

// Mean-zero solution of  -lap G = sum_j c_j (delta_{p_j} - 1)  with
// mollified sources; fits the local expansion at every pole.
GreenFunction linear_green(const Grid& g, std::vector<Pole> poles);

// Mean-zero solution of
//   -lap G = 8 pi (delta_{x1} - 1) - rho2 (beta2 h2 e^-G - 1),
//   beta2 = 1 / int h2 e^-G,  0 < rho2 < 8 pi.
GreenFunction nonlinear_green(const Weights& w, double rho2, Point x1,
                              double tol = 1e-8, int max_iters = 500);

// Constant term of the expansion via Richardson extrapolation of ring
// averages; independent of the polynomial fit.
double regular_part(const GreenFunction& g, int pole_index = 0);

// Full quadratic expansion at one pole (least-squares annulus fit).
RegularExpansion expansion_coeffs(const GreenFunction& g, int pole_index = 0);

// Value of the field smoothed with the same Gaussian as the sources;
// this is the natural pairing for weak-form residual checks.
double mollified_value(const GreenFunction& g, Point p);

// Weak-form residual of the defining equation against the mollified
// delta test family centred at the given probe points.
double weak_residual(const GreenFunction& g, const Weights& w, double rho2,
                     const std::vector<Point>& probes);

// int h2 G e^-G and log int h2 e^-G, the two integrals the expansion
// formulas need from a nonlinear Green field.
struct GreenMoments {
  double A = 0;
  double beta2 = 0;
  double h2_g_int = 0;   // int h2 G e^-G
  double log_i2 = 0;     // log int h2 e^-G
};

GreenMoments green_moments(const GreenFunction& g, const Weights& w);

void write_green(const std::string& path, const GreenFunction& g);
GreenFunction read_green(const std::string& path);

}  // namespace mfe
