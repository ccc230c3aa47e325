#pragma once

#include <numbers>

#include "mfe/spectral.hpp"

namespace mfe {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double four_pi = 4.0 * std::numbers::pi;
constexpr double eight_pi = 8.0 * std::numbers::pi;

// Sign-changing weight pair; each must be positive somewhere and both live
// on the same grid.
class Weights {
 public:
  Weights(Field h1, Field h2);

  const Field& h1() const { return h1_; }
  const Field& h2() const { return h2_; }
  const Grid& grid() const { return h1_.grid(); }

  // Nodes where the weight is strictly positive.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> positive_mask(int which) const;

 private:
  Field h1_, h2_;
};

enum class Regime { Subcritical, PartialCritical, FullCritical, Supercritical };

struct Params {
  double rho1 = eight_pi;
  double rho2 = four_pi;
  double eps = 0;  // deformation: the first coupling enters as rho1 - eps

  Regime classify() const;
  void validate() const;
};

// Stable log of the mean of h * exp(sign*u); ok is false when the weighted
// integral is not safely positive.
struct LogIntegral {
  double log = 0;
  bool ok = false;
};

LogIntegral weighted_log_integral(const Field& h, const Field& u, int sign);

struct AdmissibleReport {
  bool ok = false;
  double log_i1 = 0, log_i2 = 0;
  double i1 = 0, i2 = 0;
};

AdmissibleReport admissible(const Field& u, const Weights& w);

// J(u) = 1/2 int |grad u|^2 - (rho1-eps) log int h1 e^u - rho2 log int h2 e^-u
// on mean-zero admissible states.
double evaluate_J(const Field& u, const Weights& w, const Params& p,
                  bool require_mean_zero = true);

// L2 gradient of J at u; mean-zero by construction.
Field gradient_J(const Field& u, const Weights& w, const Params& p);

// log int e^u + log int e^-u - coeff * int |grad u|^2, mean-zero u.
double mt_functional(const Field& u, double coeff = 1.0 / (16.0 * std::numbers::pi));

struct RatioBounds {
  double r1 = 0;  // int e^u / int h1 e^u
  double r2 = 0;  // int e^-u / int h2 e^-u
  double c_floor = 0;  // guaranteed lower bound min(1/max h1, 1/max h2)
};

RatioBounds ratio_bounds(const Field& u, const Weights& w);

}  // namespace mfe
