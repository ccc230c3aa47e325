#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mfe/green.hpp"
#include "mfe/solver.hpp"

namespace mfe {

// Standard bubble profile w(z) = -2 log(1 + pi |z|^2); the rescaled family
// w(x/eps) carries unit mass: int e^{w(x/eps)} / eps^2 dx = 1 on the plane.
double bubble_profile(double r);

// Dirichlet energy of the rescaled bubble over the ball of radius L*eps
// (independent of eps): 16 pi log(1 + pi L^2) - 16 pi^2 L^2 / (1 + pi L^2).
double bubble_ball_energy(double L);

// Mass of e^w outside the ball of radius R (plane integral).
double bubble_mass_tail(double R);

struct BubbleSpec {
  Point center;
  double eps = 0.1;
  double L = 2.0;

  void validate(const Grid& g) const;
};

// Periodized nodal sample of w(x/eps) via the minimal-image distance;
// exact inside the injectivity ball.
Field bubble_field(const Grid& g, const BubbleSpec& spec);

// L(eps) from the slowly-varying balance L^4 eps^2 = 1 / log(-log eps),
// capped so that L * eps <= cap_radius.
double scale_rule_L(double eps, double cap_radius = 0.24);

// Pointwise margin lap(log h1) + (8 pi - rho2) - 2 K on the set {h1 > 0}.
struct DjlwReport {
  Field margin;  // NaN off the positive set
  double min_margin = 0;
  bool holds = false;
};

DjlwReport djlw_check(const Field& h1, double rho2, const Field& curvature);

// Glued three-zone test function concentrating at one pole of a Green
// field: bubble core, quintic blending annulus, Green far field.
struct TestFunction {
  BubbleSpec spec;
  Field field;
  double zone_jump = 0;  // ring-averaged unmodelled remainder at the seam
};

TestFunction build_partial(const GreenFunction& green,
                           const RegularExpansion& coeffs,
                           const BubbleSpec& spec);

// Five-zone variant with a positive bubble at pole 0 and a negative one
// at pole 1 of a (+8 pi, -8 pi) two-pole Green field.
TestFunction build_full(const GreenFunction& green, const BubbleSpec& spec1,
                        const BubbleSpec& spec2);

struct ExpansionTerms {
  double dirichlet = 0;
  double mean = 0;
  double log_i1 = 0;
  double log_i2 = 0;
  double J = 0;
  double n_coeff = 0;  // coefficient of -4 pi eps^2 (-log eps^2) in J
};

// Asymptotic prediction of the energy pieces of the one-bubble test
// function at rho1 = 8 pi (curvature and its Taylor data describe the
// background metric; all zero on the flat torus).
ExpansionTerms predict_partial(const BubbleSpec& spec,
                               const RegularExpansion& coeffs,
                               const TaylorData& h1_taylor, double rho2,
                               const GreenMoments& moments,
                               const LocalGeometry& geom = LocalGeometry::flat());

// Prediction for the two-bubble function at rho1 = rho2 = 8 pi.
ExpansionTerms predict_full(const BubbleSpec& spec1, const BubbleSpec& spec2,
                            double A1, double A2, const TaylorData& h1_taylor,
                            const TaylorData& h2_taylor,
                            const LocalGeometry& geom1 = LocalGeometry::flat(),
                            const LocalGeometry& geom2 = LocalGeometry::flat());

// Quadrature of the same pieces for any test function.
ExpansionTerms measure_terms(const Field& phi, const Weights& w, double rho1,
                             double rho2);

struct ExpansionReport {
  double eps = 0;
  ExpansionTerms predicted;
  ExpansionTerms measured;
  double residual = 0;    // |predicted.J - measured.J|
  double scaled = 0;      // residual / (eps^2 * (-log eps^2))
};

// Least upper bounds for the infimum of J.
double lower_bound_partial(const Weights& w, double rho2,
                           const GreenMoments& moments, double max_A_2logh1);
double lower_bound_full(double A1, double A2, double h1_x1, double h2_x2);

// Energy of the logarithmic neck a..b between radii r_in and r_out:
// 2 pi (a - b)^2 / log(r_out / r_in).
double neck_bound(double a, double b, double r_in, double r_out);

// Balance condition (s1 - s2)^2 = s1 + s2 for normalized local masses.
bool pohozaev_admissible(double s1, double s2, double tol = 1e-9);

enum class CertifyMode { Partial, Full };

struct CertificateEntry {
  double eps = 0;
  double L = 0;
  double J_test = 0;
  double J_predicted = 0;
};

struct CertificateResult {
  CertifyMode mode = CertifyMode::Partial;
  Point x1, x2;                      // concentration point(s); x2 unused in partial
  double lower_bound = 0;
  double min_margin = 0;             // interior-condition margin
  bool condition_holds = false;      // strict margin > 0
  bool boundary_case = false;        // margin == 0 within tolerance
  std::vector<CertificateEntry> sweep;
  std::optional<double> contradiction_eps;  // first eps with J_test < lower_bound
};

CertificateResult certify(const Weights& w, double rho2, CertifyMode mode,
                          const std::vector<double>& eps_seq = {0.1, 0.05, 0.025});

void write_certificate_csv(std::ostream& os, const CertificateResult& r);

}  // namespace mfe
