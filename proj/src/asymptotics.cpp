#include "mfe/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace mfe {

namespace {

constexpr double pi = std::numbers::pi;

// Quintic blend, 1 at the inner seam and 0 at the outer, C^2 in log r.
double blend(double r, double r_in, double r_out) {
  const double s = (std::log(r) - std::log(r_in)) / (std::log(r_out) - std::log(r_in));
  if (s <= 0) return 1.0;
  if (s >= 1) return 0.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Ring-averaged remainder of the regular part at radius r: what the
// quadratic model of the expansion fails to explain. Odd and harmonic
// quadratic pieces average out, so this decays like r^3 near the pole.
double seam_remainder(const GreenFunction& g, int pole, const RegularExpansion& c,
                      double r) {
  const Pole& p = g.poles[pole];
  const double avg = ring_average(g.spectrum, p.x, r) +
                     (p.strength / (2.0 * pi)) * std::log(r);
  return avg - c.A - g.sigma * g.sigma * (c.alpha + c.beta) -
         0.5 * (c.alpha + c.beta) * r * r;
}

void check_seam(const TestFunction& tf, const RegularExpansion& c) {
  const double allowance =
      10.0 * c.fit_residual + 100.0 * std::pow(tf.spec.L * tf.spec.eps, 3);
  if (tf.zone_jump > allowance)
    throw GluingMismatch("expansion coefficients do not match the Green field");
}

Point grid_argmax(const Field& f) {
  int bi = 0, bj = 0;
  f.values().maxCoeff(&bi, &bj);
  return {bi * f.grid().spacing(), bj * f.grid().spacing()};
}

}  // namespace

double bubble_profile(double r) { return -2.0 * std::log(1.0 + pi * r * r); }

double bubble_ball_energy(double L) {
  const double q = 1.0 + pi * L * L;
  return 16.0 * pi * std::log(q) - 16.0 * pi * pi * L * L / q;
}

double bubble_mass_tail(double R) { return 1.0 / (1.0 + pi * R * R); }

void BubbleSpec::validate(const Grid& g) const {
  if (!(L > 1.0)) throw Error("bubble needs L > 1");
  if (!(L * eps < 0.25)) throw Error("bubble support exceeds a quarter period");
  if (eps < 4.0 * g.spacing())
    throw InsufficientResolution("bubble core narrower than four grid spacings");
}

Field bubble_field(const Grid& g, const BubbleSpec& spec) {
  spec.validate(g);
  return Field::sample(g, [&](double x, double y) {
    const double r = torus_distance({x, y}, spec.center);
    return bubble_profile(r / spec.eps);
  });
}

double scale_rule_L(double eps, double cap_radius) {
  if (!(eps > 0) || !(eps < std::exp(-1.0)))
    throw Error("scale rule needs 0 < eps < 1/e");
  double L = std::pow(1.0 / (eps * eps * std::log(-std::log(eps))), 0.25);
  if (L * eps > cap_radius) L = cap_radius / eps;
  if (!(L > 1.0)) throw Error("scale rule gives no bubble/neck separation");
  return L;
}

DjlwReport djlw_check(const Field& h1, double rho2, const Field& curvature) {
  const Grid g = h1.grid();
  Field lap = laplacian(h1);
  auto [gx, gy] = gradient(h1);
  DjlwReport r;
  r.margin = Field(g);
  r.min_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (h1(i, j) <= 0) {
        r.margin.values()(i, j) = std::nan("");
        continue;
      }
      const double h = h1(i, j);
      const double dlog =
          (lap(i, j) * h - gx(i, j) * gx(i, j) - gy(i, j) * gy(i, j)) / (h * h);
      const double m = dlog + (eight_pi - rho2) - 2.0 * curvature(i, j);
      r.margin.values()(i, j) = m;
      r.min_margin = std::min(r.min_margin, m);
      any = true;
    }
  if (!any) throw EmptyPositiveSet("weight is nowhere positive");
  r.holds = r.min_margin > 0;
  return r;
}

TestFunction build_partial(const GreenFunction& green,
                           const RegularExpansion& coeffs,
                           const BubbleSpec& spec) {
  const Grid g = green.field.grid();
  spec.validate(g);
  if (green.poles.empty() ||
      torus_distance(green.poles[0].x, spec.center) > 0.5 * g.spacing())
    throw Error("bubble center must sit on the Green pole");
  if (!green.regulars.empty() && !std::isnan(green.regulars[0].A) &&
      std::abs(coeffs.A - green.regulars[0].A) > 1e-6 * (1.0 + std::abs(coeffs.A)))
    throw GluingMismatch("coefficients come from a different Green field");

  const double le = spec.L * spec.eps;
  const double l1p = std::log(1.0 + pi * spec.L * spec.L);
  const double far_shift = 4.0 * std::log(le) - 2.0 * l1p - coeffs.A;

  TestFunction tf;
  tf.spec = spec;
  tf.field = Field::sample(g, [&](double x, double y) {
    const Point d = torus_displacement({x, y}, spec.center);
    const double r = std::hypot(d.x, d.y);
    const double lin = coeffs.lambda * d.x + coeffs.nu * d.y;
    if (r < le) return bubble_profile(r / spec.eps) + lin;
    const int i = static_cast<int>(std::lround(x * g.n)) % g.n;
    const int j = static_cast<int>(std::lround(y * g.n)) % g.n;
    const double G = green.field(i, j);
    if (r < 2.0 * le) {
      const double H = G + 4.0 * std::log(r) - coeffs.A - lin;
      return G - blend(r, le, 2.0 * le) * H + far_shift;
    }
    return G + far_shift;
  });
  tf.zone_jump = std::abs(seam_remainder(green, 0, coeffs, le));
  check_seam(tf, coeffs);
  return tf;
}

TestFunction build_full(const GreenFunction& green, const BubbleSpec& spec1,
                        const BubbleSpec& spec2) {
  const Grid g = green.field.grid();
  spec1.validate(g);
  spec2.validate(g);
  if (spec1.eps != spec2.eps || spec1.L != spec2.L)
    throw Error("the two bubbles must share eps and L");
  if (green.poles.size() != 2 || green.poles[0].strength <= 0 ||
      green.poles[1].strength >= 0)
    throw Error("need a (+,-) two-pole Green field");
  if (torus_distance(green.poles[0].x, spec1.center) > 0.5 * g.spacing() ||
      torus_distance(green.poles[1].x, spec2.center) > 0.5 * g.spacing())
    throw Error("bubble centers must sit on the Green poles");
  const double le = spec1.L * spec1.eps;
  if (torus_distance(spec1.center, spec2.center) < 4.0 * le + 2.0 * g.spacing())
    throw Error("bubble supports overlap");

  const RegularExpansion& c1 = green.regulars.at(0);
  const RegularExpansion& c2 = green.regulars.at(1);
  const double l1p = std::log(1.0 + pi * spec1.L * spec1.L);
  const double far_shift = 4.0 * std::log(le) - 2.0 * l1p - c1.A;

  TestFunction tf;
  tf.spec = spec1;
  tf.field = Field::sample(g, [&](double x, double y) {
    const Point d1 = torus_displacement({x, y}, spec1.center);
    const Point d2 = torus_displacement({x, y}, spec2.center);
    const double r1 = std::hypot(d1.x, d1.y);
    const double r2 = std::hypot(d2.x, d2.y);
    const double lin1 = c1.lambda * d1.x + c1.nu * d1.y;
    const double lin2 = c2.lambda * d2.x + c2.nu * d2.y;
    if (r1 < le) return bubble_profile(r1 / spec1.eps) + lin1;
    if (r2 < le)
      return -bubble_profile(r2 / spec2.eps) + lin2 + 8.0 * std::log(le) -
             4.0 * l1p - c1.A + c2.A;
    const int i = static_cast<int>(std::lround(x * g.n)) % g.n;
    const int j = static_cast<int>(std::lround(y * g.n)) % g.n;
    const double G = green.field(i, j);
    if (r1 < 2.0 * le) {
      const double H = G + 4.0 * std::log(r1) - c1.A - lin1;
      return G - blend(r1, le, 2.0 * le) * H + far_shift;
    }
    if (r2 < 2.0 * le) {
      const double H = G - 4.0 * std::log(r2) - c2.A - lin2;
      return G - blend(r2, le, 2.0 * le) * H + far_shift;
    }
    return G + far_shift;
  });
  tf.zone_jump = std::max(std::abs(seam_remainder(green, 0, c1, le)),
                          std::abs(seam_remainder(green, 1, c2, le)));
  check_seam(tf, c1);
  return tf;
}

ExpansionTerms predict_partial(const BubbleSpec& spec,
                               const RegularExpansion& coeffs,
                               const TaylorData& h1_taylor, double rho2,
                               const GreenMoments& moments,
                               const LocalGeometry& geom) {
  const double eps = spec.eps;
  const double L = spec.L;
  const double le = L * eps;
  const double l1p = std::log(1.0 + pi * L * L);
  const double lep2 = std::log(le * le);
  const double h1p = h1_taylor.value;
  if (!(h1p > 0)) throw Error("weight must be positive at the bubble center");

  const double q = (four_pi - 0.5 * rho2) / two_pi;
  const double bx = geom.b1 + coeffs.lambda;
  const double by = geom.b2 + coeffs.nu;
  const double M = (1.0 / pi) * (-0.5 * geom.K + 0.25 * (bx * bx + by * by));
  const double S = (h1_taylor.k3 + h1_taylor.k5 + h1_taylor.k1 * bx +
                    h1_taylor.k2 * by) /
                   (two_pi * h1p);

  ExpansionTerms t;
  t.n_coeff = M + q + S;
  t.dirichlet = -32.0 * pi * std::log(le) + eight_pi * coeffs.A -
                rho2 * moments.beta2 * moments.h2_g_int + 16.0 * pi * l1p -
                16.0 * pi * pi * L * L / (1.0 + pi * L * L);
  t.mean = 4.0 * std::log(le) - coeffs.A - 2.0 * l1p - 2.0 * eps * eps * l1p;
  t.log_i1 = std::log(h1p) + std::log(eps * eps) +
             (M + S) * eps * eps * (l1p - lep2) - q * eps * eps * lep2;
  t.log_i2 = moments.log_i2 - 4.0 * std::log(le) + 2.0 * l1p + coeffs.A;
  t.J = 0.5 * t.dirichlet - eight_pi * t.log_i1 - rho2 * t.log_i2 +
        (eight_pi - rho2) * t.mean;
  return t;
}

ExpansionTerms predict_full(const BubbleSpec& spec1, const BubbleSpec& spec2,
                            double A1, double A2, const TaylorData& h1_taylor,
                            const TaylorData& h2_taylor,
                            const LocalGeometry& geom1,
                            const LocalGeometry& geom2) {
  const double eps = spec1.eps;
  const double L = spec1.L;
  const double le = L * eps;
  const double l1p = std::log(1.0 + pi * L * L);
  const double lep2 = std::log(le * le);
  (void)spec2;

  auto bracket = [](const TaylorData& t, const LocalGeometry& geom) {
    const double h = t.value;
    if (!(h > 0)) throw Error("weight must be positive at the bubble center");
    const double dlog = (2.0 * (t.k3 + t.k5) * h - t.k1 * t.k1 - t.k2 * t.k2) / (h * h);
    return dlog - 2.0 * geom.K;
  };
  const double B1 = bracket(h1_taylor, geom1);
  const double B2 = bracket(h2_taylor, geom2);

  ExpansionTerms t;
  t.dirichlet = 2.0 * bubble_ball_energy(L) - 64.0 * pi * std::log(le) +
                eight_pi * (A1 - A2);
  t.mean = 4.0 * std::log(le) - 2.0 * l1p - A1;
  t.log_i1 = std::log(h1_taylor.value) + std::log(eps * eps) +
             (B1 / four_pi) * eps * eps * (l1p - lep2);
  t.log_i2 = std::log(h2_taylor.value) + std::log(eps * eps) -
             8.0 * std::log(le) + 4.0 * l1p + (A1 - A2) +
             (B2 / four_pi) * eps * eps * (l1p - lep2);
  t.J = 0.5 * t.dirichlet - eight_pi * (t.log_i1 + t.log_i2);
  t.n_coeff = (B1 + B2) / two_pi;
  return t;
}

ExpansionTerms measure_terms(const Field& phi, const Weights& w, double rho1,
                             double rho2) {
  const LogIntegral a = weighted_log_integral(w.h1(), phi, +1);
  const LogIntegral b = weighted_log_integral(w.h2(), phi, -1);
  if (!a.ok || !b.ok) throw Inadmissible("test function is inadmissible");
  ExpansionTerms t;
  t.dirichlet = dirichlet_energy(phi);
  t.mean = integrate(phi);
  t.log_i1 = a.log;
  t.log_i2 = b.log;
  t.J = 0.5 * t.dirichlet - rho1 * t.log_i1 - rho2 * t.log_i2 +
        (rho1 - rho2) * t.mean;
  return t;
}

double lower_bound_partial(const Weights& w, double rho2,
                           const GreenMoments& moments, double max_A_2logh1) {
  (void)w;
  return -eight_pi - eight_pi * std::log(pi) - four_pi * max_A_2logh1 -
         0.5 * rho2 * moments.beta2 * moments.h2_g_int - rho2 * moments.log_i2;
}

double lower_bound_full(double A1, double A2, double h1_x1, double h2_x2) {
  return -16.0 * pi - 16.0 * pi * std::log(pi) -
         four_pi * (2.0 * std::log(h1_x1) + A1) -
         four_pi * (2.0 * std::log(h2_x2) - A2);
}

double neck_bound(double a, double b, double r_in, double r_out) {
  if (!(r_in > 0) || !(r_out > r_in)) throw BadRadii("need 0 < r_in < r_out");
  return two_pi * (a - b) * (a - b) / std::log(r_out / r_in);
}

bool pohozaev_admissible(double s1, double s2, double tol) {
  if (s1 < 0 || s2 < 0) throw Error("local masses must be nonnegative");
  return std::abs((s1 - s2) * (s1 - s2) - (s1 + s2)) <= tol;
}

CertificateResult certify(const Weights& w, double rho2, CertifyMode mode,
                          const std::vector<double>& eps_seq) {
  const Grid g = w.grid();
  Field zero_curv(g);
  CertificateResult out;
  out.mode = mode;

  if (mode == CertifyMode::Partial) {
    const DjlwReport dj = djlw_check(w.h1(), rho2, zero_curv);
    out.min_margin = dj.min_margin;
    out.condition_holds = dj.holds;
    out.boundary_case = std::abs(dj.min_margin) <= 1e-9;

    out.x1 = grid_argmax(w.h1());
    GreenFunction green = nonlinear_green(w, rho2, out.x1);
    const GreenMoments moments = green_moments(green, w);
    const RegularExpansion coeffs = green.regulars.at(0);
    const double h1max = w.h1().values().maxCoeff();
    out.lower_bound =
        lower_bound_partial(w, rho2, moments, moments.A + 2.0 * std::log(h1max));
    const TaylorData th1 = taylor_at(w.h1(), out.x1);

    for (double eps : eps_seq) {
      BubbleSpec spec{out.x1, eps, scale_rule_L(eps)};
      TestFunction tf = build_partial(green, coeffs, spec);
      const ExpansionTerms meas = measure_terms(tf.field, w, eight_pi, rho2);
      const ExpansionTerms pred = predict_partial(spec, coeffs, th1, rho2, moments);
      out.sweep.push_back({eps, spec.L, meas.J, pred.J});
      if (!out.contradiction_eps && meas.J < out.lower_bound)
        out.contradiction_eps = eps;
    }
    return out;
  }

  // Full mode: both weights sit at the critical coupling.
  const DjlwReport d1 = djlw_check(w.h1(), eight_pi, zero_curv);
  const DjlwReport d2 = djlw_check(w.h2(), eight_pi, zero_curv);
  out.min_margin = std::min(d1.min_margin, d2.min_margin);
  out.condition_holds = d1.holds && d2.holds;
  out.boundary_case = std::abs(out.min_margin) <= 1e-9;

  out.x1 = grid_argmax(w.h1());
  const double h2max = w.h2().values().maxCoeff();
  bool found = false;
  for (int i = 0; i < g.n && !found; ++i)
    for (int j = 0; j < g.n && !found; ++j) {
      const Point q{i * g.spacing(), j * g.spacing()};
      if (w.h2()(i, j) >= h2max - 1e-12 * std::abs(h2max) &&
          torus_distance(q, out.x1) >= 0.3) {
        out.x2 = q;
        found = true;
      }
    }
  if (!found)
    throw PoleCoincidence("no well-separated maximum of the second weight");

  GreenFunction green =
      linear_green(g, {{out.x1, eight_pi}, {out.x2, -eight_pi}});
  const RegularExpansion c1 = green.regulars.at(0);
  const RegularExpansion c2 = green.regulars.at(1);
  const TaylorData th1 = taylor_at(w.h1(), out.x1);
  const TaylorData th2 = taylor_at(w.h2(), out.x2);
  out.lower_bound = lower_bound_full(c1.A, c2.A, th1.value, th2.value);

  const double sep = torus_distance(out.x1, out.x2);
  const double cap = std::min(0.24, 0.25 * sep - g.spacing());
  for (double eps : eps_seq) {
    const double L = scale_rule_L(eps, cap);
    BubbleSpec s1{out.x1, eps, L};
    BubbleSpec s2{out.x2, eps, L};
    TestFunction tf = build_full(green, s1, s2);
    const ExpansionTerms meas = measure_terms(tf.field, w, eight_pi, eight_pi);
    const ExpansionTerms pred = predict_full(s1, s2, c1.A, c2.A, th1, th2);
    out.sweep.push_back({eps, L, meas.J, pred.J});
    if (!out.contradiction_eps && meas.J < out.lower_bound)
      out.contradiction_eps = eps;
  }
  return out;
}

void write_certificate_csv(std::ostream& os, const CertificateResult& r) {
  os << "eps,L,J_test,J_predicted,lower_bound\n";
  os.precision(17);
  for (const auto& e : r.sweep)
    os << e.eps << ',' << e.L << ',' << e.J_test << ',' << e.J_predicted << ','
       << r.lower_bound << '\n';
}

}  // namespace mfe
