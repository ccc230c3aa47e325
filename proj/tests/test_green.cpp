#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "mfe/green.hpp"
#include "oracles.hpp"

using namespace mfe;

namespace {

Weights unit_weights(Grid g) {
  Field one(g);
  one.values().setOnes();
  return Weights(one, one);
}

}  // namespace

TEST_CASE("mollified delta integrates to zero after background removal") {
  Grid g(64);
  Field d = mollified_delta(g, {0.3, 0.6});
  CHECK(std::abs(integrate(d)) < 1e-12);
  // raw mass of the Gaussian itself is 1: add back the uniform background
  CHECK(d.values().maxCoeff() > 1.0);  // concentrated spike
}

TEST_CASE("linear green reproduces the lattice-sum reference pointwise") {
  Grid g(128);
  const Point p{0.25, 0.5};
  GreenFunction gf = linear_green(g, {{p, eight_pi}});
  // compare at moderate distances where the mollification is dead
  for (Point q : {Point{0.75, 0.5}, Point{0.25, 0.1}, Point{0.6, 0.8}}) {
    const double ref =
        eight_pi * oracle::torus_green(q.x - p.x, q.y - p.y);
    const int i = static_cast<int>(std::lround(q.x * g.n));
    const int j = static_cast<int>(std::lround(q.y * g.n));
    CHECK(gf.field(i, j) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("regular part matches the lattice-sum constant") {
  Grid g(256);
  GreenFunction gf = linear_green(g, {{{0.5, 0.5}, eight_pi}});
  const double ref = eight_pi * oracle::green_regular_part();
  CHECK(std::abs(regular_part(gf) - ref) < 1e-4);
  CHECK(std::abs(gf.regulars[0].A - ref) < 1e-4);
  // ring-average and annulus-fit routes agree
  CHECK(std::abs(regular_part(gf) - gf.regulars[0].A) < 1e-3);
}

TEST_CASE("regular part is translation invariant") {
  Grid g(128);
  GreenFunction a = linear_green(g, {{{0.25, 0.25}, eight_pi}});
  GreenFunction b = linear_green(g, {{{0.5, 0.75}, eight_pi}});
  CHECK(a.regulars[0].A == doctest::Approx(b.regulars[0].A).epsilon(1e-8));
}

TEST_CASE("two-pole expansion: tracelessness of the quadratic part") {
  Grid g(256);
  GreenFunction gf = linear_green(
      g, {{{0.25, 0.25}, eight_pi}, {{0.75, 0.75}, -eight_pi}});
  for (int i : {0, 1}) {
    const RegularExpansion e = gf.regulars[i];
    CHECK(std::abs(e.alpha + e.beta) < 1e-3);
  }
}

TEST_CASE("pole coincidence and resolution guards") {
  Grid g(64);
  const double h = g.spacing();
  CHECK_THROWS_AS(
      linear_green(g, {{{0.5, 0.5}, 1.0}, {{0.5 + h, 0.5}, 1.0}}),
      PoleCoincidence);
  GreenFunction gf = linear_green(
      g, {{{0.5, 0.5}, eight_pi}, {{0.5 + 5 * h, 0.5}, -eight_pi}});
  CHECK_THROWS_AS(expansion_coeffs(gf, 0), InsufficientResolution);
  CHECK_THROWS_AS(regular_part(gf, 0), InsufficientResolution);
  CHECK(std::isnan(gf.regulars[0].A));
}

TEST_CASE("weak residual of the linear equation is tiny") {
  Grid g(64);
  GreenFunction gf = linear_green(g, {{{0.3, 0.4}, eight_pi}});
  Weights w = unit_weights(g);
  const double r =
      weak_residual(gf, w, four_pi, {{0.1, 0.9}, {0.3, 0.4}, {0.7, 0.2}});
  CHECK(r < 1e-9);
}

TEST_CASE("nonlinear green satisfies its equation and the trace sum rule") {
  Grid g(256);
  Weights w = unit_weights(g);
  const double rho2 = four_pi;
  GreenFunction gf = nonlinear_green(w, rho2, {0.5, 0.5});
  REQUIRE(gf.beta2.has_value());

  // nodal strong-form residual of the smooth part
  const LogIntegral li = weighted_log_integral(w.h2(), gf.field, -1);
  Field lap = laplacian(gf.field);
  Field src = mollified_delta(g, {0.5, 0.5});
  Eigen::ArrayXXd res = -lap.values() - eight_pi * src.values() +
                        rho2 * (w.h2().values() *
                                    (-gf.field.values() - li.log).exp() -
                                1.0);
  CHECK(std::sqrt(res.square().mean()) < 1e-6);

  // alpha + beta = 4 pi - rho2 / 2
  const RegularExpansion e = gf.regulars[0];
  CHECK(e.alpha + e.beta ==
        doctest::Approx(four_pi - 0.5 * rho2).epsilon(0.01));

  // e^-G decays like r^4 at the pole: log-log slope of ring averages
  const Field eg(g, (-gf.field.values()).exp());
  const Spectrum egs = analyze(eg);
  const double h = g.spacing();
  const double r1 = 8 * h, r2 = 16 * h;
  const double v1 = ring_average(egs, {0.5, 0.5}, r1);
  const double v2 = ring_average(egs, {0.5, 0.5}, r2);
  const double slope = (std::log(v2) - std::log(v1)) / (std::log(r2) - std::log(r1));
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("nonlinear green approaches the linear one as rho2 vanishes") {
  Grid g(64);
  Weights w = unit_weights(g);
  GreenFunction lin = linear_green(g, {{{0.5, 0.5}, eight_pi}});
  GreenFunction non = nonlinear_green(w, 1e-6, {0.5, 0.5});
  CHECK((lin.field.values() - non.field.values()).abs().maxCoeff() < 1e-6);
}

TEST_CASE("nonlinear green rejects out-of-range couplings") {
  Grid g(64);
  Weights w = unit_weights(g);
  CHECK_THROWS_AS(nonlinear_green(w, 0.0, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(nonlinear_green(w, eight_pi, {0.5, 0.5}), Error);
}

TEST_CASE("nonlinear green handles a sign-changing second weight") {
  Grid g(128);
  Field one(g);
  one.values().setOnes();
  Field h2 = Field::sample(g, [](double, double y) {
    return std::cos(2 * oracle::pi * y) + 0.4;
  });
  Weights w(one, h2);
  GreenFunction gf = nonlinear_green(w, two_pi, {0.25, 0.75});
  const double r = weak_residual(gf, w, two_pi, {{0.6, 0.1}, {0.25, 0.75}});
  CHECK(r < 1e-7);
}

TEST_CASE("green moments feed consistent values") {
  Grid g(128);
  Weights w = unit_weights(g);
  GreenFunction gf = nonlinear_green(w, four_pi, {0.5, 0.5});
  const GreenMoments m = green_moments(gf, w);
  CHECK(m.beta2 == doctest::Approx(*gf.beta2).epsilon(1e-10));
  CHECK(m.A == doctest::Approx(gf.regulars[0].A));
  CHECK(m.log_i2 == doctest::Approx(-std::log(m.beta2)).epsilon(1e-12));
  CHECK(std::isfinite(m.h2_g_int));
}

TEST_CASE("green container round-trips") {
  Grid g(64);
  Weights w = unit_weights(g);
  GreenFunction gf = nonlinear_green(w, four_pi, {0.25, 0.5});
  const std::string path = "green_roundtrip.bin";
  write_green(path, gf);
  GreenFunction back = read_green(path);
  std::remove(path.c_str());
  CHECK((back.field.values() == gf.field.values()).all());
  CHECK(back.poles.size() == 1);
  CHECK(back.poles[0].strength == doctest::Approx(eight_pi));
  REQUIRE(back.beta2.has_value());
  CHECK(*back.beta2 == doctest::Approx(*gf.beta2));
  CHECK(back.regulars[0].A == doctest::Approx(gf.regulars[0].A));
}
