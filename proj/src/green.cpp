#include "mfe/green.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>

namespace mfe {

namespace {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

double source_sigma(const Grid& g) { return 1.5 * g.spacing(); }

// Fit annulus about each pole, in grid spacings.
constexpr double kFitInner = 8.0;
constexpr double kFitOuter = 20.0;

Spectrum source_spectrum(const Grid& g, const std::vector<Pole>& poles) {
  const int n = g.n;
  const double sigma = source_sigma(g);
  Spectrum s(n, n);
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = freq(j, n);
      const double k2sum = double(k1) * k1 + double(k2) * k2;
      cd acc = 0.0;
      for (const Pole& p : poles)
        acc += p.strength * std::exp(cd(0.0, -2.0 * pi * (k1 * p.x.x + k2 * p.x.y)));
      s(i, j) = acc * std::exp(-2.0 * pi * pi * sigma * sigma * k2sum);
    }
  }
  s(0, 0) = 0.0;  // uniform background absorbs the total source strength
  return s;
}

// Mean-zero field with -lap G = source (in spectral form).
std::pair<Field, Spectrum> solve_poisson(const Grid& g, const Spectrum& src) {
  const int n = g.n;
  Spectrum c(n, n);
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = freq(j, n);
      const double k2sum = double(k1) * k1 + double(k2) * k2;
      c(i, j) = k2sum == 0.0 ? cd(0.0) : src(i, j) / (4.0 * pi * pi * k2sum);
    }
  }
  return {synthesize(g, c), c};
}

double pole_clearance(const GreenFunction& g, int idx) {
  double best = 1.0;
  for (int j = 0; j < static_cast<int>(g.poles.size()); ++j) {
    if (j == idx) continue;
    best = std::min(best, torus_distance(g.poles[idx].x, g.poles[j].x));
  }
  return best;
}

void fit_regulars(GreenFunction& g) {
  g.regulars.clear();
  const double h = g.field.grid().spacing();
  for (int i = 0; i < static_cast<int>(g.poles.size()); ++i) {
    if (pole_clearance(g, i) >= (kFitOuter + 4.0) * h)
      g.regulars.push_back(expansion_coeffs(g, i));
    else
      g.regulars.push_back({std::nan(""), std::nan(""), std::nan(""),
                            std::nan(""), std::nan(""), std::nan(""),
                            std::nan("")});
  }
}

Eigen::ArrayXXd nonlinear_rhs(const Weights& w, double rho2, const Field& G,
                              double& log_i2) {
  const LogIntegral li = weighted_log_integral(w.h2(), G, -1);
  if (!li.ok) throw AdmissibilityLoss("int h2 e^-G is not positive");
  log_i2 = li.log;
  return -rho2 * (w.h2().values() * (-G.values() - li.log).exp() - 1.0);
}

}  // namespace

Field mollified_delta(const Grid& g, Point p) {
  return synthesize(g, source_spectrum(g, {{p, 1.0}}));
}

GreenFunction linear_green(const Grid& g, std::vector<Pole> poles) {
  if (poles.empty()) throw Error("need at least one pole");
  const double h = g.spacing();
  for (size_t i = 0; i < poles.size(); ++i)
    for (size_t j = i + 1; j < poles.size(); ++j)
      if (torus_distance(poles[i].x, poles[j].x) < 2.0 * h)
        throw PoleCoincidence("poles closer than two grid spacings");
  GreenFunction out;
  auto [f, c] = solve_poisson(g, source_spectrum(g, poles));
  out.field = std::move(f);
  out.spectrum = std::move(c);
  out.poles = std::move(poles);
  out.sigma = source_sigma(g);
  fit_regulars(out);
  return out;
}

GreenFunction nonlinear_green(const Weights& w, double rho2, Point x1,
                              double tol, int max_iters) {
  if (!(rho2 > 0) || !(rho2 < eight_pi))
    throw Error("rho2 must lie strictly between 0 and 8 pi");
  const Grid g = w.grid();
  const std::vector<Pole> poles{{x1, eight_pi}};
  auto [gs, gs_spec] = solve_poisson(g, source_spectrum(g, poles));

  Field v(g);
  double log_i2 = 0;
  double prev_res = std::numeric_limits<double>::infinity();
  int worse = 0;
  bool done = false;
  int it = 0;
  double prev_log_i2 = std::numeric_limits<double>::infinity();

  for (; it < max_iters; ++it) {
    Field G = gs;
    G.values() += v.values();
    Eigen::ArrayXXd rhs = nonlinear_rhs(w, rho2, G, log_i2);
    rhs -= rhs.mean();

    Field lv = laplacian(v);
    const double res = std::sqrt((lv.values() + rhs).square().mean());
    if (res <= tol && std::abs(log_i2 - prev_log_i2) <= 1e-10) {
      done = true;
      break;
    }
    prev_log_i2 = log_i2;
    worse = res >= prev_res ? worse + 1 : 0;
    prev_res = res;
    if (worse >= 3) break;  // Picard stalled; switch to energy descent

    Field target = inverse_laplacian(Field(g, (-rhs).eval()));
    v.values() += 0.5 * (target.values() - v.values());  // damped update
  }

  if (!done) {
    // Descent on the strictly convex energy
    //   Psi(v) = 1/2 int |grad v|^2 - rho2 log int h2 e^{-(Gs + v)}
    // whose mean-zero critical point solves the fixed-point equation.
    auto psi = [&](const Field& vv, double& val) {
      Field G = gs;
      G.values() += vv.values();
      const LogIntegral li = weighted_log_integral(w.h2(), G, -1);
      if (!li.ok) return false;
      val = 0.5 * dirichlet_energy(vv) - rho2 * li.log;
      return true;
    };
    double val;
    if (!psi(v, val)) v = Field(g);
    if (!psi(v, val)) throw AdmissibilityLoss("int h2 e^-G is not positive");
    for (; it < max_iters; ++it) {
      Field G = gs;
      G.values() += v.values();
      Eigen::ArrayXXd rhs = nonlinear_rhs(w, rho2, G, log_i2);
      rhs -= rhs.mean();
      Field grad = laplacian(v);
      grad.values() = -grad.values() - rhs;  // gradient of Psi, mean-zero
      const double res = std::sqrt(grad.values().square().mean());
      if (res <= tol) {
        done = true;
        break;
      }
      Field mg = grad;
      mg.values() -= mg.mean();
      Field dir = inverse_laplacian(mg);
      dir.values() = -dir.values();
      const double slope = (grad.values() * dir.values()).mean();
      double t = 1.0;
      bool accepted = false;
      while (t > 1e-14) {
        Field trial = v;
        trial.values() -= t * dir.values();
        double tv;
        if (psi(trial, tv) && tv <= val - 1e-4 * t * slope) {
          v = trial;
          val = tv;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) throw NonConvergence("descent stalled on the Green energy");
    }
    if (!done) throw NonConvergence("nonlinear Green iteration budget exhausted");
  }

  GreenFunction out;
  out.field = gs;
  out.field.values() += v.values();
  out.field.values() -= out.field.mean();
  out.spectrum = analyze(out.field);
  out.poles = poles;
  out.sigma = source_sigma(g);
  out.beta2 = std::exp(-weighted_log_integral(w.h2(), out.field, -1).log);
  fit_regulars(out);
  return out;
}

double regular_part(const GreenFunction& g, int pole_index) {
  const Grid grid = g.field.grid();
  const double h = grid.spacing();
  const Pole& p = g.poles[pole_index];
  if (pole_clearance(g, pole_index) < 20.0 * h)
    throw InsufficientResolution("pole too close to another for ring averages");
  const double radii[3] = {8.0 * h, 12.0 * h, 16.0 * h};
  Eigen::Matrix3d M;
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i) {
    const double r = radii[i];
    M(i, 0) = 1.0;
    M(i, 1) = r * r;
    M(i, 2) = r * r * r * r;
    b(i) = ring_average(g.spectrum, p.x, r) + (p.strength / (2.0 * pi)) * std::log(r);
  }
  const Eigen::Vector3d sol = M.fullPivLu().solve(b);
  // Undo the quadratic shift the Gaussian smoothing adds to the constant term.
  return sol(0) - 2.0 * g.sigma * g.sigma * sol(1);
}

RegularExpansion expansion_coeffs(const GreenFunction& g, int pole_index) {
  const Grid grid = g.field.grid();
  const int n = grid.n;
  const double h = grid.spacing();
  const Pole& p = g.poles[pole_index];
  if (pole_clearance(g, pole_index) < (kFitOuter + 4.0) * h)
    throw InsufficientResolution("pole too close to another for the annulus fit");

  // Monomials dx^a dy^b with a + b <= 4, graded lexicographic:
  // 1, dx, dy, dx^2, dx dy, dy^2, ...
  std::vector<std::pair<int, int>> mono;
  for (int d = 0; d <= 4; ++d)
    for (int a = d; a >= 0; --a) mono.emplace_back(a, d - a);
  const int m = static_cast<int>(mono.size());

  std::vector<Point> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point d = torus_displacement({i * h, j * h}, p.x);
      const double r = std::hypot(d.x, d.y);
      if (r >= kFitInner * h && r <= kFitOuter * h) pts.push_back(d);
    }
  if (static_cast<int>(pts.size()) < 3 * m)
    throw InsufficientResolution("too few annulus nodes for the fit");

  Eigen::MatrixXd X(pts.size(), m);
  Eigen::VectorXd y(pts.size());
  for (size_t r = 0; r < pts.size(); ++r) {
    const Point d = pts[r];
    for (int c = 0; c < m; ++c)
      X(r, c) = std::pow(d.x, mono[c].first) * std::pow(d.y, mono[c].second);
    const Point q{p.x.x + d.x, p.x.y + d.y};
    const int i = static_cast<int>(std::lround(q.x / h) + 4 * n) % n;
    const int j = static_cast<int>(std::lround(q.y / h) + 4 * n) % n;
    y(r) = g.field(i, j) +
           (p.strength / (2.0 * pi)) * std::log(std::hypot(d.x, d.y));
  }

  Eigen::VectorXd scale = X.colwise().template lpNorm<Eigen::Infinity>();
  for (int c = 0; c < m; ++c) X.col(c) /= scale(c);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < m) throw IllConditionedFit("annulus design matrix is rank deficient");
  Eigen::VectorXd sol = qr.solve(y);
  const double rms = std::sqrt((X * sol - y).squaredNorm() / pts.size());
  sol.array() /= scale.array();

  RegularExpansion e;
  e.A = sol(0);
  e.lambda = sol(1);
  e.nu = sol(2);
  e.alpha = sol(3);
  e.xi = sol(4);
  e.beta = sol(5);
  e.fit_residual = rms;
  // Undo the quadratic shift the Gaussian smoothing adds to the constant term.
  e.A -= g.sigma * g.sigma * (e.alpha + e.beta);
  return e;
}

double mollified_value(const GreenFunction& g, Point p) {
  const int n = g.field.grid().n;
  cd acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = freq(j, n);
      const double k2sum = double(k1) * k1 + double(k2) * k2;
      acc += g.spectrum(i, j) *
             std::exp(cd(0.0, 2.0 * pi * (k1 * p.x + k2 * p.y))) *
             std::exp(-2.0 * pi * pi * g.sigma * g.sigma * k2sum);
    }
  }
  return acc.real();
}

double weak_residual(const GreenFunction& g, const Weights& w, double rho2,
                     const std::vector<Point>& probes) {
  const Grid grid = g.field.grid();
  Field neg_lap = laplacian(g.field);
  neg_lap.values() = -neg_lap.values();

  // nodal source: mollified poles minus background, plus the nonlinear term
  Eigen::ArrayXXd src = Eigen::ArrayXXd::Zero(grid.n, grid.n);
  for (const Pole& p : g.poles)
    src += p.strength * mollified_delta(grid, p.x).values();
  if (g.beta2) {
    const LogIntegral li = weighted_log_integral(w.h2(), g.field, -1);
    src -= rho2 * (w.h2().values() * (-g.field.values() - li.log).exp() - 1.0);
  }
  double worst = 0;
  for (const Point& q : probes) {
    Field t = mollified_delta(grid, q);
    const double r = ((neg_lap.values() - src) * t.values()).mean();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

GreenMoments green_moments(const GreenFunction& g, const Weights& w) {
  if (g.regulars.empty() || std::isnan(g.regulars[0].A))
    throw Error("green field lacks a fitted expansion");
  GreenMoments m;
  m.A = g.regulars[0].A;
  const LogIntegral li = weighted_log_integral(w.h2(), g.field, -1);
  if (!li.ok) throw AdmissibilityLoss("int h2 e^-G is not positive");
  m.log_i2 = li.log;
  m.beta2 = g.beta2 ? *g.beta2 : std::exp(-li.log);
  m.h2_g_int =
      (w.h2().values() * g.field.values() * (-g.field.values()).exp()).mean();
  return m;
}

void write_green(const std::string& path, const GreenFunction& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os.write("MFG1", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(g.field.grid().n);
  os.write(reinterpret_cast<const char*>(&n), 4);
  auto wd = [&](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  for (int i = 0; i < g.field.grid().n; ++i)
    for (int j = 0; j < g.field.grid().n; ++j) wd(g.field(i, j));
  wd(g.sigma);
  const std::uint32_t np = static_cast<std::uint32_t>(g.poles.size());
  os.write(reinterpret_cast<const char*>(&np), 4);
  for (const Pole& p : g.poles) {
    wd(p.x.x);
    wd(p.x.y);
    wd(p.strength);
  }
  wd(g.beta2 ? *g.beta2 : std::nan(""));
  for (const RegularExpansion& e : g.regulars) {
    wd(e.A);
    wd(e.lambda);
    wd(e.nu);
    wd(e.alpha);
    wd(e.beta);
    wd(e.xi);
    wd(e.fit_residual);
  }
  if (!os) throw Error("green write failed");
}

GreenFunction read_green(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "MFG1") throw Error("bad green container");
  std::uint32_t n = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  Grid grid(static_cast<int>(n));
  auto rd = [&]() {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    if (!is) throw Error("truncated green container");
    return v;
  };
  Eigen::ArrayXXd vals(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) vals(i, j) = rd();
  GreenFunction g;
  g.field = Field(grid, std::move(vals));
  g.spectrum = analyze(g.field);
  g.sigma = rd();
  std::uint32_t np = 0;
  is.read(reinterpret_cast<char*>(&np), 4);
  for (std::uint32_t i = 0; i < np; ++i) {
    Pole p;
    p.x.x = rd();
    p.x.y = rd();
    p.strength = rd();
    g.poles.push_back(p);
  }
  const double b2 = rd();
  if (!std::isnan(b2)) g.beta2 = b2;
  for (std::uint32_t i = 0; i < np; ++i) {
    RegularExpansion e;
    e.A = rd();
    e.lambda = rd();
    e.nu = rd();
    e.alpha = rd();
    e.beta = rd();
    e.xi = rd();
    e.fit_residual = rd();
    g.regulars.push_back(e);
  }
  return g;
}

}  // namespace mfe
