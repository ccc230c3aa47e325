#include "mfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace mfe {

namespace {

void remove_mean(Field& u) { u.values() -= u.mean(); }

double inner(const Field& a, const Field& b) {
  return (a.values() * b.values()).mean();
}

// Laplacian-preconditioned direction: solve -lap d = g on the mean-zero part.
Field precondition(const Field& g) {
  Field s = g;
  s.values() -= s.mean();
  Field d = inverse_laplacian(s);
  d.values() = -d.values();
  return d;
}

struct Objective {
  const Weights& w;
  const Params& p;

  bool eval(const Field& u, double& J) const {
    const AdmissibleReport a = admissible(u, w);
    if (!a.ok) return false;
    J = 0.5 * dirichlet_energy(u) - (p.rho1 - p.eps) * a.log_i1 - p.rho2 * a.log_i2;
    return true;
  }
};

// Hessian action at u: H v = -lap v - (rho1-eps)(d1 v - d1 int d1 v)
//                              - rho2 (d2 v - d2 int d2 v),
// where d1 = h1 e^u / I1 and d2 = h2 e^-u / I2 are the normalized densities.
struct HessianApply {
  Eigen::ArrayXXd d1, d2;
  double c1, c2;
  Grid grid;

  Field operator()(const Field& v) const {
    Field out = laplacian(v);
    const double m1 = (d1 * v.values()).mean();
    const double m2 = (d2 * v.values()).mean();
    out.values() = -out.values() - c1 * (d1 * v.values() - d1 * m1) -
                   c2 * (d2 * v.values() - d2 * m2);
    return out;
  }
};

// Preconditioned CG on the mean-zero subspace; returns false on negative
// curvature before making progress.
bool newton_direction(const HessianApply& H, const Field& g, Field& dir) {
  Field x(g.grid());
  Field r = g;
  remove_mean(r);
  const double gn = std::sqrt(inner(r, r));
  Field z = precondition(r);
  Field pdir = z;
  double rz = inner(r, z);
  for (int it = 0; it < 200; ++it) {
    Field hp = H(pdir);
    remove_mean(hp);
    const double php = inner(pdir, hp);
    if (php <= 0) {  // negative curvature: keep the progress made so far
      dir = x;
      return it > 0;
    }
    const double alpha = rz / php;
    x.values() += alpha * pdir.values();
    r.values() -= alpha * hp.values();
    if (std::sqrt(inner(r, r)) <= 0.01 * gn) break;
    z = precondition(r);
    const double rz_new = inner(r, z);
    pdir.values() = z.values() + (rz_new / rz) * pdir.values();
    rz = rz_new;
  }
  dir = x;
  return inner(x, x) > 0;
}

}  // namespace

BlowupDiagnostics blowup_diagnostics(const Field& u, const Weights& w) {
  BlowupDiagnostics d;
  const AdmissibleReport a = admissible(u, w);
  d.log_i1 = a.log_i1;
  d.log_i2 = a.log_i2;
  d.m = u.values().maxCoeff() - a.log_i1;
  d.n = (-u.values()).maxCoeff() - a.log_i2;
  d.grad_l2 = std::sqrt(dirichlet_energy(u));
  auto [gx, gy] = gradient(u);
  const Eigen::ArrayXXd mag =
      (gx.values().square() + gy.values().square()).sqrt();
  d.w1s_norm = std::pow(mag.pow(1.5).mean(), 2.0 / 3.0);
  return d;
}

SolveResult minimize(const Weights& w, const Params& p, const Field& init,
                     const SolveConfig& cfg) {
  p.validate();
  Field u = init;
  remove_mean(u);
  Objective obj{w, p};
  double J;
  if (!obj.eval(u, J)) throw InadmissibleInit("initial state is inadmissible");

  Field g = gradient_J(u, w, p);
  double gn = std::sqrt(inner(g, g));
  int iters = 0;

  while (gn > cfg.grad_tol && iters < cfg.max_iters) {
    const bool try_newton = cfg.newton_refine && gn < 100.0 * cfg.grad_tol;
    Field dir;
    double slope = 0;
    bool have_newton = false;

    if (try_newton) {
      const AdmissibleReport a = admissible(u, w);
      HessianApply H{w.h1().values() * (u.values() - a.log_i1).exp(),
                     w.h2().values() * (-u.values() - a.log_i2).exp(),
                     p.rho1 - p.eps, p.rho2, u.grid()};
      have_newton = newton_direction(H, g, dir);
      if (have_newton) {
        slope = inner(g, dir);
        if (slope <= 0) have_newton = false;
      }
    }
    if (!have_newton) {
      dir = precondition(g);
      slope = inner(g, dir);
    }

    double t = have_newton ? 1.0 : cfg.step0;
    bool accepted = false;
    while (t > 1e-14 * cfg.step0) {
      Field trial = u;
      trial.values() -= t * dir.values();
      remove_mean(trial);
      double Jt;
      if (obj.eval(trial, Jt) && Jt <= J - cfg.armijo * t * slope) {
        u = trial;
        J = Jt;
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      if (have_newton) {
        // retry with the plain preconditioned direction before giving up
        dir = precondition(g);
        slope = inner(g, dir);
        t = cfg.step0;
        while (t > 1e-14 * cfg.step0) {
          Field trial = u;
          trial.values() -= t * dir.values();
          remove_mean(trial);
          double Jt;
          if (obj.eval(trial, Jt) && Jt <= J - cfg.armijo * t * slope) {
            u = trial;
            J = Jt;
            accepted = true;
            break;
          }
          t *= cfg.backtrack;
        }
      }
      if (!accepted) throw LineSearchStall("no admissible decrease step found");
    }
    g = gradient_J(u, w, p);
    gn = std::sqrt(inner(g, g));
    ++iters;
  }

  SolveResult r;
  r.u = u;
  r.J = J;
  r.grad_norm = gn;
  r.iters = iters;
  r.converged = gn <= cfg.grad_tol;
  r.diag = blowup_diagnostics(u, w);
  return r;
}

std::vector<ContinuationEntry> continuation(const Weights& w, double rho2,
                                            const std::vector<double>& eps_seq,
                                            const SolveConfig& cfg) {
  std::vector<ContinuationEntry> out;
  Field warm(w.grid());
  for (double eps : eps_seq) {
    ContinuationEntry e;
    e.eps = eps;
    Params p{eight_pi, rho2, eps};
    try {
      e.result = minimize(w, p, warm, cfg);
      e.ok = true;
      warm = e.result.u;
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_continuation_csv(std::ostream& os,
                            const std::vector<ContinuationEntry>& entries) {
  os << "eps,converged,iters,J,grad_norm,m,n,grad_l2,w1s_norm,log_i1,log_i2\n";
  os.precision(17);
  for (const auto& e : entries) {
    if (!e.ok) {
      os << e.eps << ",error,,,,,,,,,\n";
      continue;
    }
    const auto& r = e.result;
    os << e.eps << ',' << (r.converged ? 1 : 0) << ',' << r.iters << ','
       << r.J << ',' << r.grad_norm << ',' << r.diag.m << ',' << r.diag.n
       << ',' << r.diag.grad_l2 << ',' << r.diag.w1s_norm << ','
       << r.diag.log_i1 << ',' << r.diag.log_i2 << '\n';
  }
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw TooFewSamples("need at least two paired samples");
  const int n = static_cast<int>(a.size());
  double num = 0;
  int pairs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double da = a[j] - a[i];
      const double db = b[j] - b[i];
      const double s = (da > 0) - (da < 0);
      const double t = (db > 0) - (db < 0);
      num += s * t;
      ++pairs;
    }
  return num / pairs;
}

EquivalenceReport blowup_equivalence_report(
    const std::vector<ContinuationEntry>& entries) {
  std::vector<double> height, energy, mass;
  for (const auto& e : entries) {
    if (!e.ok) continue;
    height.push_back(e.result.diag.m + e.result.diag.n);
    energy.push_back(e.result.diag.grad_l2);
    mass.push_back(e.result.diag.log_i1 + e.result.diag.log_i2);
  }
  EquivalenceReport r;
  r.tau_height_energy = kendall_tau(height, energy);
  r.tau_height_mass = kendall_tau(height, mass);
  r.tau_energy_mass = kendall_tau(energy, mass);
  r.verdict = (r.tau_height_energy == 1.0 && r.tau_height_mass == 1.0 &&
               r.tau_energy_mass == 1.0)
                  ? "co-monotone"
                  : "mixed";
  return r;
}

std::vector<ConcentrationCandidate> concentration_candidates(
    const Field& u, const Weights& w, const Params& p, double ball_radius) {
  const AdmissibleReport a = admissible(u, w);
  if (!a.ok) throw Inadmissible("weighted integral not positive");
  const Grid g = u.grid();
  const double h = g.spacing();
  const Eigen::ArrayXXd d1 =
      w.h1().values() * (u.values() - a.log_i1).exp();
  const Eigen::ArrayXXd d2 =
      w.h2().values() * (-u.values() - a.log_i2).exp();

  std::vector<ConcentrationCandidate> out;
  const double umax = u.values().maxCoeff();
  const double umin = u.values().minCoeff();
  auto local_max = [&](const Eigen::ArrayXXd& f, int i, int j) {
    const double v = f(i, j);
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        if (f((i + di + g.n) % g.n, (j + dj + g.n) % g.n) > v) return false;
      }
    return true;
  };
  auto ball_mass = [&](const Eigen::ArrayXXd& f, Point c) {
    double s = 0;
    const int r = static_cast<int>(std::ceil(ball_radius / h)) + 1;
    const int ci = static_cast<int>(std::lround(c.x / h));
    const int cj = static_cast<int>(std::lround(c.y / h));
    for (int di = -r; di <= r; ++di)
      for (int dj = -r; dj <= r; ++dj) {
        const Point q{(ci + di) * h, (cj + dj) * h};
        if (torus_distance(q, c) > ball_radius) continue;
        s += f((ci + di + 16 * g.n) % g.n, (cj + dj + 16 * g.n) % g.n);
      }
    return s * h * h;
  };

  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const bool peak1 = local_max(d1, i, j) && u(i, j) > umax - 1.0;
      const bool peak2 = local_max(d2, i, j) && -u(i, j) > -umin - 1.0;
      if (!peak1 && !peak2) continue;
      ConcentrationCandidate c;
      c.x = {i * h, j * h};
      c.mass1 = ball_mass(d1, c.x);
      c.mass2 = ball_mass(d2, c.x);
      c.gamma = p.rho1 * c.mass1 - p.rho2 * c.mass2;
      const double q = c.gamma / eight_pi;
      c.flagged = std::abs(q - std::round(q)) < 0.05 && std::abs(q) > 0.5;
      out.push_back(c);
    }
  return out;
}

}  // namespace mfe
