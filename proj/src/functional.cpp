#include "mfe/functional.hpp"

#include <cmath>
#include <limits>

namespace mfe {

Weights::Weights(Field h1, Field h2) : h1_(std::move(h1)), h2_(std::move(h2)) {
  if (!(h1_.grid() == h2_.grid())) throw Error("weight grids differ");
  if (h1_.values().maxCoeff() <= 0 || h2_.values().maxCoeff() <= 0)
    throw Error("each weight must be positive somewhere");
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> Weights::positive_mask(
    int which) const {
  const Field& h = which == 1 ? h1_ : h2_;
  return h.values() > 0.0;
}

Regime Params::classify() const {
  validate();
  if (rho1 > eight_pi || rho2 > eight_pi) return Regime::Supercritical;
  const bool c1 = rho1 == eight_pi;
  const bool c2 = rho2 == eight_pi;
  if (c1 && c2) return Regime::FullCritical;
  if (c1 || c2) return Regime::PartialCritical;
  return Regime::Subcritical;
}

void Params::validate() const {
  if (!(rho1 > 0) || !(rho2 > 0)) throw Error("couplings must be positive");
  if (eps < 0 || eps >= rho1) throw Error("deformation must satisfy 0 <= eps < rho1");
}

LogIntegral weighted_log_integral(const Field& h, const Field& u, int sign) {
  const Eigen::ArrayXXd su = sign >= 0 ? u.values() : (-u.values()).eval();
  const double m = su.maxCoeff();
  const Eigen::ArrayXXd e = (su - m).exp();
  const double s = (h.values() * e).mean();
  const double sabs = (h.values().abs() * e).mean();
  LogIntegral out;
  out.ok = s > 1e-12 * sabs;
  out.log = out.ok ? m + std::log(s) : -std::numeric_limits<double>::infinity();
  return out;
}

AdmissibleReport admissible(const Field& u, const Weights& w) {
  if (!(u.grid() == w.grid())) throw Error("state grid differs from weight grid");
  AdmissibleReport r;
  const LogIntegral a = weighted_log_integral(w.h1(), u, +1);
  const LogIntegral b = weighted_log_integral(w.h2(), u, -1);
  r.ok = a.ok && b.ok;
  r.log_i1 = a.log;
  r.log_i2 = b.log;
  r.i1 = std::exp(a.log);
  r.i2 = std::exp(b.log);
  return r;
}

double evaluate_J(const Field& u, const Weights& w, const Params& p,
                  bool require_mean_zero) {
  p.validate();
  if (require_mean_zero &&
      std::abs(u.mean()) > 1e-8 * (1.0 + u.values().abs().maxCoeff()))
    throw NonZeroMean("J expects a mean-zero state");
  const AdmissibleReport a = admissible(u, w);
  if (!a.ok) throw Inadmissible("weighted integral not positive");
  return 0.5 * dirichlet_energy(u) - (p.rho1 - p.eps) * a.log_i1 -
         p.rho2 * a.log_i2;
}

Field gradient_J(const Field& u, const Weights& w, const Params& p) {
  p.validate();
  const AdmissibleReport a = admissible(u, w);
  if (!a.ok) throw Inadmissible("weighted integral not positive");
  Field g = laplacian(u);
  g.values() = -g.values() -
               (p.rho1 - p.eps) * (w.h1().values() * (u.values() - a.log_i1).exp() - 1.0) +
               p.rho2 * (w.h2().values() * (-u.values() - a.log_i2).exp() - 1.0);
  return g;
}

double mt_functional(const Field& u, double coeff) {
  if (std::abs(u.mean()) > 1e-8 * (1.0 + u.values().abs().maxCoeff()))
    throw NonZeroMean("expected a mean-zero state");
  Field one(u.grid());
  one.values().setOnes();
  const double l1 = weighted_log_integral(one, u, +1).log;
  const double l2 = weighted_log_integral(one, u, -1).log;
  return l1 + l2 - coeff * dirichlet_energy(u);
}

RatioBounds ratio_bounds(const Field& u, const Weights& w) {
  const AdmissibleReport a = admissible(u, w);
  if (!a.ok) throw Inadmissible("weighted integral not positive");
  Field one(u.grid());
  one.values().setOnes();
  RatioBounds r;
  r.r1 = std::exp(weighted_log_integral(one, u, +1).log - a.log_i1);
  r.r2 = std::exp(weighted_log_integral(one, u, -1).log - a.log_i2);
  r.c_floor = std::min(1.0 / w.h1().values().maxCoeff(),
                       1.0 / w.h2().values().maxCoeff());
  return r;
}

}  // namespace mfe
