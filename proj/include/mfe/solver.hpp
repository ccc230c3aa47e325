#pragma once

#include <string>
#include <vector>

#include "mfe/functional.hpp"

namespace mfe {

struct SolveConfig {
  double grad_tol = 1e-8;
  int max_iters = 5000;
  double step0 = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  bool newton_refine = true;
};

struct BlowupDiagnostics {
  double m = 0;        // max u - log int h1 e^u
  double n = 0;        // max(-u) - log int h2 e^-u
  double grad_l2 = 0;  // Dirichlet seminorm of the state
  double w1s_norm = 0; // |grad u| in L^{3/2}
  double log_i1 = 0;
  double log_i2 = 0;
};

BlowupDiagnostics blowup_diagnostics(const Field& u, const Weights& w);

struct SolveResult {
  Field u;
  double J = 0;
  double grad_norm = 0;
  int iters = 0;
  bool converged = false;
  BlowupDiagnostics diag;
};

// Laplacian-preconditioned descent with Armijo backtracking, switching to
// preconditioned Newton-CG near a stationary point. The iterate stays
// mean-zero and admissible throughout.
SolveResult minimize(const Weights& w, const Params& p, const Field& init,
                     const SolveConfig& cfg = {});

struct ContinuationEntry {
  double eps = 0;
  bool ok = false;
  std::string error;
  SolveResult result;
};

// Warm-started sweep over a decreasing deformation sequence at rho1 = 8*pi.
std::vector<ContinuationEntry> continuation(const Weights& w, double rho2,
                                            const std::vector<double>& eps_seq,
                                            const SolveConfig& cfg = {});

void write_continuation_csv(std::ostream& os,
                            const std::vector<ContinuationEntry>& entries);

// Kendall rank correlation of two equal-length sequences.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

struct EquivalenceReport {
  double tau_height_energy = 0;  // (m+n) vs Dirichlet seminorm
  double tau_height_mass = 0;    // (m+n) vs log I1 + log I2
  double tau_energy_mass = 0;
  std::string verdict;           // "co-monotone" when all pairwise taus == 1
};

EquivalenceReport blowup_equivalence_report(
    const std::vector<ContinuationEntry>& entries);

struct ConcentrationCandidate {
  Point x;
  double mass1 = 0;  // ball integral of h1 e^u / I1
  double mass2 = 0;  // ball integral of h2 e^-u / I2
  double gamma = 0;  // rho1 * mass1 - rho2 * mass2
  bool flagged = false;  // gamma within tolerance of a multiple of 8*pi
};

std::vector<ConcentrationCandidate> concentration_candidates(
    const Field& u, const Weights& w, const Params& p, double ball_radius);

}  // namespace mfe
