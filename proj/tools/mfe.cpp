#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "mfe/io.hpp"
#include "mfe/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "mfe 0.1.0";

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir;
  int threads = 1;
  long long seed = -1;  // -1: take the scenario's seed
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario_path, "scenario file")->required();
  cmd->add_option("--out", o.out_dir, "output directory")->required();
  cmd->add_option("--threads", o.threads, "worker threads (computation is serial)");
  cmd->add_option("--seed", o.seed, "override the scenario seed");
}

json report_header(const mfe::Scenario& s, const CommonOpts& o,
                   unsigned long long seed) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(mfe::scenario_hash(s)));
  return json{{"version", kVersion},
              {"scenario_hash", hash},
              {"scenario", mfe::canonical_text(s)},
              {"threads", o.threads},
              {"seed", seed}};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw mfe::Error("cannot open " + p.string());
  os << text;
}

unsigned long long effective_seed(const mfe::Scenario& s, const CommonOpts& o) {
  if (o.seed >= 0) return static_cast<unsigned long long>(o.seed);
  return static_cast<unsigned long long>(s.get_num("seed", 0));
}

mfe::Field initial_state(const mfe::Scenario& s, const mfe::Grid& g) {
  const std::string path = s.get("init.file", "");
  if (path.empty()) return mfe::Field(g);
  mfe::Field f = mfe::read_field(path);
  if (!(f.grid() == g)) throw mfe::ConfigError("init grid differs from grid.n");
  return f;
}

json diag_json(const mfe::BlowupDiagnostics& d) {
  return json{{"m", d.m},           {"n", d.n},
              {"grad_l2", d.grad_l2}, {"w1s_norm", d.w1s_norm},
              {"log_i1", d.log_i1}, {"log_i2", d.log_i2}};
}

int run_solve(const CommonOpts& o) {
  const mfe::Scenario s = mfe::load_scenario(o.scenario_path);
  const mfe::Weights w = mfe::scenario_weights(s);
  const mfe::Params p = mfe::scenario_params(s);
  const mfe::SolveConfig cfg = mfe::scenario_solver(s);
  const mfe::SolveResult r =
      mfe::minimize(w, p, initial_state(s, w.grid()), cfg);

  fs::create_directories(o.out_dir);
  mfe::write_field((fs::path(o.out_dir) / "u.mfe").string(), r.u);
  mfe::write_csv((fs::path(o.out_dir) / "u.csv").string(), r.u);
  json rep = report_header(s, o, effective_seed(s, o));
  rep["command"] = "solve";
  rep["J"] = r.J;
  rep["grad_norm"] = r.grad_norm;
  rep["iters"] = r.iters;
  rep["converged"] = r.converged;
  rep["diagnostics"] = diag_json(r.diag);
  write_text(fs::path(o.out_dir) / "report.json", rep.dump(2) + "\n");
  write_text(fs::path(o.out_dir) / "scenario.canonical", mfe::canonical_text(s));
  return 0;
}

int run_continue(const CommonOpts& o) {
  const mfe::Scenario s = mfe::load_scenario(o.scenario_path);
  const mfe::Weights w = mfe::scenario_weights(s);
  const double rho2 = s.get_num("continue.rho2", s.get_num("params.rho2", mfe::four_pi));
  const std::vector<double> eps_seq =
      s.get_list("continue.eps_seq", {2.0, 1.0, 0.5, 0.25});
  const mfe::SolveConfig cfg = mfe::scenario_solver(s);
  const auto entries = mfe::continuation(w, rho2, eps_seq, cfg);

  fs::create_directories(o.out_dir);
  {
    std::ofstream os(fs::path(o.out_dir) / "continuation.csv");
    mfe::write_continuation_csv(os, entries);
  }
  json rep = report_header(s, o, effective_seed(s, o));
  rep["command"] = "continue";
  rep["rho2"] = rho2;
  json arr = json::array();
  for (const auto& e : entries) {
    json je{{"eps", e.eps}, {"ok", e.ok}};
    if (e.ok) {
      je["J"] = e.result.J;
      je["converged"] = e.result.converged;
      je["iters"] = e.result.iters;
      je["diagnostics"] = diag_json(e.result.diag);
    } else {
      je["error"] = e.error;
    }
    arr.push_back(je);
  }
  rep["entries"] = arr;
  const mfe::EquivalenceReport eq = mfe::blowup_equivalence_report(entries);
  rep["equivalence"] = json{{"tau_height_energy", eq.tau_height_energy},
                            {"tau_height_mass", eq.tau_height_mass},
                            {"tau_energy_mass", eq.tau_energy_mass},
                            {"verdict", eq.verdict}};
  write_text(fs::path(o.out_dir) / "report.json", rep.dump(2) + "\n");
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->ok) {
      mfe::write_field((fs::path(o.out_dir) / "u.mfe").string(), it->result.u);
      break;
    }
  return 0;
}

int run_certify(const CommonOpts& o) {
  const mfe::Scenario s = mfe::load_scenario(o.scenario_path);
  const mfe::Weights w = mfe::scenario_weights(s);
  const std::string mode_str = s.get("certify.mode", "partial");
  mfe::CertifyMode mode;
  if (mode_str == "partial")
    mode = mfe::CertifyMode::Partial;
  else if (mode_str == "full")
    mode = mfe::CertifyMode::Full;
  else
    throw mfe::ConfigError("certify.mode must be partial or full");
  const double rho2 =
      s.get_num("certify.rho2", s.get_num("params.rho2", mfe::four_pi));
  const std::vector<double> eps_seq =
      s.get_list("certify.eps_seq", {0.1, 0.05, 0.025});

  const mfe::CertificateResult r = mfe::certify(w, rho2, mode, eps_seq);

  fs::create_directories(o.out_dir);
  {
    std::ofstream os(fs::path(o.out_dir) / "certificate.csv");
    mfe::write_certificate_csv(os, r);
  }
  json rep = report_header(s, o, effective_seed(s, o));
  rep["command"] = "certify";
  rep["mode"] = mode_str;
  rep["rho2"] = rho2;
  rep["x1"] = {r.x1.x, r.x1.y};
  if (mode == mfe::CertifyMode::Full) rep["x2"] = {r.x2.x, r.x2.y};
  rep["lower_bound"] = r.lower_bound;
  rep["min_margin"] = r.min_margin;
  rep["condition_holds"] = r.condition_holds;
  rep["boundary_case"] = r.boundary_case;
  json arr = json::array();
  for (const auto& e : r.sweep)
    arr.push_back(json{{"eps", e.eps},
                       {"L", e.L},
                       {"J_test", e.J_test},
                       {"J_predicted", e.J_predicted}});
  rep["sweep"] = arr;
  if (r.contradiction_eps)
    rep["contradiction_eps"] = *r.contradiction_eps;
  else
    rep["contradiction_eps"] = nullptr;
  write_text(fs::path(o.out_dir) / "report.json", rep.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational laboratory for critical mean field equations on the torus"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts solve_o, cont_o, cert_o;
  CLI::App* solve = app.add_subcommand("solve", "minimize the energy for one parameter set");
  add_common(solve, solve_o);
  CLI::App* cont = app.add_subcommand("continue", "warm-started sweep toward the critical coupling");
  add_common(cont, cont_o);
  CLI::App* cert = app.add_subcommand("certify", "non-coercivity certificate from glued test functions");
  add_common(cert, cert_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(solve_o);
    if (cont->parsed()) return run_continue(cont_o);
    return run_certify(cert_o);
  } catch (const mfe::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const mfe::EmptyPositiveSet& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
    return 3;
  } catch (const mfe::GluingMismatch& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
    return 3;
  } catch (const mfe::BadRadii& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
    return 3;
  } catch (const mfe::PoleCoincidence& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
    return 3;
  } catch (const mfe::InsufficientResolution& e) {
    std::cerr << "certificate error: " << e.what() << "\n";
    return 3;
  } catch (const mfe::Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
