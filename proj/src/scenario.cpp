#include "mfe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mfe/io.hpp"

namespace mfe {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const char* const kKnownKeys[] = {
    "grid.n",
    "params.rho1", "params.rho2", "params.eps",
    "solver.grad_tol", "solver.max_iters", "solver.step0",
    "solver.backtrack", "solver.newton",
    "continue.rho2", "continue.eps_seq",
    "certify.mode", "certify.rho2", "certify.eps_seq",
    "init.file",
    "seed",
};

bool known_key(const std::string& k) {
  for (const char* s : kKnownKeys)
    if (k == s) return true;
  // weight families carry a small open parameter set
  return k.rfind("weights.h1.", 0) == 0 || k.rfind("weights.h2.", 0) == 0;
}

Field build_weight(const Scenario& s, const Grid& g, const std::string& prefix) {
  const std::string family = s.get(prefix + "family", "constant");
  if (family == "constant") {
    Field f(g);
    f.values().setConstant(s.get_num(prefix + "value", 1.0));
    return f;
  }
  if (family == "sinusoid") {
    const double off = s.get_num(prefix + "offset", 1.0);
    const double amp = s.get_num(prefix + "amplitude", 0.5);
    const double frq = s.get_num(prefix + "frequency", 1.0);
    const bool axis_y = s.get(prefix + "axis", "x") == "y";
    return Field::sample(g, [&](double x, double y) {
      return off + amp * std::sin(2.0 * std::numbers::pi * frq * (axis_y ? y : x));
    });
  }
  if (family == "bump") {
    const double off = s.get_num(prefix + "offset", 1.0);
    const double amp = s.get_num(prefix + "amplitude", 1.0);
    const double width = s.get_num(prefix + "width", 0.1);
    const Point c{s.get_num(prefix + "center_x", 0.5),
                  s.get_num(prefix + "center_y", 0.5)};
    if (!(width > 0)) throw ConfigError("bump width must be positive");
    return Field::sample(g, [&](double x, double y) {
      const double r = torus_distance({x, y}, c);
      return off + amp * std::exp(-0.5 * r * r / (width * width));
    });
  }
  if (family == "file") {
    const std::string path = s.get(prefix + "path", "");
    if (path.empty()) throw ConfigError("weight family 'file' needs a path");
    Field f = read_field(path);
    if (!(f.grid() == g)) throw ConfigError("weight grid differs from grid.n");
    return f;
  }
  throw ConfigError("unknown weight family: " + family);
}

}  // namespace

std::string Scenario::get(const std::string& key, const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Scenario::get_num(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + it->second);
  }
}

int Scenario::get_int(const std::string& key, int fallback) const {
  const double v = get_num(key, fallback);
  if (v != std::floor(v)) throw ConfigError("expected an integer for " + key);
  return static_cast<int>(v);
}

std::vector<double> Scenario::get_list(const std::string& key,
                                       std::vector<double> fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad list entry for " + key + ": " + tok);
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!known_key(key)) throw ConfigError("unknown key: " + key);
    if (s.kv.count(key)) throw ConfigError("duplicate key: " + key);
    s.kv[key] = val;
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_scenario(buf.str());
}

std::string canonical_text(const Scenario& s) {
  std::string out;
  for (const auto& [k, v] : s.kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t scenario_hash(const Scenario& s) {
  const std::string text = canonical_text(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Grid scenario_grid(const Scenario& s) {
  const int n = s.get_int("grid.n", 128);
  try {
    return Grid(n);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

Weights scenario_weights(const Scenario& s) {
  const Grid g = scenario_grid(s);
  try {
    return Weights(build_weight(s, g, "weights.h1."),
                   build_weight(s, g, "weights.h2."));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

Params scenario_params(const Scenario& s) {
  Params p;
  p.rho1 = s.get_num("params.rho1", eight_pi);
  p.rho2 = s.get_num("params.rho2", four_pi);
  p.eps = s.get_num("params.eps", 0.0);
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return p;
}

SolveConfig scenario_solver(const Scenario& s) {
  SolveConfig c;
  c.grad_tol = s.get_num("solver.grad_tol", c.grad_tol);
  c.max_iters = s.get_int("solver.max_iters", c.max_iters);
  c.step0 = s.get_num("solver.step0", c.step0);
  c.backtrack = s.get_num("solver.backtrack", c.backtrack);
  c.newton_refine = s.get_int("solver.newton", c.newton_refine ? 1 : 0) != 0;
  if (!(c.grad_tol > 0) || c.max_iters <= 0 || !(c.step0 > 0) ||
      !(c.backtrack > 0) || !(c.backtrack < 1))
    throw ConfigError("bad solver configuration");
  return c;
}

}  // namespace mfe
