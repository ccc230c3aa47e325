#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfe/asymptotics.hpp"

namespace mfe {

// Key/value scenario description. Files hold `key = value` lines with #
// comments; keys are dotted paths. The canonical form (sorted keys, single
// spacing) re-emits byte-identically and is what gets hashed.
struct Scenario {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key,
                               std::vector<double> fallback) const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string canonical_text(const Scenario& s);
std::uint64_t scenario_hash(const Scenario& s);  // FNV-1a over canonical text

Grid scenario_grid(const Scenario& s);
Weights scenario_weights(const Scenario& s);
Params scenario_params(const Scenario& s);
SolveConfig scenario_solver(const Scenario& s);

}  // namespace mfe
