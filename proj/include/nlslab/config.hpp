#pragma once
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "initial_data.hpp"
#include "params.hpp"

namespace nlslab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalysisToggles {
  bool virial = true;
  std::vector<double> virial_m{10.0};
  bool concentration = true;
  double eta1 = 0.1;
  double Ctilde1 = 10.0;
  double c_prime = 0.5;
  double C_prime = 4.0;
  double tower_eta = 0;  // 0: use (c_prime)^{1/sqrt(delta)}
  bool scattering = false;
  double scatter_tol = 1e-3;
};

struct RunConfig {
  GridSpec grid;
  EvolutionParams evolution;
  ThresholdConstants thresholds;
  double delta = 0.05;
  DataDescriptor data;
  AnalysisToggles analysis;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  double tower_eta_effective() const {
    return analysis.tower_eta > 0 ? analysis.tower_eta
                                  : std::pow(analysis.c_prime, 1.0 / std::sqrt(delta));
  }
  void sync_and_validate() {
    evolution.nl.n = grid.n;
    thresholds.n = grid.n;
    grid.validate();
    evolution.validate();
    thresholds.validate();
    if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0,1)");
    if (!(analysis.eta1 > 0) || !(analysis.Ctilde1 > 0) || !(analysis.c_prime > 0) ||
        !(analysis.C_prime > 0) || !(analysis.scatter_tol > 0))
      throw ConfigError("analysis constants must be positive");
  }
};

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
inline std::string where(const std::string& key, int line) {
  return "line " + std::to_string(line) + ", key '" + key + "'";
}
inline double to_double(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where(key, line) + ": expected a real number, got '" + v + "'");
  }
}
inline long long to_ll(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where(key, line) + ": expected an integer, got '" + v + "'");
  }
}
inline std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where(key, line) + ": expected an unsigned integer, got '" + v + "'");
  }
}
inline bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where(key, line) + ": expected true/false, got '" + v + "'");
}
inline std::vector<double> to_list(const std::string& v, const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, key, line));
  }
  if (out.empty()) throw ConfigError(where(key, line) + ": expected a comma-separated list");
  return out;
}
inline std::string list_str(const std::vector<double>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt_g17(xs[i]);
  return s;
}

inline bool apply_key(RunConfig& c, const std::string& key, const std::string& val, int line) {
  if (key == "grid.n") c.grid.n = static_cast<int>(to_ll(val, key, line));
  else if (key == "grid.r_max") c.grid.r_max = to_double(val, key, line);
  else if (key == "grid.num_modes") c.grid.num_modes = static_cast<int>(to_ll(val, key, line));
  else if (key == "nonlinearity.gamma") c.evolution.nl.gamma = to_double(val, key, line);
  else if (key == "evolution.dt") c.evolution.dt = to_double(val, key, line);
  else if (key == "evolution.t_end") c.evolution.t_end = to_double(val, key, line);
  else if (key == "evolution.snapshot_stride") c.evolution.snapshot_stride = static_cast<int>(to_ll(val, key, line));
  else if (key == "evolution.amplitude_cap_factor") c.evolution.amplitude_cap_factor = to_double(val, key, line);
  else if (key == "evolution.kinetic_cap_factor") c.evolution.kinetic_cap_factor = to_double(val, key, line);
  else if (key == "evolution.boundary_shell_fraction") c.evolution.boundary_shell_fraction = to_double(val, key, line);
  else if (key == "evolution.linear_only") c.evolution.linear_only = to_bool(val, key, line);
  else if (key == "evolution.k_report") c.evolution.k_report = to_double(val, key, line);
  else if (key == "thresholds.k") c.thresholds.k = to_double(val, key, line);
  else if (key == "thresholds.c_breve") c.thresholds.c_breve = to_double(val, key, line);
  else if (key == "thresholds.C_breve") c.thresholds.C_breve = to_double(val, key, line);
  else if (key == "thresholds.C_a") c.thresholds.C_a = to_double(val, key, line);
  else if (key == "delta") c.delta = to_double(val, key, line);
  else if (key == "data.family") c.data.family = val;
  else if (key == "data.a") c.data.a = to_double(val, key, line);
  else if (key == "data.sigma") c.data.sigma = to_double(val, key, line);
  else if (key == "data.lambda") c.data.lambda = to_double(val, key, line);
  else if (key == "data.theta") c.data.theta = to_double(val, key, line);
  else if (key == "data.r0") c.data.r0 = to_double(val, key, line);
  else if (key == "data.seed") c.data.seed = to_u64(val, key, line);
  else if (key == "data.target") c.data.target = to_double(val, key, line);
  else if (key == "analysis.virial") c.analysis.virial = to_bool(val, key, line);
  else if (key == "analysis.virial_m") c.analysis.virial_m = to_list(val, key, line);
  else if (key == "analysis.concentration") c.analysis.concentration = to_bool(val, key, line);
  else if (key == "analysis.eta1") c.analysis.eta1 = to_double(val, key, line);
  else if (key == "analysis.Ctilde1") c.analysis.Ctilde1 = to_double(val, key, line);
  else if (key == "analysis.c_prime") c.analysis.c_prime = to_double(val, key, line);
  else if (key == "analysis.C_prime") c.analysis.C_prime = to_double(val, key, line);
  else if (key == "analysis.tower_eta") c.analysis.tower_eta = to_double(val, key, line);
  else if (key == "analysis.scattering") c.analysis.scattering = to_bool(val, key, line);
  else if (key == "analysis.scatter_tol") c.analysis.scatter_tol = to_double(val, key, line);
  else if (key == "out_dir") c.out_dir = val;
  else if (key == "seed") c.seed = to_u64(val, key, line);
  else return false;
  return true;
}
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = raw;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + s + "'");
    std::string key = detail::trim(s.substr(0, eq));
    std::string val = detail::trim(s.substr(eq + 1));
    if (!detail::apply_key(c, key, val, line))
      throw ConfigError(detail::where(key, line) + ": unknown key");
  }
  c.sync_and_validate();
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// canonical form: fixed key order, all defaults explicit, 17 significant digits
inline std::string serialize_config(const RunConfig& c) {
  std::string s;
  auto put = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  auto putd = [&](const std::string& k, double v) { put(k, fmt_g17(v)); };
  auto putb = [&](const std::string& k, bool v) { put(k, v ? "true" : "false"); };
  put("grid.n", std::to_string(c.grid.n));
  putd("grid.r_max", c.grid.r_max);
  put("grid.num_modes", std::to_string(c.grid.num_modes));
  putd("nonlinearity.gamma", c.evolution.nl.gamma);
  putd("evolution.dt", c.evolution.dt);
  putd("evolution.t_end", c.evolution.t_end);
  put("evolution.snapshot_stride", std::to_string(c.evolution.snapshot_stride));
  putd("evolution.amplitude_cap_factor", c.evolution.amplitude_cap_factor);
  putd("evolution.kinetic_cap_factor", c.evolution.kinetic_cap_factor);
  putd("evolution.boundary_shell_fraction", c.evolution.boundary_shell_fraction);
  putb("evolution.linear_only", c.evolution.linear_only);
  putd("evolution.k_report", c.evolution.k_report);
  putd("thresholds.k", c.thresholds.k);
  putd("thresholds.c_breve", c.thresholds.c_breve);
  putd("thresholds.C_breve", c.thresholds.C_breve);
  putd("thresholds.C_a", c.thresholds.C_a);
  putd("delta", c.delta);
  put("data.family", c.data.family);
  putd("data.a", c.data.a);
  putd("data.sigma", c.data.sigma);
  putd("data.lambda", c.data.lambda);
  putd("data.theta", c.data.theta);
  putd("data.r0", c.data.r0);
  put("data.seed", std::to_string(c.data.seed));
  putd("data.target", c.data.target);
  putb("analysis.virial", c.analysis.virial);
  put("analysis.virial_m", detail::list_str(c.analysis.virial_m));
  putb("analysis.concentration", c.analysis.concentration);
  putd("analysis.eta1", c.analysis.eta1);
  putd("analysis.Ctilde1", c.analysis.Ctilde1);
  putd("analysis.c_prime", c.analysis.c_prime);
  putd("analysis.C_prime", c.analysis.C_prime);
  putd("analysis.tower_eta", c.analysis.tower_eta);
  putb("analysis.scattering", c.analysis.scattering);
  putd("analysis.scatter_tol", c.analysis.scatter_tol);
  put("out_dir", c.out_dir);
  put("seed", std::to_string(c.seed));
  return s;
}

// single-line rendering for file headers
inline std::string config_summary(const RunConfig& c) {
  std::string s = serialize_config(c);
  for (char& ch : s)
    if (ch == '\n') ch = ';';
  if (!s.empty() && s.back() == ';') s.pop_back();
  return s;
}

}
