#ifndef CONTACT_WKAM_CONFIG_HPP
#define CONTACT_WKAM_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contact_wkam/model.hpp"

namespace wkam {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain key=value configuration with dotted section keys, e.g.
/// `hamiltonian.lambda = 0.5`. Lines starting with `#` are comments.
struct KeyValueConfig {
  std::map<std::string, std::string> entries;

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      c.entries[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number: " + it->second);
    }
  }

  int get_int(const std::string& key, int fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
      std::size_t pos = 0;
      const int v = std::stoi(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not an integer: " + it->second);
    }
  }

  /// FNV-1a hash of the canonical (sorted) key=value listing; stamped into
  /// CSV headers so outputs are traceable to their configuration.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](const std::string& s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
    };
    for (const auto& [k, v] : entries) {
      feed(k);
      feed("=");
      feed(v);
      feed("\n");
    }
    return h;
  }
};

/// Fully resolved run parameters.
struct RunConfig {
  HamiltonianModel model;
  CircleDomain domain;
  double dt{0.01};
  double t_max{50.0};
  double window{2.0};
  double v_max{6.0};
  double tol_fix{1e-4};
  double tol_limit{1e-3};
  double tol_diamond{5e-3};
  std::vector<std::string> seeds{"zero"};
  std::string output_dir{"."};
  std::uint64_t config_hash{0};

  static RunConfig from_config(const KeyValueConfig& kv) {
    RunConfig rc;
    const std::string kind = kv.get_string("hamiltonian.kind", "example-E");
    const double lambda = kv.get_double("hamiltonian.lambda", 1.0);
    if (kind == "example-E") {
      const std::string drift = kv.get_string("hamiltonian.drift", "sin");
      if (drift != "sin")
        throw ConfigError("hamiltonian.drift: only 'sin' is built in, got " + drift);
      rc.model = HamiltonianModel::example_e(lambda);
    } else {
      throw ConfigError("hamiltonian.kind: unknown kind '" + kind +
                        "' (custom models are constructed programmatically)");
    }
    rc.model.tol_legendre = kv.get_double("hamiltonian.tol_legendre", rc.model.tol_legendre);
    rc.model.h_fd = kv.get_double("hamiltonian.h_fd", rc.model.h_fd);
    rc.domain = CircleDomain(kv.get_double("domain.circumference", two_pi),
                             kv.get_int("domain.n_points", 512));
    rc.dt = kv.get_double("numerics.dt", 0.01);
    rc.t_max = kv.get_double("numerics.t_max", 50.0);
    rc.window = kv.get_double("numerics.window", 2.0);
    rc.v_max = kv.get_double("numerics.v_max", 6.0);
    rc.tol_fix = kv.get_double("numerics.tol_fix", 1e-4);
    rc.tol_limit = kv.get_double("numerics.tol_limit", 1e-3);
    rc.tol_diamond = kv.get_double("numerics.tol_diamond", 5.0 * rc.tol_limit);
    if (!(rc.dt > 0.0) || !(rc.dt * lambda < 0.5))
      throw ConfigError("numerics.dt: need 0 < dt and dt*lambda < 0.5");
    if (kv.has("seeds")) {
      rc.seeds.clear();
      std::istringstream ss(kv.get_string("seeds", "zero"));
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        const auto a = tok.find_first_not_of(" \t");
        const auto b = tok.find_last_not_of(" \t");
        if (a != std::string::npos) rc.seeds.push_back(tok.substr(a, b - a + 1));
      }
      if (rc.seeds.empty()) throw ConfigError("seeds: empty list");
    }
    rc.output_dir = kv.get_string("output.dir", ".");
    rc.config_hash = kv.hash();
    return rc;
  }
};

}  // namespace wkam

#endif
