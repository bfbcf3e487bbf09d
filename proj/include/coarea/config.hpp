#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "coarea/error.hpp"
#include "coarea/phase.hpp"

namespace coarea {

/// Plain-text key-value configuration ("key = value" per line, '#' comments).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  explicit KeyValueConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto key_end = line.find('=');
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      require(key_end != std::string::npos, Errc::config_invalid,
              "line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, key_end));
      const std::string val = trim(line.substr(key_end + 1));
      require(!key.empty() && !val.empty(), Errc::config_invalid, "line " + std::to_string(lineno) + ": empty key or value");
      require(!c.values_.count(key), Errc::config_invalid, "duplicate key " + key);
      c.values_[key] = val;
    }
    return c;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), Errc::config_invalid, "cannot open config file " + path);
    return parse(in);
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Rejects keys outside `allowed`.
  void check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_) require(allowed.count(k) > 0, Errc::config_invalid, "unknown config key " + k);
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      require(used == it->second.size(), Errc::config_invalid, "trailing characters in " + key);
      return v;
    } catch (const std::logic_error&) {
      fail(Errc::config_invalid, "not a number: " + key + " = " + it->second);
    }
  }

  double positive(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    require(v > 0.0, Errc::config_invalid, key + " must be positive");
    return v;
  }

  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    require(v == std::floor(v), Errc::config_invalid, key + " must be an integer");
    return static_cast<int>(v);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto z = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, z - a + 1);
  }

  std::map<std::string, std::string> values_;
};

inline const std::set<std::string>& phase_config_keys() {
  static const std::set<std::string> keys{"phase.kind", "phase.gamma", "phase.a",   "phase.N",  "phase.axis",
                                          "domain.shape", "domain.n", "domain.R", "domain.lo", "domain.hi"};
  return keys;
}

inline Domain domain_from_config(const KeyValueConfig& c) {
  const std::string shape = c.get("domain.shape", "ball");
  const int n = c.integer("domain.n", 2);
  require(n >= 1, Errc::config_invalid, "domain.n must be >= 1");
  if (shape == "ball") return Domain::ball(n, c.positive("domain.R", 1.0));
  require(shape == "box", Errc::config_invalid, "domain.shape must be ball or box");
  const double lo = c.number("domain.lo", -1.0);
  const double hi = c.number("domain.hi", 1.0);
  require(lo < hi, Errc::config_invalid, "domain.lo must be below domain.hi");
  return Domain::box(std::vector<Interval>(static_cast<std::size_t>(n), Interval{lo, hi}));
}

/// Builds a catalog phase from phase.* and domain.* keys. Boundary-distance
/// phases are programmatic only (their profile is tabulated).
inline Phase phase_from_config(const KeyValueConfig& c) {
  require(c.has("phase.kind"), Errc::config_invalid, "missing phase.kind");
  const std::string k = c.get("phase.kind", "");
  auto D = domain_from_config(c);
  try {
    if (k == "linear") return Phase::linear(D, c.integer("phase.axis", 0));
    if (k == "radial-power") return Phase::radial_power(D, c.number("phase.gamma", 2.0));
    if (k == "radial-quadratic") return Phase::radial_quadratic(D);
    if (k == "saddle") return Phase::saddle(D);
    if (k == "oscillatory") return Phase::oscillatory(D, c.number("phase.a", 0.5), c.number("phase.N", 10.0));
    if (k == "constant") return Phase::constant(D, c.number("phase.a", 0.0));
  } catch (const Error& e) {
    if (e.code() == Errc::config_invalid) throw;
    fail(Errc::config_invalid, e.what());
  }
  fail(Errc::config_invalid, "unknown phase.kind " + k);
}

}  // namespace coarea
