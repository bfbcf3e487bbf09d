#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "coarea/error.hpp"
#include "coarea/kernel.hpp"
#include "coarea/pushforward.hpp"
#include "coarea/reduction.hpp"
#include "coarea/sparse.hpp"

namespace coarea {

using json = nlohmann::ordered_json;

/// Round-trip formatting of doubles.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_density_csv(std::ostream& os, const DensityEstimate& d) {
  os << "t_lo,t_hi,value,stderr,method\n";
  for (std::size_t i = 0; i < d.grid.bin_count; ++i) {
    os << fmt(d.grid.edge(i)) << ',' << fmt(d.grid.edge(i + 1)) << ',' << fmt(d.values[i]) << ','
       << fmt(d.stderr.empty() ? 0.0 : d.stderr[i]) << ',' << method_name(d.method) << '\n';
  }
}

inline json density_json(const DensityEstimate& d) {
  json bins = json::array();
  for (std::size_t i = 0; i < d.grid.bin_count; ++i)
    bins.push_back({{"t_lo", d.grid.edge(i)},
                    {"t_hi", d.grid.edge(i + 1)},
                    {"value", d.values[i]},
                    {"stderr", d.stderr.empty() ? 0.0 : d.stderr[i]},
                    {"method", method_name(d.method)}});
  return {{"phase", d.phase},
          {"method", method_name(d.method)},
          {"seed", d.seed},
          {"sample_count", d.sample_count},
          {"atom_suspected", d.atom_suspected},
          {"bins", bins}};
}

inline void write_grid_csv(std::ostream& os, const GridFunction1D& F) {
  os << "t,re,im\n";
  for (std::size_t i = 0; i < F.size(); ++i) os << fmt(F.node(i)) << ',' << fmt(F[i].real()) << ',' << fmt(F[i].imag()) << '\n';
}

inline json sparse_family_json(const SparseFamily& f) {
  json members = json::array();
  for (const auto& I : f.members) members.push_back({I.generation, I.index});
  return {{"members", members},
          {"eta", f.eta},
          {"lambda", f.lambda},
          {"depth", f.depth},
          {"depth_exhausted", f.depth_exhausted}};
}

inline json complex_json(cdouble z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json reduction_report_json(const ReductionReport& r) {
  return {{"lhs", complex_json(r.lhs.value)},
          {"lhs_stderr", r.lhs.stderr},
          {"rhs", complex_json(r.rhs.value)},
          {"rhs_coarse", complex_json(r.rhs.coarse)},
          {"rhs_discretization", r.rhs.discretization},
          {"abs_discrepancy", r.abs_discrepancy},
          {"relative_discrepancy", r.relative_discrepancy},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"lhs_samples", r.lhs_budget.sample_count},
          {"lhs_replicates", r.lhs_budget.replicates},
          {"seed", r.lhs_budget.seed},
          {"bins_x", r.rhs_budget.bins_x},
          {"bins_y", r.rhs_budget.bins_y},
          {"density_method", method_name(r.rhs_budget.method)}};
}

// ---------------------------------------------------------------------------
// Baseline file: "name = value" lines, '#' comments.

using Baseline = std::map<std::string, double>;

inline Baseline read_baseline(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::config_invalid, "cannot open baseline file " + path);
  Baseline b;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto z = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, z - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    require(!key.empty() && !val.empty(), Errc::config_invalid, "malformed baseline line: " + line);
    b[key] = std::stod(val);
  }
  return b;
}

inline void write_baseline(const std::string& path, const Baseline& b, const std::string& header = {}) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::config_invalid, "cannot write baseline file " + path);
  if (!header.empty()) out << "# " << header << '\n';
  for (const auto& [k, v] : b) out << k << " = " << fmt(v) << '\n';
}

}  // namespace coarea
