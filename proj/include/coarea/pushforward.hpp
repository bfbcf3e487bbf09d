#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coarea/error.hpp"
#include "coarea/numerics.hpp"
#include "coarea/phase.hpp"
#include "coarea/qmc.hpp"

namespace coarea {

/// Data on a domain: a pointwise function, optionally with the radial profile
/// G such that h(x) = G(|x|). The profile enables exact fiber integrals for
/// radial phases.
struct Field {
  std::function<double(std::span<const double>)> pointwise;
  std::function<double(double)> radial;
  bool is_zero = false;
  bool is_one = false;

  double operator()(std::span<const double> x) const { return pointwise(x); }

  static Field constant(double c) {
    Field f;
    f.pointwise = [c](std::span<const double>) { return c; };
    f.radial = [c](double) { return c; };
    f.is_zero = c == 0.0;
    f.is_one = c == 1.0;
    return f;
  }
  static Field one() { return constant(1.0); }
  static Field zero() { return constant(0.0); }

  static Field of(std::function<double(std::span<const double>)> fn) {
    Field f;
    f.pointwise = std::move(fn);
    return f;
  }

  static Field radial_profile(std::function<double(double)> G) {
    Field f;
    f.radial = G;
    f.pointwise = [G](std::span<const double> x) { return G(norm2(x)); };
    return f;
  }

  /// Pointwise map v -> op(v), preserving radial structure.
  template <class Op>
  Field map(Op op) const {
    Field f;
    auto p = pointwise;
    f.pointwise = [p, op](std::span<const double> x) { return op(p(x)); };
    if (radial) {
      auto g = radial;
      f.radial = [g, op](double r) { return op(g(r)); };
    }
    f.is_zero = is_zero && op(0.0) == 0.0;
    return f;
  }

  Field abs_pow(double r) const {
    return map([r](double v) { return std::pow(std::abs(v), r); });
  }
};

// ---------------------------------------------------------------------------
// Level grids and density estimates

struct LevelGrid {
  double t_min = 0.0;
  double t_max = 1.0;
  std::size_t bin_count = 1;

  LevelGrid() = default;
  LevelGrid(double lo, double hi, std::size_t bins) : t_min(lo), t_max(hi), bin_count(bins) {
    require(t_min < t_max, Errc::invalid_argument, "level grid needs t_min < t_max");
    require(bin_count >= 1, Errc::invalid_argument, "level grid needs at least one bin");
  }

  double width() const { return (t_max - t_min) / static_cast<double>(bin_count); }
  double edge(std::size_t i) const {
    return i == bin_count ? t_max : t_min + width() * static_cast<double>(i);
  }
  double center(std::size_t i) const { return 0.5 * (edge(i) + edge(i + 1)); }

  /// Bin containing t, or nullopt when outside [t_min, t_max).
  std::optional<std::size_t> bin_of(double t) const {
    if (!(t >= t_min && t < t_max)) return std::nullopt;
    auto i = static_cast<std::size_t>((t - t_min) / width());
    return std::min(i, bin_count - 1);
  }
};

enum class Method { ClosedForm, Coarea, MonteCarlo };

constexpr std::string_view method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::Coarea: return "coarea";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

struct DensityEstimate {
  LevelGrid grid;
  std::vector<double> values;
  std::vector<double> stderr;  // zeros unless Monte Carlo
  Method method = Method::ClosedForm;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  bool atom_suspected = false;
  std::string phase;

  double mass() const {
    double m = 0.0;
    for (double v : values) m += v * grid.width();
    return m;
  }
  /// Standard error of mass(); bins are treated as independent.
  double mass_stderr() const {
    double s = 0.0;
    for (double e : stderr) s += e * e * grid.width() * grid.width();
    return std::sqrt(s);
  }
};

// ---------------------------------------------------------------------------
// Radial structure of a phase: theta(x) = Phi(|x|) on balls.

struct RadialLevel {
  double r = 0.0;      // radius carrying the level
  double dphi = 0.0;   // |Phi'(r)|
};

inline std::optional<RadialLevel> radial_level(const Phase& phase, double t) {
  if (!phase.domain().is_ball()) return std::nullopt;
  const double R = phase.domain().radius();
  if (phase.is<kind::RadialPower>()) {
    const double g = phase.as<kind::RadialPower>().gamma;
    const double r = std::pow(t, 1.0 / g);
    return RadialLevel{r, g * std::pow(r, g - 1.0)};
  }
  if (phase.is<kind::RadialQuadratic>()) {
    const double r = std::sqrt(t);
    return RadialLevel{r, 2.0 * r};
  }
  if (phase.is<kind::BoundaryDistanceReparam>()) {
    const auto& H = phase.as<kind::BoundaryDistanceReparam>().H;
    const double s = H.inverse(t);
    return RadialLevel{R - s, std::abs(H.derivative(s))};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Closed forms

/// Exact pushforward density; +infinity where the formula diverges at a
/// critical value, 0 outside the image.
inline double density_closed_form(const Phase& phase, double t) {
  const auto& dom = phase.domain();
  const int n = dom.dimension();
  const auto img = phase.image();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (phase.is<kind::Linear>()) {
    const int axis = phase.as<kind::Linear>().axis;
    if (dom.is_ball()) {
      const double R = dom.radius();
      if (std::abs(t) >= R) return 0.0;
      return unit_ball_volume(n - 1) * std::pow(R * R - t * t, 0.5 * (n - 1));
    }
    if (!img.contains(t)) return 0.0;
    double v = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != axis) v *= dom.axis_bounds(i).length();
    return v;
  }
  if (phase.is<kind::Oscillatory>() || phase.is<kind::Constant>() || phase.is<kind::BoundaryDistanceReparam>())
    fail(Errc::no_closed_form, "no closed-form density for phase " + phase.name());
  require(dom.is_ball(), Errc::no_closed_form, "closed forms are catalogued on ball domains only");
  const double R = dom.radius();
  if (phase.is<kind::RadialQuadratic>()) {
    if (t < 0.0 || t > R * R) return 0.0;
    if (t == 0.0) return n == 1 ? inf : (n == 2 ? pi : 0.0);
    return 0.5 * unit_sphere_area(n) * std::pow(t, 0.5 * (n - 2));
  }
  if (phase.is<kind::RadialPower>()) {
    const double g = phase.as<kind::RadialPower>().gamma;
    if (t < 0.0 || t > std::pow(R, g)) return 0.0;
    const double e = (n - g) / g;
    if (t == 0.0) return e < 0.0 ? inf : (e == 0.0 ? unit_sphere_area(n) / g : 0.0);
    return unit_sphere_area(n) / g * std::pow(t, e);
  }
  // Saddle on the disk of radius R.
  const double a = std::abs(t);
  if (a > R * R) return 0.0;
  if (a == 0.0) return inf;
  return 2.0 * std::asinh(std::sqrt((R * R - a) / (2.0 * a)));
}

inline bool has_closed_form(const Phase& phase) {
  if (phase.is<kind::Linear>()) return true;
  if (!phase.domain().is_ball()) return false;
  return phase.is<kind::RadialQuadratic>() || phase.is<kind::RadialPower>() || phase.is<kind::Saddle2D>();
}

inline bool has_parametrization(const Phase& phase) {
  if (phase.is<kind::Linear>()) return true;
  if (phase.is<kind::Oscillatory>() || phase.is<kind::Constant>()) return false;
  return phase.domain().is_ball();
}

// ---------------------------------------------------------------------------
// Fiber quadrature

namespace detail {

struct WeightedNodes {
  std::vector<double> points;  // flattened, stride = dim
  std::vector<double> weights;
  std::size_t dim = 0;
  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const { return {points.data() + i * dim, dim}; }
};

inline std::size_t nodes_per_axis(std::size_t total, int fiber_dim) {
  if (fiber_dim <= 1) return std::max<std::size_t>(2, total);
  const double m = std::pow(static_cast<double>(total), 1.0 / fiber_dim);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(m)));
}

/// Product midpoint rule on the unit sphere S^k in R^{k+1} in hyperspherical
/// angles; weights rescaled so constants integrate exactly.
inline WeightedNodes sphere_nodes(int k, std::size_t m) {
  WeightedNodes q;
  q.dim = static_cast<std::size_t>(k + 1);
  if (k == 0) {
    q.points = {1.0, -1.0};
    q.weights = {1.0, 1.0};
    return q;
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  std::vector<double> x(q.dim);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    double sprod = 1.0;
    for (int j = 0; j < k; ++j) {
      const bool last = j == k - 1;
      const double range = last ? 2.0 * pi : pi;
      const double ang = range * (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5) / static_cast<double>(m);
      w *= range / static_cast<double>(m);
      if (!last) w *= std::pow(std::sin(ang), k - 1 - j);
      x[static_cast<std::size_t>(j)] = sprod * std::cos(ang);
      sprod *= std::sin(ang);
      if (last) x[static_cast<std::size_t>(k)] = sprod;
    }
    q.points.insert(q.points.end(), x.begin(), x.end());
    q.weights.push_back(w);
    total += w;
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == m) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  const double scale = unit_sphere_area(k + 1) / total;
  for (auto& w : q.weights) w *= scale;
  return q;
}

/// Midpoint rule on the ball of radius rho in R^d, exact for constants.
inline WeightedNodes ball_nodes(int d, double rho, std::size_t total) {
  WeightedNodes q;
  q.dim = static_cast<std::size_t>(d);
  if (d == 0) {
    q.weights = {1.0};
    return q;
  }
  const std::size_t m = nodes_per_axis(total, d);
  if (d == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      q.points.push_back(-rho + 2.0 * rho * (static_cast<double>(i) + 0.5) / static_cast<double>(m));
      q.weights.push_back(2.0 * rho / static_cast<double>(m));
    }
    return q;
  }
  const auto sph = sphere_nodes(d - 1, m);
  std::vector<double> rw(m), rr(m);
  double rsum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    rr[i] = rho * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    rw[i] = std::pow(rr[i], d - 1) * rho / static_cast<double>(m);
    rsum += rw[i];
  }
  const double rscale = std::pow(rho, d) / d / rsum;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t s = 0; s < sph.size(); ++s) {
      auto p = sph.point(s);
      for (double c : p) q.points.push_back(rr[i] * c);
      q.weights.push_back(rw[i] * rscale * sph.weights[s]);
    }
  }
  return q;
}

inline void check_regular_level(const Phase& phase, double t) {
  if (phase.distance_to_critical(t) < 1e-9)
    fail(Errc::critical_value, "level " + std::to_string(t) + " is within 1e-9 of a critical value");
}

}  // namespace detail

/// Fiber integral  int_{Sigma_t} h / |grad theta| dH^{n-1}  by composite
/// midpoint quadrature on the catalog parametrization of the fiber.
inline double fiber_integral(const Phase& phase, const Field& h, double t, std::size_t fiber_nodes = 4096) {
  require(fiber_nodes >= 2, Errc::invalid_argument, "fiber_nodes must be >= 2");
  require(has_parametrization(phase), Errc::no_parametrization,
          "no fiber parametrization for phase " + phase.name() + " on " + phase.domain().describe());
  detail::check_regular_level(phase, t);
  const auto img = phase.image();
  if (!(t >= img.lo && t <= img.hi)) return 0.0;
  if (h.is_zero) return 0.0;
  const auto& dom = phase.domain();
  const int n = dom.dimension();

  if (phase.is<kind::Linear>()) {
    const int axis = phase.as<kind::Linear>().axis;
    std::vector<double> x(static_cast<std::size_t>(n));
    auto embed = [&](std::span<const double> y) {
      std::size_t k = 0;
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i == axis ? t : y[k++];
    };
    double sum = 0.0;
    if (dom.is_ball()) {
      const double R = dom.radius();
      if (std::abs(t) >= R) return 0.0;
      const auto q = detail::ball_nodes(n - 1, std::sqrt(R * R - t * t), fiber_nodes);
      for (std::size_t i = 0; i < q.size(); ++i) {
        embed(q.point(i));
        sum += q.weights[i] * h(x);
      }
      return sum;
    }
    // Box cross-section: tensor midpoint.
    const std::size_t m = detail::nodes_per_axis(fiber_nodes, n - 1);
    std::vector<std::size_t> idx(static_cast<std::size_t>(std::max(0, n - 1)), 0);
    double cell = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != axis) cell *= dom.axis_bounds(i).length() / static_cast<double>(m);
    while (true) {
      std::size_t k = 0;
      for (int i = 0; i < n; ++i) {
        if (i == axis) {
          x[static_cast<std::size_t>(i)] = t;
          continue;
        }
        const auto b = dom.axis_bounds(i);
        x[static_cast<std::size_t>(i)] = b.lo + b.length() * (static_cast<double>(idx[k++]) + 0.5) / static_cast<double>(m);
      }
      sum += cell * h(x);
      std::size_t j = 0;
      while (j < idx.size() && ++idx[j] == m) idx[j++] = 0;
      if (j == idx.size()) break;
    }
    return sum;
  }

  if (auto rl = radial_level(phase, t)) {
    const double r = rl->r;
    if (r <= 0.0) return 0.0;
    const double factor = std::pow(r, n - 1) / rl->dphi;
    if (h.radial) return unit_sphere_area(n) * factor * h.radial(r);
    const auto q = detail::sphere_nodes(n - 1, detail::nodes_per_axis(fiber_nodes, n - 1));
    std::vector<double> x(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      auto p = q.point(i);
      for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = r * p[static_cast<std::size_t>(k)];
      sum += q.weights[i] * h(x);
    }
    return factor * sum;
  }

  // Saddle on a disk: two hyperbola branches per sign of t, parametrized by
  // the coordinate along which the branch is a graph.
  const double R = dom.radius();
  const double a = std::abs(t);
  const double Y = std::sqrt(std::max(0.0, (R * R - a) / 2.0));
  const std::size_t m = fiber_nodes;
  double sum = 0.0;
  double x[2];
  for (std::size_t i = 0; i < m; ++i) {
    const double u = -Y + 2.0 * Y * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double v = std::sqrt(a + u * u);
    const double w = 2.0 * Y / static_cast<double>(m) / (2.0 * v);
    for (double sgn : {1.0, -1.0}) {
      if (t > 0.0) {
        x[0] = sgn * v;
        x[1] = u;
      } else {
        x[0] = u;
        x[1] = sgn * v;
      }
      sum += w * h(x);
    }
  }
  return sum;
}

inline double density_coarea(const Phase& phase, double t, std::size_t fiber_nodes = 4096) {
  return fiber_integral(phase, Field::one(), t, fiber_nodes);
}

/// w_{theta,h}(t) = (A_theta h)(t) on the coarea path.
inline double weighted_density_coarea(const Phase& phase, const Field& h, double t, std::size_t fiber_nodes = 4096) {
  return fiber_integral(phase, h, t, fiber_nodes);
}

/// M_theta f(t) = (w_{theta,|f|^r}(t))^{1/r}.
inline double fiber_norm(const Phase& phase, const Field& f, double r, double t, std::size_t fiber_nodes = 4096) {
  require(r >= 1.0, Errc::invalid_argument, "fiber norm exponent must be >= 1");
  if (f.is_zero) return 0.0;
  return std::pow(fiber_integral(phase, f.abs_pow(r), t, fiber_nodes), 1.0 / r);
}

/// Normalized fiber average with the zero convention when w in {0, inf}.
inline double normalized_average(const Phase& phase, const Field& f, double t, std::size_t fiber_nodes = 4096) {
  const double w = density_coarea(phase, t, fiber_nodes);
  if (w == 0.0 || !std::isfinite(w)) return 0.0;
  return fiber_integral(phase, f, t, fiber_nodes) / w;
}

// ---------------------------------------------------------------------------
// Level-space integration helpers

/// Integrates g over [lo, hi] subdivided into `pieces` parts, with tanh-sinh
/// on parts touching critical values or image endpoints.
template <class G>
double integrate_levels(const Phase& phase, G&& g, double lo, double hi, int pieces = 16) {
  if (!(hi > lo)) return 0.0;
  const auto img = phase.image();
  lo = std::max(lo, img.lo);
  hi = std::min(hi, img.hi);
  if (!(hi > lo)) return 0.0;
  std::vector<double> sing = phase.critical_values();
  sing.push_back(img.lo);
  sing.push_back(img.hi);
  std::vector<double> cuts;
  for (int i = 0; i <= pieces; ++i) cuts.push_back(lo + (hi - lo) * i / pieces);
  for (double v : sing)
    if (v > lo && v < hi) cuts.push_back(v);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto singular = [&](double x) {
    return std::any_of(sing.begin(), sing.end(), [&](double v) { return std::abs(v - x) <= 1e-14 * (1 + std::abs(v)); });
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    total += (singular(a) || singular(b)) ? integrate_tanh_sinh(g, a, b) : integrate_gauss(g, a, b, 8);
  }
  return total;
}

/// Bin averages of a level function over a grid.
template <class G>
std::vector<double> bin_averages(const Phase& phase, const LevelGrid& grid, G&& g) {
  std::vector<double> out(grid.bin_count);
  parallel_for(grid.bin_count, [&](std::size_t i) {
    out[i] = integrate_levels(phase, g, grid.edge(i), grid.edge(i + 1), 1) / grid.width();
  });
  return out;
}

inline DensityEstimate density_grid_closed_form(const Phase& phase, const LevelGrid& grid) {
  DensityEstimate d;
  d.grid = grid;
  d.method = Method::ClosedForm;
  d.phase = phase.name();
  d.values = bin_averages(phase, grid, [&](double t) { return density_closed_form(phase, t); });
  d.stderr.assign(grid.bin_count, 0.0);
  return d;
}

inline DensityEstimate weighted_density_grid_coarea(const Phase& phase, const Field& h, const LevelGrid& grid,
                                                    std::size_t fiber_nodes = 1024) {
  DensityEstimate d;
  d.grid = grid;
  d.method = Method::Coarea;
  d.phase = phase.name();
  d.values = bin_averages(phase, grid, [&](double t) {
    if (phase.distance_to_critical(t) < 1e-9) return 0.0;  // measure-zero node
    return fiber_integral(phase, h, t, fiber_nodes);
  });
  d.stderr.assign(grid.bin_count, 0.0);
  return d;
}

inline DensityEstimate density_grid_coarea(const Phase& phase, const LevelGrid& grid, std::size_t fiber_nodes = 1024) {
  return weighted_density_grid_coarea(phase, Field::one(), grid, fiber_nodes);
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Flags an atom when some window of width 1e-3 * range holds more than half
/// of the sampled levels.
inline bool detect_atom(std::vector<double> levels, double range) {
  if (levels.empty()) return false;
  std::sort(levels.begin(), levels.end());
  const double width = 1e-3 * range;
  const std::size_t need = levels.size() / 2 + 1;
  for (std::size_t i = 0, j = 0; i < levels.size(); ++i) {
    while (levels[i] - levels[j] > width) ++j;
    if (i - j + 1 >= need) return true;
  }
  return false;
}

/// Histogram estimate of w_{theta,h} from uniform quasi-random samples.
/// sample_count counts accepted points; values = |Omega|/(N*width) * sum of h
/// over samples in the bin; stderr is the per-bin sampling standard error
/// (binomial when h = 1).
inline DensityEstimate weighted_density_monte_carlo(const Phase& phase, const Field& h, const LevelGrid& grid,
                                                    std::size_t sample_count, std::uint64_t seed) {
  require(sample_count >= 1, Errc::invalid_argument, "sample_count must be >= 1");
  const auto& dom = phase.domain();
  DomainSampler sampler(dom, seed);
  const std::size_t B = grid.bin_count;
  std::vector<double> s1(B, 0.0), s2(B, 0.0);
  std::vector<double> levels;
  levels.reserve(sample_count);
  std::vector<double> x(static_cast<std::size_t>(dom.dimension()));
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < sample_count; ++idx) {
    if (!sampler.candidate(idx, x)) continue;
    ++k;
    const double t = phase.value_unchecked(x);
    levels.push_back(t);
    if (auto b = grid.bin_of(t)) {
      const double v = h.is_one ? 1.0 : h(x);
      s1[*b] += v;
      s2[*b] += v * v;
    }
  }
  DensityEstimate d;
  d.grid = grid;
  d.method = Method::MonteCarlo;
  d.sample_count = sample_count;
  d.seed = seed;
  d.phase = phase.name();
  d.values.resize(B);
  d.stderr.resize(B);
  const double N = static_cast<double>(sample_count);
  const double scale = dom.volume() / grid.width();
  for (std::size_t b = 0; b < B; ++b) {
    const double m1 = s1[b] / N;
    const double m2 = s2[b] / N;
    d.values[b] = scale * m1;
    d.stderr[b] = scale * std::sqrt(std::max(0.0, m2 - m1 * m1) / N);
  }
  d.atom_suspected = detect_atom(std::move(levels), grid.t_max - grid.t_min);
  return d;
}

inline DensityEstimate density_monte_carlo(const Phase& phase, const LevelGrid& grid, std::size_t sample_count,
                                           std::uint64_t seed) {
  return weighted_density_monte_carlo(phase, Field::one(), grid, sample_count, seed);
}

/// Unified entry point for the weighted density at a single level.
inline double weighted_density(const Phase& phase, const Field& h, double t, Method method,
                               std::size_t fiber_nodes = 4096) {
  switch (method) {
    case Method::ClosedForm:
      require(h.is_one, Errc::no_closed_form, "closed forms exist for the unweighted density only");
      return density_closed_form(phase, t);
    case Method::Coarea:
      return fiber_integral(phase, h, t, fiber_nodes);
    case Method::MonteCarlo:
      break;
  }
  fail(Errc::invalid_argument, "pointwise Monte Carlo density is not defined; use a LevelGrid");
}

inline DensityEstimate weighted_density(const Phase& phase, const Field& h, const LevelGrid& grid, Method method,
                                        std::size_t budget, std::uint64_t seed = 0) {
  switch (method) {
    case Method::ClosedForm: {
      require(h.is_one, Errc::no_closed_form, "closed forms exist for the unweighted density only");
      return density_grid_closed_form(phase, grid);
    }
    case Method::Coarea:
      return weighted_density_grid_coarea(phase, h, grid, budget);
    case Method::MonteCarlo:
      return weighted_density_monte_carlo(phase, h, grid, budget, seed);
  }
  fail(Errc::invalid_argument, "unknown method");
}

}  // namespace coarea
