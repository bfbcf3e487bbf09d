#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "coarea/error.hpp"
#include "coarea/numerics.hpp"
#include "coarea/qmc.hpp"

namespace coarea {

using Point = std::vector<double>;

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Domain

class Domain {
 public:
  enum class Shape { Ball, Box };

  static Domain ball(int n, double R) {
    require(n >= 1, Errc::invalid_argument, "domain dimension must be >= 1");
    require(R > 0.0, Errc::invalid_argument, "ball radius must be positive");
    Domain d;
    d.shape_ = Shape::Ball;
    d.n_ = n;
    d.R_ = R;
    return d;
  }

  static Domain box(std::vector<Interval> bounds) {
    require(!bounds.empty(), Errc::invalid_argument, "box needs at least one axis");
    for (const auto& b : bounds)
      require(b.lo < b.hi, Errc::invalid_argument, "box bounds must be strictly ordered");
    Domain d;
    d.shape_ = Shape::Box;
    d.n_ = static_cast<int>(bounds.size());
    d.bounds_ = std::move(bounds);
    return d;
  }

  Shape shape() const { return shape_; }
  bool is_ball() const { return shape_ == Shape::Ball; }
  int dimension() const { return n_; }
  double radius() const { return R_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  double volume() const {
    if (is_ball()) return unit_ball_volume(n_) * std::pow(R_, n_);
    double v = 1.0;
    for (const auto& b : bounds_) v *= b.length();
    return v;
  }

  Interval axis_bounds(int axis) const {
    if (is_ball()) return {-R_, R_};
    return bounds_[static_cast<std::size_t>(axis)];
  }

  double bounding_box_volume() const {
    double v = 1.0;
    for (int i = 0; i < n_; ++i) v *= axis_bounds(i).length();
    return v;
  }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) return false;
    if (is_ball()) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s <= R_ * R_;
    }
    for (int i = 0; i < n_; ++i) {
      const auto& b = bounds_[static_cast<std::size_t>(i)];
      if (x[static_cast<std::size_t>(i)] < b.lo || x[static_cast<std::size_t>(i)] > b.hi) return false;
    }
    return true;
  }

  std::string describe() const {
    if (is_ball()) return "ball(n=" + std::to_string(n_) + ",R=" + std::to_string(R_) + ")";
    return "box(n=" + std::to_string(n_) + ")";
  }

 private:
  Shape shape_ = Shape::Ball;
  int n_ = 1;
  double R_ = 1.0;
  std::vector<Interval> bounds_;
};

// ---------------------------------------------------------------------------
// Tabulated monotone profile with cubic Hermite interpolation.

class TabulatedProfile {
 public:
  TabulatedProfile() = default;
  TabulatedProfile(double s0, double step, std::vector<double> values, std::vector<double> slopes)
      : s0_(s0), step_(step), values_(std::move(values)), slopes_(std::move(slopes)) {
    require(step_ > 0.0 && values_.size() >= 2 && values_.size() == slopes_.size(), Errc::invalid_argument,
            "tabulated profile needs >= 2 nodes, matching slopes and positive step");
  }

  double s_min() const { return s0_; }
  double s_max() const { return s0_ + step_ * static_cast<double>(values_.size() - 1); }
  double step() const { return step_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }
  bool empty() const { return values_.empty(); }

  double operator()(double s) const { return eval(s).first; }
  double derivative(double s) const { return eval(s).second; }

  /// Inverse of a strictly increasing profile by bisection.
  double inverse(double h) const {
    require(!values_.empty(), Errc::invalid_argument, "empty profile");
    double lo = s_min();
    double hi = s_max();
    if (h <= values_.front()) return lo;
    if (h >= values_.back()) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((*this)(mid) < h) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::pair<double, double> eval(double s) const {
    require(!values_.empty(), Errc::invalid_argument, "empty profile");
    const double pos = std::clamp((s - s0_) / step_, 0.0, static_cast<double>(values_.size() - 1));
    std::size_t i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double u = pos - static_cast<double>(i);
    const double y0 = values_[i], y1 = values_[i + 1];
    const double m0 = slopes_[i] * step_, m1 = slopes_[i + 1] * step_;
    const double u2 = u * u, u3 = u2 * u;
    const double v = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    const double dv = (6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * y1 + (3 * u2 - 2 * u) * m1;
    return {v, dv / step_};
  }

  double s0_ = 0.0;
  double step_ = 1.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

// ---------------------------------------------------------------------------
// Phase catalog

namespace kind {
struct Linear {
  int axis = 0;
};
struct RadialPower {
  double gamma = 2.0;
};
struct RadialQuadratic {};
struct Saddle2D {};
struct Oscillatory {
  double a = 0.5;
  double N = 10.0;
};
/// theta(x) = H(dist(x, boundary)); ball domains only.
struct BoundaryDistanceReparam {
  TabulatedProfile H;
};
/// Degenerate test instance with an atomic pushforward.
struct Constant {
  double c = 0.0;
};
}  // namespace kind

using PhaseKind = std::variant<kind::Linear, kind::RadialPower, kind::RadialQuadratic, kind::Saddle2D,
                               kind::Oscillatory, kind::BoundaryDistanceReparam, kind::Constant>;

inline constexpr double gradient_singularity_radius = 1e-12;

class Phase {
 public:
  Phase(PhaseKind k, Domain d) : kind_(std::move(k)), domain_(std::move(d)) { validate(); }

  static Phase linear(Domain d, int axis = 0) { return Phase(kind::Linear{axis}, std::move(d)); }
  static Phase radial_power(Domain d, double gamma) { return Phase(kind::RadialPower{gamma}, std::move(d)); }
  static Phase radial_quadratic(Domain d) { return Phase(kind::RadialQuadratic{}, std::move(d)); }
  static Phase saddle(Domain d) { return Phase(kind::Saddle2D{}, std::move(d)); }
  static Phase oscillatory(Domain d, double a, double N) { return Phase(kind::Oscillatory{a, N}, std::move(d)); }
  static Phase boundary_distance(Domain d, TabulatedProfile H) {
    return Phase(kind::BoundaryDistanceReparam{std::move(H)}, std::move(d));
  }
  static Phase constant(Domain d, double c) { return Phase(kind::Constant{c}, std::move(d)); }

  const PhaseKind& kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }

  template <class K>
  bool is() const {
    return std::holds_alternative<K>(kind_);
  }
  template <class K>
  const K& as() const {
    return std::get<K>(kind_);
  }

  bool is_radial() const {
    return is<kind::RadialPower>() || is<kind::RadialQuadratic>() ||
           (is<kind::BoundaryDistanceReparam>() && domain_.is_ball());
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::Linear>) return "linear";
          else if constexpr (std::is_same_v<K, kind::RadialPower>) return "radial-power";
          else if constexpr (std::is_same_v<K, kind::RadialQuadratic>) return "radial-quadratic";
          else if constexpr (std::is_same_v<K, kind::Saddle2D>) return "saddle";
          else if constexpr (std::is_same_v<K, kind::Oscillatory>) return "oscillatory";
          else if constexpr (std::is_same_v<K, kind::BoundaryDistanceReparam>) return "boundary-distance";
          else return "constant";
        },
        kind_);
  }

  /// theta(x) without the domain check; used on hot sampling paths.
  double value_unchecked(std::span<const double> x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::Linear>) {
            return x[static_cast<std::size_t>(k.axis)];
          } else if constexpr (std::is_same_v<K, kind::RadialPower>) {
            return std::pow(norm2(x), k.gamma);
          } else if constexpr (std::is_same_v<K, kind::RadialQuadratic>) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
          } else if constexpr (std::is_same_v<K, kind::Saddle2D>) {
            return x[0] * x[0] - x[1] * x[1];
          } else if constexpr (std::is_same_v<K, kind::Oscillatory>) {
            return x[0] + k.a * std::sin(k.N * x[1]);
          } else if constexpr (std::is_same_v<K, kind::BoundaryDistanceReparam>) {
            return k.H(domain_.radius() - norm2(x));
          } else {
            return k.c;
          }
        },
        kind_);
  }

  double operator()(std::span<const double> x) const {
    require(domain_.contains(x), Errc::point_outside_domain, "point outside the phase domain");
    return value_unchecked(x);
  }

  std::vector<double> gradient(std::span<const double> x) const {
    require(domain_.contains(x), Errc::point_outside_domain, "point outside the phase domain");
    std::vector<double> g(x.size(), 0.0);
    const double r = norm2(x);
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::Linear>) {
            g[static_cast<std::size_t>(k.axis)] = 1.0;
          } else if constexpr (std::is_same_v<K, kind::RadialPower>) {
            if (k.gamma < 2.0 && r < gradient_singularity_radius)
              fail(Errc::gradient_undefined, "radial power gradient undefined at the origin");
            if (r == 0.0) return;
            const double c = k.gamma * std::pow(r, k.gamma - 2.0);
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * x[i];
          } else if constexpr (std::is_same_v<K, kind::RadialQuadratic>) {
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
          } else if constexpr (std::is_same_v<K, kind::Saddle2D>) {
            g[0] = 2.0 * x[0];
            g[1] = -2.0 * x[1];
          } else if constexpr (std::is_same_v<K, kind::Oscillatory>) {
            g[0] = 1.0;
            g[1] = k.a * k.N * std::cos(k.N * x[1]);
          } else if constexpr (std::is_same_v<K, kind::BoundaryDistanceReparam>) {
            if (r < gradient_singularity_radius)
              fail(Errc::gradient_undefined, "distance phase gradient undefined at the centre");
            const double c = -k.H.derivative(domain_.radius() - r) / r;
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * x[i];
          }
        },
        kind_);
    return g;
  }

  double gradient_norm(std::span<const double> x) const { return norm2(gradient(x)); }

  /// Critical values from the catalog.
  std::vector<double> critical_values() const {
    return std::visit(
        [&](const auto& k) -> std::vector<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::RadialPower>) {
            return k.gamma > 1.0 && radial_hits_origin() ? std::vector<double>{0.0} : std::vector<double>{};
          } else if constexpr (std::is_same_v<K, kind::RadialQuadratic>) {
            return radial_hits_origin() ? std::vector<double>{0.0} : std::vector<double>{};
          } else if constexpr (std::is_same_v<K, kind::Saddle2D>) {
            return saddle_hits_origin() ? std::vector<double>{0.0} : std::vector<double>{};
          } else if constexpr (std::is_same_v<K, kind::Constant>) {
            return {k.c};
          } else {
            return {};
          }
        },
        kind_);
  }

  /// Closed image interval; exact except for Oscillatory, where it encloses.
  Interval image() const {
    double rmin = 0.0, rmax = 0.0;
    if (domain_.is_ball()) {
      rmax = domain_.radius();
    } else {
      double smin = 0.0, smax = 0.0;
      for (const auto& b : domain_.bounds()) {
        const double lo2 = (b.lo <= 0.0 && b.hi >= 0.0) ? 0.0 : std::min(b.lo * b.lo, b.hi * b.hi);
        smin += lo2;
        smax += std::max(b.lo * b.lo, b.hi * b.hi);
      }
      rmin = std::sqrt(smin);
      rmax = std::sqrt(smax);
    }
    return std::visit(
        [&](const auto& k) -> Interval {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::Linear>) {
            return domain_.axis_bounds(k.axis);
          } else if constexpr (std::is_same_v<K, kind::RadialPower>) {
            return {std::pow(rmin, k.gamma), std::pow(rmax, k.gamma)};
          } else if constexpr (std::is_same_v<K, kind::RadialQuadratic>) {
            return {rmin * rmin, rmax * rmax};
          } else if constexpr (std::is_same_v<K, kind::Saddle2D>) {
            if (domain_.is_ball()) return {-rmax * rmax, rmax * rmax};
            const auto bx = domain_.axis_bounds(0), by = domain_.axis_bounds(1);
            auto sq_range = [](Interval b) {
              const double lo = (b.lo <= 0.0 && b.hi >= 0.0) ? 0.0 : std::min(b.lo * b.lo, b.hi * b.hi);
              return Interval{lo, std::max(b.lo * b.lo, b.hi * b.hi)};
            };
            const auto X = sq_range(bx), Y = sq_range(by);
            return {X.lo - Y.hi, X.hi - Y.lo};
          } else if constexpr (std::is_same_v<K, kind::Oscillatory>) {
            const auto b = domain_.axis_bounds(0);
            return {b.lo - std::abs(k.a), b.hi + std::abs(k.a)};
          } else if constexpr (std::is_same_v<K, kind::BoundaryDistanceReparam>) {
            return {k.H(0.0), k.H(domain_.radius())};
          } else {
            return {k.c, k.c};
          }
        },
        kind_);
  }

  /// Distance from t to the nearest critical value (infinity if none).
  double distance_to_critical(double t) const {
    double d = std::numeric_limits<double>::infinity();
    for (double v : critical_values()) d = std::min(d, std::abs(t - v));
    return d;
  }

 private:
  bool radial_hits_origin() const {
    if (domain_.is_ball()) return true;
    for (const auto& b : domain_.bounds())
      if (b.lo > 0.0 || b.hi < 0.0) return false;
    return true;
  }
  bool saddle_hits_origin() const { return radial_hits_origin(); }

  void validate() const {
    const int n = dimension();
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kind::Linear>) {
            require(k.axis >= 0 && k.axis < n, Errc::invalid_argument, "linear direction index out of range");
          } else if constexpr (std::is_same_v<K, kind::RadialPower>) {
            require(k.gamma >= 1.0, Errc::invalid_argument, "radial power requires gamma >= 1");
          } else if constexpr (std::is_same_v<K, kind::Saddle2D>) {
            require(n == 2, Errc::invalid_argument, "saddle phase requires n = 2");
          } else if constexpr (std::is_same_v<K, kind::Oscillatory>) {
            require(n >= 2, Errc::invalid_argument, "oscillatory phase requires n >= 2");
          } else if constexpr (std::is_same_v<K, kind::BoundaryDistanceReparam>) {
            require(domain_.is_ball(), Errc::invalid_argument, "boundary-distance phase needs a ball domain");
            require(!k.H.empty() && k.H.s_min() <= 0.0 && k.H.s_max() >= domain_.radius() * (1 - 1e-12),
                    Errc::invalid_argument, "profile must cover [0, R]");
          }
        },
        kind_);
  }

  PhaseKind kind_;
  Domain domain_;
};

// ---------------------------------------------------------------------------
// Gamma profiles and reparametrization design

struct GammaProfile {
  std::function<double(double)> gamma;
  Interval validity{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
};

struct GammaCheckReport {
  double min_slack = std::numeric_limits<double>::infinity();
  Point worst_point;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // undefined gradient or level outside validity
};

/// Deterministic quasi-random sampler of points uniformly distributed in a domain.
/// Rejection from the bounding box for balls.
class DomainSampler {
 public:
  DomainSampler(const Domain& d, std::uint64_t seed) : domain_(d), seq_(static_cast<std::size_t>(d.dimension()), seed) {}

  /// Candidate point for index i; returns false when rejected.
  bool candidate(std::uint64_t i, std::span<double> x) const {
    seq_.point(i, x);
    for (int k = 0; k < domain_.dimension(); ++k) {
      const auto b = domain_.axis_bounds(k);
      x[static_cast<std::size_t>(k)] = b.lo + b.length() * x[static_cast<std::size_t>(k)];
    }
    return domain_.contains(x);
  }

  /// Fills `count` accepted points in index order.
  std::vector<Point> accepted(std::size_t count) const {
    std::vector<Point> pts;
    pts.reserve(count);
    Point x(static_cast<std::size_t>(domain_.dimension()));
    for (std::uint64_t i = 0; pts.size() < count; ++i)
      if (candidate(i, x)) pts.push_back(x);
    return pts;
  }

 private:
  const Domain& domain_;
  HaltonSequence seq_;
};

inline GammaCheckReport check_gamma_profile(const Phase& phase, const GammaProfile& profile, std::size_t sample_count,
                                            std::uint64_t seed) {
  require(sample_count >= 1, Errc::invalid_argument, "sample_count must be >= 1");
  GammaCheckReport rep;
  DomainSampler sampler(phase.domain(), seed);
  for (const auto& x : sampler.accepted(sample_count)) {
    const double t = phase.value_unchecked(x);
    if (!profile.validity.contains(t)) {
      ++rep.skipped;
      continue;
    }
    double g;
    try {
      g = phase.gradient_norm(x);
    } catch (const Error& e) {
      if (e.code() != Errc::gradient_undefined) throw;
      ++rep.skipped;
      continue;
    }
    const double slack = g - profile.gamma(t);
    ++rep.evaluated;
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.worst_point = x;
    }
  }
  return rep;
}

/// Solves H'(s) = Gamma(H(s)) / m(s), H(s_min) = h0 with classical RK4 at a fixed step.
inline TabulatedProfile design_reparametrization(const GammaProfile& profile, const std::function<double(double)>& m,
                                                 double h0, Interval s_range, double step) {
  require(step > 0.0, Errc::invalid_argument, "step must be positive");
  require(s_range.hi > s_range.lo, Errc::invalid_argument, "empty s range");
  require(profile.validity.contains(h0), Errc::ode_blow_up, "initial value outside the profile's validity interval");
  const auto steps = static_cast<std::size_t>(std::ceil((s_range.hi - s_range.lo) / step - 1e-9));
  const double hstep = (s_range.hi - s_range.lo) / static_cast<double>(steps);
  auto rhs = [&](double s, double H) {
    if (!profile.validity.contains(H) || !std::isfinite(H))
      fail(Errc::ode_blow_up, "solution left the validity interval near s = " + std::to_string(s));
    return profile.gamma(H) / m(s);
  };
  std::vector<double> values{h0};
  std::vector<double> slopes{rhs(s_range.lo, h0)};
  double H = h0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = s_range.lo + hstep * static_cast<double>(i);
    const double k1 = rhs(s, H);
    const double k2 = rhs(s + 0.5 * hstep, H + 0.5 * hstep * k1);
    const double k3 = rhs(s + 0.5 * hstep, H + 0.5 * hstep * k2);
    const double k4 = rhs(s + hstep, H + hstep * k3);
    H += hstep / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    values.push_back(H);
    slopes.push_back(rhs(s + hstep, H));
  }
  return TabulatedProfile(s_range.lo, hstep, std::move(values), std::move(slopes));
}

// ---------------------------------------------------------------------------
// Boundary transversality

namespace detail {

inline double tangential_gradient_norm(const Phase& phase, std::span<const double> x) {
  // boundary points can round to just outside the ball; take the gradient
  // an ulp-scale step inside
  std::vector<double> xi(x.begin(), x.end());
  for (auto& v : xi) v *= 1.0 - 1e-12;
  auto g = phase.gradient(xi);
  const double R = norm2(x);
  double gn = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) gn += g[i] * x[i] / R;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ti = g[i] - gn * x[i] / R;
    s += ti * ti;
  }
  return std::sqrt(s);
}

/// Finds roots of f on [a, b] by sign changes on `samples` subintervals plus bisection.
template <class F>
std::vector<double> bracket_roots(F&& f, double a, double b, int samples) {
  std::vector<double> roots;
  double x0 = a, f0 = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = a + (b - a) * i / samples;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace detail

/// Minimal tangential gradient norm of theta on the level-boundary intersection.
/// Linear phases on balls use the closed form; other phases sample the sphere
/// (n = 2 or 3).
inline double boundary_transversality(const Phase& phase, double t, int samples = 4096, bool force_sampling = false) {
  const auto img = phase.image();
  require(img.contains(t), Errc::level_outside_image, "level outside the phase image");
  const auto& dom = phase.domain();
  require(dom.is_ball(), Errc::invalid_argument, "boundary transversality is implemented for ball domains");
  const double R = dom.radius();
  const int n = dom.dimension();
  if (phase.is<kind::Linear>() && !force_sampling) {
    require(std::abs(t) < R, Errc::empty_intersection, "level does not meet the boundary transversally");
    return std::sqrt(1.0 - (t / R) * (t / R));
  }
  require(n == 2 || n == 3, Errc::invalid_argument, "sampled transversality supports n = 2 or 3");
  double best = std::numeric_limits<double>::infinity();
  if (n == 2) {
    auto f = [&](double a) {
      const double x[2] = {R * std::cos(a), R * std::sin(a)};
      return phase.value_unchecked(x) - t;
    };
    for (double a : detail::bracket_roots(f, 0.0, 2.0 * pi, samples)) {
      const double x[2] = {R * std::cos(a), R * std::sin(a)};
      best = std::min(best, detail::tangential_gradient_norm(phase, x));
    }
  } else {
    const int m = std::max(16, static_cast<int>(std::sqrt(static_cast<double>(samples))));
    auto point = [&](double polar, double az) {
      return std::array<double, 3>{R * std::cos(polar), R * std::sin(polar) * std::cos(az),
                                   R * std::sin(polar) * std::sin(az)};
    };
    for (int j = 0; j < m; ++j) {
      const double az = 2.0 * pi * (j + 0.5) / m;
      auto f = [&](double polar) {
        auto x = point(polar, az);
        return phase.value_unchecked(x) - t;
      };
      for (double p : detail::bracket_roots(f, 0.0, pi, 4 * m)) {
        auto x = point(p, az);
        best = std::min(best, detail::tangential_gradient_norm(phase, x));
      }
    }
  }
  require(std::isfinite(best), Errc::empty_intersection, "level set does not meet the boundary");
  return best;
}

}  // namespace coarea
