#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "coarea/error.hpp"

namespace coarea {

inline constexpr double pi = std::numbers::pi;

/// Volume of the unit ball in R^n (kappa_n).
inline double unit_ball_volume(int n) {
  return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Hausdorff measure of the unit sphere S^{n-1} in R^n (sigma_{n-1}).
/// For n = 1 the "sphere" is the two points {-1, 1}.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

namespace detail {

inline std::vector<std::array<double, 2>> compute_gauss_legendre(int order) {
  std::vector<std::array<double, 2>> rule(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
inline const std::vector<std::array<double, 2>>& gauss_legendre(int order) {
  require(order >= 1 && order <= 64, Errc::invalid_argument, "Gauss-Legendre order out of range");
  static const auto table = [] {
    std::vector<std::vector<std::array<double, 2>>> t(65);
    for (int k = 1; k <= 64; ++k) t[static_cast<std::size_t>(k)] = detail::compute_gauss_legendre(k);
    return t;
  }();
  return table[static_cast<std::size_t>(order)];
}

template <class F>
double integrate_gauss(F&& f, double a, double b, int order = 8) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (const auto& [x, w] : gauss_legendre(order)) sum += w * f(mid + half * x);
  return half * sum;
}

/// Double-exponential (tanh-sinh) quadrature on [a, b]; tolerates integrable
/// endpoint singularities. Nodes are generated with the distance to the
/// nearest endpoint computed directly; nodes that would round onto a or b
/// are dropped.
template <class F>
double integrate_tanh_sinh(F&& f, double a, double b, int level = 5) {
  if (!(b > a)) return 0.0;
  const double step = std::ldexp(1.0, -level);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  // u = 0 node
  sum += 0.5 * pi * f(a + half);
  for (int k = 1;; ++k) {
    const double u = k * step;
    const double v = 0.5 * pi * std::sinh(u);
    const double ch = std::cosh(v);
    const double w = 0.5 * pi * std::cosh(u) / (ch * ch);
    // 1 - tanh(v) = 2 / (exp(2v) + 1)
    const double comp = 2.0 / (std::exp(2.0 * v) + 1.0);
    const double offset = half * comp;
    if (w < 1e-300 || offset <= 0.0 || u > 6.5) break;
    if (a + offset != a) sum += w * f(a + offset);
    if (b - offset != b) sum += w * f(b - offset);
  }
  return half * step * sum;
}

/// Integrate on [a, b] splitting at break points; pieces that touch a break or
/// an endpoint listed as singular use tanh-sinh, the rest Gauss-Legendre.
template <class F>
double integrate_with_breaks(F&& f, double a, double b, std::span<const double> breaks,
                             bool singular_ends = true) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  auto is_break = [&](double x) {
    return std::any_of(breaks.begin(), breaks.end(), [&](double c) { return c == x; });
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const bool singular = (singular_ends && (i == 0 || i + 2 == cuts.size())) || is_break(lo) || is_break(hi);
    total += singular ? integrate_tanh_sinh(f, lo, hi) : integrate_gauss(f, lo, hi, 8);
  }
  return total;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;  // weighted residual sum of squares
  std::size_t points = 0;
};

/// Weighted ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  require(x.size() == y.size() && y.size() == w.size() && x.size() >= 2, Errc::invalid_argument,
          "line fit needs at least two weighted points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, Errc::invalid_argument, "degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += w[i] * r * r;
  }
  return fit;
}

/// Runs body(i) for i in [0, count). Each index is independent, so results do
/// not depend on how the range is partitioned across threads.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, count / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
}

inline double conjugate_exponent(double r) {
  require(r > 1.0, Errc::invalid_argument, "conjugate exponent needs r > 1");
  return r / (r - 1.0);
}

}  // namespace coarea
