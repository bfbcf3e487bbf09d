#pragma once

// Independent reference computations for the tests. None of these reuse the
// library's quadrature or sampling code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Saddle x^2 - y^2 on the disk of radius R: along the branches
/// x = sqrt(t) cosh u, y = sqrt(t) sinh u the coarea integrand ds/|grad| is
/// du/2, and the branch ends where t cosh 2u = R^2.
inline double saddle_density_arclength(double t, double R = 1.0) {
  const double a = std::abs(t);
  if (a >= R * R) return 0.0;
  const double U = 0.5 * std::acosh(R * R / a);
  return 2.0 * (2.0 * U) / 2.0;
}

/// iid Monte Carlo histogram of w_theta on a disk/ball by rejection.
template <class Theta>
std::vector<double> iid_histogram(Theta&& theta, int n, double R, double t0, double t1, int bins, std::size_t N,
                                  std::uint64_t seed, double volume) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-R, R);
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::size_t acc = 0;
  while (acc < N) {
    double r2 = 0.0;
    for (auto& v : x) {
      v = U(rng);
      r2 += v * v;
    }
    if (r2 > R * R) continue;
    ++acc;
    const double t = theta(x);
    const int b = static_cast<int>(std::floor((t - t0) / (t1 - t0) * bins));
    if (b >= 0 && b < bins) h[static_cast<std::size_t>(b)] += 1.0;
  }
  const double width = (t1 - t0) / bins;
  for (auto& v : h) v *= volume / (static_cast<double>(N) * width);
  return h;
}

/// O(N^3) discrete maximal function over aligned intervals.
inline std::vector<double> brute_maximal(const std::vector<double>& absF) {
  const std::size_t N = absF.size();
  std::vector<double> M(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j <= N; ++j) {
      double s = 0.0;
      for (std::size_t k = i; k < j; ++k) s += absF[k];
      const double avg = s / static_cast<double>(j - i);
      for (std::size_t k = i; k < j; ++k) M[k] = std::max(M[k], avg);
    }
  return M;
}

/// Operator 2-norm of a real square matrix by power iteration on A^T A.
inline double operator_norm(const std::vector<std::vector<double>>& A, int iters = 400) {
  const std::size_t n = A.size();
  std::vector<double> v(n, 1.0), w(n), u(n);
  double lam = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += A[i][j] * v[j];
      w[i] = s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += A[i][j] * w[i];
      u[j] = s;
    }
    double nu = 0.0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;
    lam = nu;
    for (std::size_t j = 0; j < n; ++j) v[j] = u[j] / nu;
  }
  return std::sqrt(lam);
}

/// Recursive stopping-time reference: returns (generation, index) pairs.
inline void stopping_reference(const std::vector<double>& F, const std::vector<double>& G, double L, int max_depth,
                               int gen, long idx, std::set<std::pair<int, long>>& out) {
  const long N = static_cast<long>(F.size());
  auto avg = [&](const std::vector<double>& v, int g, long i) {
    const long w = N >> g;
    double s = 0.0;
    for (long k = i * w; k < (i + 1) * w; ++k) s += std::abs(v[static_cast<std::size_t>(k)]);
    return s / static_cast<double>(w);
  };
  out.insert({gen, idx});
  const double aF = avg(F, gen, idx), aG = avg(G, gen, idx);
  std::function<void(int, long)> search = [&](int g, long i) {
    if (g > max_depth) return;
    if (avg(F, g, i) > L * aF || avg(G, g, i) > L * aG) {
      stopping_reference(F, G, L, max_depth, g, i, out);
      return;
    }
    search(g + 1, 2 * i);
    search(g + 1, 2 * i + 1);
  };
  search(gen + 1, 2 * idx);
  search(gen + 1, 2 * idx + 1);
}

/// Radial pullback integral  int_{|y| < rho} |y|^{-q} dy  in R^2.
inline double radial_pullback_2d(double rho, double q) { return 2.0 * pi * std::pow(rho, 2.0 - q) / (2.0 - q); }

}  // namespace oracle

namespace oracle {

/// Nested Simpson for int int_{|S(a)-T(b)| > eps} k(S(a), T(b)) u(a) v(b) da db,
/// splitting the inner a-range at the two truncation breakpoints. S must be
/// increasing on [a0, a1]; Sinv is its inverse.
inline double truncated_double_integral(const std::function<double(double)>& S,
                                        const std::function<double(double)>& Sinv, double a0, double a1,
                                        const std::function<double(double)>& u,
                                        const std::function<double(double)>& T, double b0, double b1,
                                        const std::function<double(double)>& v, double eps, int panels = 2000) {
  const double s_lo = S(a0), s_hi = S(a1);
  auto inner = [&](double b) {
    const double t = T(b);
    auto f = [&](double a) { return u(a) / (pi * (S(a) - t)); };
    double acc = 0.0;
    if (t - eps > s_lo) acc += simpson(f, a0, Sinv(std::min(t - eps, s_hi)), panels);
    if (t + eps < s_hi) acc += simpson(f, Sinv(std::max(t + eps, s_lo)), a1, panels);
    return acc * v(b);
  };
  return simpson(inner, b0, b1, panels);
}

}  // namespace oracle
