#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "coarea/error.hpp"
#include "coarea/numerics.hpp"
#include "coarea/qmc.hpp"

namespace coarea {

using cdouble = std::complex<double>;

// ---------------------------------------------------------------------------
// Kernels and cutoffs

template <class K>
concept Kernel1D = requires(const K& k, double s, double t, double u) {
  { k(s, t) } -> std::convertible_to<cdouble>;
  { k.size_constant() } -> std::convertible_to<double>;
  { k.dini_modulus(u) } -> std::convertible_to<double>;
  { k.dini_integral() } -> std::convertible_to<double>;
  { k.name() } -> std::convertible_to<std::string>;
};

template <class C>
concept Cutoff = requires(const C& c, double r) {
  { c(r) } -> std::convertible_to<double>;
  { c.derivative_bound() } -> std::convertible_to<double>;
  { c.name() } -> std::convertible_to<std::string>;
};

/// k(s, t) = 1 / (pi (s - t)).
class HilbertKernel {
 public:
  HilbertKernel() : dini_integral_(integrate_gauss([this](double u) { return dini_modulus(u) / u; }, 0.0, 1.0, 32)) {}

  double operator()(double s, double t) const { return 1.0 / (pi * (s - t)); }
  double size_constant() const { return 1.0 / pi; }
  /// (2/pi) u / (1 - u/2); the same formula stays increasing on [1/2, 1].
  double dini_modulus(double u) const { return 2.0 / pi * u / (1.0 - 0.5 * u); }
  double dini_integral() const { return dini_integral_; }
  std::string name() const { return "hilbert"; }

 private:
  double dini_integral_;
};

/// chi(r) = 3u^2 - 2u^3 with u = clamp(r - 1, 0, 1).
struct SmoothstepCutoff {
  double operator()(double r) const {
    const double u = std::clamp(r - 1.0, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
  }
  double derivative_bound() const { return 1.5; }
  std::string name() const { return "smoothstep"; }
};

/// chi(r) = clamp(r - 1, 0, 1).
struct RampCutoff {
  double operator()(double r) const { return std::clamp(r - 1.0, 0.0, 1.0); }
  double derivative_bound() const { return 1.0; }
  std::string name() const { return "ramp"; }
};

/// Type-erased kernel for runtime selection (CLI); hot loops use the templates.
class AnyKernel {
 public:
  template <Kernel1D K>
  AnyKernel(K k) : self_(std::make_shared<Model<K>>(std::move(k))) {}

  cdouble operator()(double s, double t) const { return self_->eval(s, t); }
  double size_constant() const { return self_->size_constant(); }
  double dini_modulus(double u) const { return self_->dini_modulus(u); }
  double dini_integral() const { return self_->dini_integral(); }
  std::string name() const { return self_->name(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual cdouble eval(double, double) const = 0;
    virtual double size_constant() const = 0;
    virtual double dini_modulus(double) const = 0;
    virtual double dini_integral() const = 0;
    virtual std::string name() const = 0;
  };
  template <class K>
  struct Model final : Concept {
    explicit Model(K k) : k(std::move(k)) {}
    cdouble eval(double s, double t) const override { return k(s, t); }
    double size_constant() const override { return k.size_constant(); }
    double dini_modulus(double u) const override { return k.dini_modulus(u); }
    double dini_integral() const override { return k.dini_integral(); }
    std::string name() const override { return k.name(); }
    K k;
  };
  std::shared_ptr<const Concept> self_;
};

// ---------------------------------------------------------------------------
// Grid functions: cell-centred samples of a piecewise-constant function.

class GridFunction1D {
 public:
  GridFunction1D() = default;
  GridFunction1D(double a, double b, std::size_t cells) : a_(a), h_((b - a) / static_cast<double>(cells)), v_(cells) {
    require(b > a && cells >= 1, Errc::invalid_argument, "grid needs b > a and at least one cell");
  }

  template <class F>
  static GridFunction1D sample(double a, double b, std::size_t cells, F&& f) {
    GridFunction1D g(a, b, cells);
    for (std::size_t j = 0; j < cells; ++j) g.v_[j] = cdouble(f(g.node(j)));
    return g;
  }

  std::size_t size() const { return v_.size(); }
  double spacing() const { return h_; }
  double lower() const { return a_; }
  double upper() const { return a_ + h_ * static_cast<double>(v_.size()); }
  double node(std::size_t j) const { return a_ + (static_cast<double>(j) + 0.5) * h_; }
  double cell_lo(std::size_t j) const { return a_ + static_cast<double>(j) * h_; }

  cdouble& operator[](std::size_t j) { return v_[j]; }
  const cdouble& operator[](std::size_t j) const { return v_[j]; }
  std::vector<cdouble>& values() { return v_; }
  const std::vector<cdouble>& values() const { return v_; }

  GridFunction1D like() const {
    GridFunction1D g = *this;
    std::fill(g.v_.begin(), g.v_.end(), cdouble{});
    return g;
  }

  bool same_grid(const GridFunction1D& o) const { return a_ == o.a_ && h_ == o.h_ && v_.size() == o.v_.size(); }

  double lr_norm(double r) const {
    double s = 0.0;
    for (const auto& v : v_) s += std::pow(std::abs(v), r);
    return std::pow(s * h_, 1.0 / r);
  }
  double l2_norm() const { return lr_norm(2.0); }
  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : v_) m = std::max(m, std::abs(v));
    return m;
  }

  GridFunction1D abs() const {
    GridFunction1D g = like();
    for (std::size_t j = 0; j < v_.size(); ++j) g.v_[j] = std::abs(v_[j]);
    return g;
  }

 private:
  double a_ = 0.0;
  double h_ = 1.0;
  std::vector<cdouble> v_;
};

/// Bilinear pairing int F G (no conjugation).
inline cdouble pairing(const GridFunction1D& F, const GridFunction1D& G) {
  require(F.same_grid(G), Errc::invalid_argument, "pairing needs matching grids");
  cdouble s{};
  for (std::size_t j = 0; j < F.size(); ++j) s += F[j] * G[j];
  return s * F.spacing();
}

// ---------------------------------------------------------------------------
// Truncated operators

enum class Truncation { Hard, Smooth, Residual };

namespace detail {

inline void check_resolution(const GridFunction1D& F, double eps) {
  require(eps > 0.0, Errc::invalid_argument, "truncation radius must be positive");
  require(eps >= 2.0 * F.spacing() * (1.0 - 1e-12), Errc::resolution_too_coarse,
          "truncation radius below twice the grid spacing");
}

/// int m(|s-t|/eps) k(s,t) F(t) dt with composite midpoint pieces split at
/// s +- eps and s +- 2 eps so no cell straddles a truncation radius.
template <Kernel1D K, Cutoff C>
cdouble truncated_at(const K& k, const C& chi, const GridFunction1D& F, double eps, double s, Truncation mode) {
  const double h = F.spacing();
  const double a = F.lower();
  const auto N = static_cast<std::ptrdiff_t>(F.size());
  auto multiplier = [&](double r) -> double {
    switch (mode) {
      case Truncation::Hard: return r > 1.0 ? 1.0 : 0.0;
      case Truncation::Smooth: return chi(r);
      case Truncation::Residual: return (r > 1.0 && r < 2.0) ? 1.0 - chi(r) : 0.0;
    }
    return 0.0;
  };
  // cells intersecting (s - 2 eps, s + 2 eps) get split treatment
  const auto jlo = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor((s - 2 * eps - a) / h)), 0, N);
  const auto jhi = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor((s + 2 * eps - a) / h)) + 1, 0, N);
  cdouble sum{};
  if (mode != Truncation::Residual) {
    for (std::ptrdiff_t j = 0; j < jlo; ++j) {
      const auto& f = F[static_cast<std::size_t>(j)];
      if (f != cdouble{}) sum += cdouble(k(s, F.node(static_cast<std::size_t>(j)))) * f;
    }
    for (std::ptrdiff_t j = jhi; j < N; ++j) {
      const auto& f = F[static_cast<std::size_t>(j)];
      if (f != cdouble{}) sum += cdouble(k(s, F.node(static_cast<std::size_t>(j)))) * f;
    }
    sum *= h;
  }
  const double breaks[4] = {s - 2 * eps, s - eps, s + eps, s + 2 * eps};
  cdouble near{};
  for (std::ptrdiff_t j = jlo; j < jhi; ++j) {
    const auto& f = F[static_cast<std::size_t>(j)];
    if (f == cdouble{}) continue;
    const double lo = F.cell_lo(static_cast<std::size_t>(j));
    const double hi = lo + h;
    double cuts[6];
    int nc = 0;
    cuts[nc++] = lo;
    for (double b : breaks)
      if (b > lo && b < hi) cuts[nc++] = b;
    cuts[nc++] = hi;
    cdouble cell{};
    for (int p = 0; p + 1 < nc; ++p) {
      const double m = 0.5 * (cuts[p] + cuts[p + 1]);
      const double w = multiplier(std::abs(s - m) / eps);
      if (w != 0.0) cell += (cuts[p + 1] - cuts[p]) * w * cdouble(k(s, m));
    }
    near += cell * f;
  }
  return sum + near;
}

}  // namespace detail

template <Kernel1D K, Cutoff C = SmoothstepCutoff>
cdouble truncation_at(const K& k, const GridFunction1D& F, double eps, double s, Truncation mode, const C& chi = C{}) {
  detail::check_resolution(F, eps);
  return detail::truncated_at(k, chi, F, eps, s, mode);
}

template <Kernel1D K>
cdouble hard_truncation_at(const K& k, const GridFunction1D& F, double eps, double s) {
  return truncation_at(k, F, eps, s, Truncation::Hard);
}

template <Kernel1D K, Cutoff C>
GridFunction1D apply_truncation(const K& k, const C& chi, const GridFunction1D& F, double eps, Truncation mode) {
  detail::check_resolution(F, eps);
  GridFunction1D out = F.like();
  parallel_for(F.size(), [&](std::size_t i) { out[i] = detail::truncated_at(k, chi, F, eps, F.node(i), mode); });
  return out;
}

template <Kernel1D K>
GridFunction1D hard_truncation(const K& k, const GridFunction1D& F, double eps) {
  return apply_truncation(k, SmoothstepCutoff{}, F, eps, Truncation::Hard);
}

template <Kernel1D K, Cutoff C = SmoothstepCutoff>
GridFunction1D smooth_truncation(const K& k, const GridFunction1D& F, double eps, const C& chi = C{}) {
  return apply_truncation(k, chi, F, eps, Truncation::Smooth);
}

template <Kernel1D K, Cutoff C = SmoothstepCutoff>
GridFunction1D residual(const K& k, const GridFunction1D& F, double eps, const C& chi = C{}) {
  return apply_truncation(k, chi, F, eps, Truncation::Residual);
}

/// Geometric ladder {2^-k : k_min <= k <= k_max}.
inline std::vector<double> epsilon_ladder(int k_min, int k_max) {
  require(k_min <= k_max, Errc::invalid_argument, "empty epsilon ladder bounds");
  std::vector<double> e;
  for (int k = k_min; k <= k_max; ++k) e.push_back(std::ldexp(1.0, -k));
  return e;
}

template <Kernel1D K>
GridFunction1D maximal_truncated(const K& k, const GridFunction1D& F, std::span<const double> eps_set) {
  require(!eps_set.empty(), Errc::empty_epsilon_set, "maximal truncation needs at least one epsilon");
  GridFunction1D out = F.like();
  for (double eps : eps_set) {
    auto T = hard_truncation(k, F, eps);
    for (std::size_t i = 0; i < F.size(); ++i) out[i] = std::max(out[i].real(), std::abs(T[i]));
  }
  return out;
}

/// Exact discrete Hardy-Littlewood maximal function: for every cell, the sup
/// of |F| averages over grid-aligned intervals containing it. O(N^2).
inline GridFunction1D hl_maximal(const GridFunction1D& F) {
  const std::size_t N = F.size();
  std::vector<double> P(N + 1, 0.0);
  for (std::size_t j = 0; j < N; ++j) P[j + 1] = P[j] + std::abs(F[j]);
  std::vector<double> M(N, 0.0);
  std::vector<double> suffix(N + 2, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    // suffix[j] = max_{j' >= j} avg over cells [i, j')
    suffix[N + 1] = 0.0;
    for (std::size_t j = N; j > i; --j) {
      const double avg = (P[j] - P[i]) / static_cast<double>(j - i);
      suffix[j] = std::max(suffix[j + 1], avg);
    }
    for (std::size_t c = i; c < N; ++c) M[c] = std::max(M[c], suffix[c + 1]);
  }
  GridFunction1D out = F.like();
  for (std::size_t j = 0; j < N; ++j) out[j] = M[j];
  return out;
}

// ---------------------------------------------------------------------------
// (Hk) package verification

struct HkReport {
  bool size_ok = true;
  bool dini_ok = true;
  double worst_size_ratio = 0.0;   // max |k| |s-t| / C_k1
  double worst_dini_ratio = 0.0;   // max observed / omega bound
  double l2_ratio = 0.0;
  double smoothed_dini_constant = 0.0;  // fitted C in |dK_sm| <= C (omega(u)+u)/|s-t|
  std::size_t samples = 0;
};

template <Kernel1D K, Cutoff C = SmoothstepCutoff>
HkReport verify_hk_package(const K& k, std::size_t sample_budget, std::uint64_t seed, const C& chi = C{},
                           std::size_t l2_cells = 512, std::size_t l2_trials = 4) {
  HkReport rep;
  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  const double Ck = k.size_constant();
  constexpr double slack = 1.0 + 1e-12;
  for (std::size_t i = 0; i < sample_budget; ++i) {
    const double s = U(rng), t = U(rng);
    if (s == t) continue;
    const double d = std::abs(s - t);
    const double size_ratio = std::abs(cdouble(k(s, t))) * d / Ck;
    rep.worst_size_ratio = std::max(rep.worst_size_ratio, size_ratio);
    if (size_ratio > slack) rep.size_ok = false;
    // perturbation with |s - s'| <= |s - t| / 2
    const double u = 0.5 * U01(rng);
    const double sp = s + (U01(rng) < 0.5 ? -1.0 : 1.0) * u * d;
    const double om = k.dini_modulus(u);
    if (om > 0.0) {
      const double ds = std::abs(cdouble(k(s, t)) - cdouble(k(sp, t))) * d / om;
      const double dt = std::abs(cdouble(k(t, s)) - cdouble(k(t, sp))) * d / om;
      rep.worst_dini_ratio = std::max({rep.worst_dini_ratio, ds, dt});
      if (ds > slack || dt > slack) rep.dini_ok = false;
      // smoothed kernel K_eps(s,t) = chi(|s-t|/eps) k(s,t), with eps spanning scales
      const double eps = std::ldexp(1.0, -static_cast<int>(U01(rng) * 8.0)) * d;
      auto Ksm = [&](double a, double b) { return chi(std::abs(a - b) / eps) * cdouble(k(a, b)); };
      const double sm = std::abs(Ksm(s, t) - Ksm(sp, t)) * d / (om + u);
      rep.smoothed_dini_constant = std::max(rep.smoothed_dini_constant, sm);
    }
    ++rep.samples;
  }
  // (Hk3): empirical L2 ratio of smooth truncations over random data and the
  // ladder. Even trials are white noise, odd trials random trigonometric sums
  // (noise alone is nearly annihilated by the truncated operator).
  std::normal_distribution<double> Z(0.0, 1.0);
  std::uniform_real_distribution<double> W(1.0, 40.0);
  const auto ladder = epsilon_ladder(2, 5);
  for (std::size_t trial = 0; trial < l2_trials; ++trial) {
    GridFunction1D F(-1.0, 1.0, l2_cells);
    if (trial % 2 == 0) {
      for (auto& v : F.values()) v = cdouble(Z(rng), Z(rng));
    } else {
      double om[4], ph[4];
      for (int j = 0; j < 4; ++j) {
        om[j] = W(rng);
        ph[j] = 2.0 * pi * U01(rng);
      }
      for (std::size_t i = 0; i < F.size(); ++i) {
        double v = 0.0;
        for (int j = 0; j < 4; ++j) v += std::cos(om[j] * F.node(i) + ph[j]);
        F[i] = v;
      }
    }
    const double fn = F.l2_norm();
    for (double eps : ladder) {
      if (eps < 2.0 * F.spacing()) continue;
      const double tn = smooth_truncation(k, F, eps, chi).l2_norm();
      rep.l2_ratio = std::max(rep.l2_ratio, tn / fn);
    }
  }
  return rep;
}

}  // namespace coarea
