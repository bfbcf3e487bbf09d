#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "coarea/error.hpp"
#include "coarea/kernel.hpp"
#include "coarea/phase.hpp"
#include "coarea/pushforward.hpp"
#include "coarea/qmc.hpp"

namespace coarea {

/// <T_eps f, g> = int int 1_{|phi(x)-psi(y)|>eps} k(phi(x), psi(y)) f(y) g(x) dy dx
struct SynchronizedForm {
  Phase phi;  // on Omega_x, carries g
  Phase psi;  // on Omega_y, carries f
  AnyKernel kernel = HilbertKernel{};
  Field f = Field::one();
  Field g = Field::one();
  double eps = 0.25;
};

struct ComplexEstimate {
  cdouble value{};
  double stderr = 0.0;
};

struct LhsBudget {
  std::size_t sample_count = 1'000'000;
  std::size_t replicates = 32;
  std::uint64_t seed = 1;
};

/// Quasi-Monte Carlo estimate of the 2n-dimensional truncated form: R
/// independently rotated Halton replicates over the bounding box of
/// Omega_x x Omega_y, with the domain indicator in the integrand. Each
/// replicate uses a fixed number of box points, chosen so that on average
/// sample_count / R of them fall in the domain; with a fixed point count the
/// rotated estimator is exactly unbiased. The standard error comes from the
/// replicate spread.
inline ComplexEstimate lhs_direct(const SynchronizedForm& form, const LhsBudget& budget) {
  require(form.eps > 0.0, Errc::invalid_argument, "epsilon must be positive");
  require(budget.replicates >= 2 && budget.sample_count >= budget.replicates, Errc::invalid_argument,
          "need at least two replicates and one sample per replicate");
  if (form.f.is_zero || form.g.is_zero) return {};
  const auto& dx = form.phi.domain();
  const auto& dy = form.psi.domain();
  const int nx = dx.dimension(), ny = dy.dimension();
  const std::size_t dim = static_cast<std::size_t>(nx + ny);
  const double box = dx.bounding_box_volume() * dy.bounding_box_volume();
  const double acceptance = dx.volume() * dy.volume() / box;
  const auto per = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(budget.sample_count / budget.replicates) / acceptance));
  std::vector<cdouble> means(budget.replicates);
  parallel_for(budget.replicates, [&](std::size_t rep) {
    HaltonSequence seq(dim, mix_seed(budget.seed) ^ mix_seed(rep + 0x51ed));
    std::vector<double> u(dim), x(static_cast<std::size_t>(nx)), y(static_cast<std::size_t>(ny));
    cdouble sum{};
    for (std::uint64_t i = 0; i < per; ++i) {
      seq.point(i, u);
      for (int k = 0; k < nx; ++k) {
        const auto b = dx.axis_bounds(k);
        x[static_cast<std::size_t>(k)] = b.lo + b.length() * u[static_cast<std::size_t>(k)];
      }
      for (int k = 0; k < ny; ++k) {
        const auto b = dy.axis_bounds(k);
        y[static_cast<std::size_t>(k)] = b.lo + b.length() * u[static_cast<std::size_t>(nx + k)];
      }
      if (!dx.contains(x) || !dy.contains(y)) continue;
      const double s = form.phi.value_unchecked(x);
      const double t = form.psi.value_unchecked(y);
      if (std::abs(s - t) <= form.eps) continue;
      sum += form.kernel(s, t) * form.f(y) * form.g(x);
    }
    means[rep] = box * sum / static_cast<double>(per);
  });
  std::vector<double> re(means.size()), im(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    re[i] = means[i].real();
    im[i] = means[i].imag();
  }
  const auto er = combine_replicates(re);
  const auto ei = combine_replicates(im);
  return {{er.value, ei.value}, std::hypot(er.stderr, ei.stderr)};
}

struct RhsEstimate {
  cdouble value{};
  double discretization = 0.0;  // |rhs_N - rhs_{N/2}|
  cdouble coarse{};
};

namespace detail {

/// Bin averages of w_{theta,h}: closed form (h = 1, or radial h on a radial
/// phase, where w_{theta,h}(t) = w_theta(t) G(r_theta(t))) or coarea fibers.
inline GridFunction1D level_density(const Phase& phase, const Field& h, const LevelGrid& grid, Method method,
                                    std::size_t fiber_nodes) {
  GridFunction1D W(grid.t_min, grid.t_max, grid.bin_count);
  std::vector<double> vals;
  if (method == Method::ClosedForm) {
    require(has_closed_form(phase), Errc::no_density_method, "phase " + phase.name() + " has no closed form");
    if (h.is_one) {
      vals = bin_averages(phase, grid, [&](double t) { return density_closed_form(phase, t); });
    } else {
      require(static_cast<bool>(h.radial) && phase.is_radial(), Errc::no_density_method,
              "closed-form weighted densities need radial data on a radial phase");
      vals = bin_averages(phase, grid, [&](double t) {
        const double w = density_closed_form(phase, t);
        if (w == 0.0) return 0.0;
        return w * h.radial(radial_level(phase, t)->r);
      });
    }
  } else if (method == Method::Coarea) {
    require(has_parametrization(phase), Errc::no_density_method, "phase " + phase.name() + " has no fiber parametrization");
    vals = weighted_density_grid_coarea(phase, h, grid, fiber_nodes).values;
  } else {
    fail(Errc::no_density_method, "reduced quadrature needs a deterministic density method");
  }
  for (std::size_t i = 0; i < vals.size(); ++i) W[i] = vals[i];
  return W;
}

template <Kernel1D K>
cdouble reduced_quadrature(const K& k, const GridFunction1D& Wg, const GridFunction1D& Wf, double eps) {
  cdouble total{};
  for (std::size_t i = 0; i < Wg.size(); ++i) {
    if (Wg[i] == cdouble{}) continue;
    total += Wg[i] * truncation_at(k, Wf, eps, Wg.node(i), Truncation::Hard);
  }
  return total * Wg.spacing();
}

}  // namespace detail

struct RhsBudget {
  std::size_t bins_x = 512;
  std::size_t bins_y = 512;
  Method method = Method::ClosedForm;
  std::size_t fiber_nodes = 256;
};

/// int int_{|s-t|>eps} k(s,t) w_{psi,f}(t) w_{phi,g}(s) dt ds on level grids,
/// with the error estimated from the run at half resolution.
inline RhsEstimate rhs_reduced(const SynchronizedForm& form, const RhsBudget& b) {
  require(form.eps > 0.0, Errc::invalid_argument, "epsilon must be positive");
  if (form.f.is_zero || form.g.is_zero) return {};
  const auto ix = form.phi.image();
  const auto iy = form.psi.image();
  auto run = [&](std::size_t nx, std::size_t ny) {
    const LevelGrid gx(ix.lo, ix.hi, nx);
    const LevelGrid gy(iy.lo, iy.hi, ny);
    const auto Wg = detail::level_density(form.phi, form.g, gx, b.method, b.fiber_nodes);
    const auto Wf = detail::level_density(form.psi, form.f, gy, b.method, b.fiber_nodes);
    return detail::reduced_quadrature(form.kernel, Wg, Wf, form.eps);
  };
  RhsEstimate r;
  r.value = run(b.bins_x, b.bins_y);
  r.coarse = run(b.bins_x / 2, b.bins_y / 2);
  r.discretization = std::abs(r.value - r.coarse);
  return r;
}

struct ReductionReport {
  ComplexEstimate lhs;
  RhsEstimate rhs;
  double abs_discrepancy = 0.0;
  double relative_discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  LhsBudget lhs_budget;
  RhsBudget rhs_budget;
};

inline double relative_discrepancy(cdouble a, cdouble b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Pass when |lhs - rhs| <= max(3 stderr(lhs) + discretization(rhs), rel_floor * scale),
/// scale = max(|lhs|, |rhs|).
inline ReductionReport verify_reduction_identity(const SynchronizedForm& form, const LhsBudget& lb, const RhsBudget& rb,
                                                 double rel_floor = 0.01) {
  ReductionReport rep;
  rep.lhs_budget = lb;
  rep.rhs_budget = rb;
  rep.lhs = lhs_direct(form, lb);
  rep.rhs = rhs_reduced(form, rb);
  rep.abs_discrepancy = std::abs(rep.lhs.value - rep.rhs.value);
  rep.relative_discrepancy = relative_discrepancy(rep.lhs.value, rep.rhs.value);
  rep.tolerance = std::max(3.0 * rep.lhs.stderr + rep.rhs.discretization,
                           rel_floor * std::max(std::abs(rep.lhs.value), std::abs(rep.rhs.value)));
  rep.pass = rep.abs_discrepancy <= rep.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Benchmark forms

/// Linear phases on B(0,1) in R^2, f = 1_{y1 > 0}, g = 1.
inline SynchronizedForm linear_benchmark(double eps) {
  const auto D = Domain::ball(2, 1.0);
  SynchronizedForm form{Phase::linear(D), Phase::linear(D)};
  form.f = Field::of([](std::span<const double> y) { return y[0] > 0.0 ? 1.0 : 0.0; });
  form.eps = eps;
  return form;
}

/// |x|^2 on B(0,1) in R^2 for both phases; radial data f = 1 - r^2, g = 1 + r.
inline SynchronizedForm radial_quadratic_benchmark(double eps) {
  const auto D = Domain::ball(2, 1.0);
  SynchronizedForm form{Phase::radial_quadratic(D), Phase::radial_quadratic(D)};
  form.f = Field::radial_profile([](double r) { return 1.0 - r * r; });
  form.g = Field::radial_profile([](double r) { return 1.0 + r; });
  form.eps = eps;
  return form;
}

/// |x|^4 on B(0,1) in R^2 for both phases; radial data f = cos(2r), g = r.
inline SynchronizedForm radial_power_benchmark(double eps) {
  const auto D = Domain::ball(2, 1.0);
  SynchronizedForm form{Phase::radial_power(D, 4.0), Phase::radial_power(D, 4.0)};
  form.f = Field::radial_profile([](double r) { return std::cos(2.0 * r); });
  form.g = Field::radial_profile([](double r) { return r; });
  form.eps = eps;
  return form;
}

}  // namespace coarea
