#include <gtest/gtest.h>

#include <cmath>

#include "coarea/coarea.hpp"
#include "expect_errc.hpp"
#include "oracles.hpp"

using namespace coarea;

namespace {

// Linear benchmark in level space with s = sin a, t = sin b, so the disk
// section lengths 2 sqrt(1 - s^2) become smooth: f = 1_{y1 > 0}, g = 1.
double linear_benchmark_oracle(double eps) {
  return oracle::truncated_double_integral(
      [](double a) { return std::sin(a); }, [](double s) { return std::asin(s); }, -pi / 2, pi / 2,
      [](double a) { return 2.0 * std::cos(a) * std::cos(a); }, [](double b) { return std::sin(b); }, 0.0, pi / 2,
      [](double b) { return 2.0 * std::cos(b) * std::cos(b); }, eps, 1200);
}

// Radial phases Phi(r) on the unit disk with radial data, in polar form:
// (2 pi)^2 int int k(Phi(rho), Phi(r)) F(r) G(rho) r rho dr drho.
double radial_oracle(double gamma, const std::function<double(double)>& F, const std::function<double(double)>& G,
                     double eps) {
  auto Phi = [gamma](double r) { return std::pow(r, gamma); };
  auto Phiinv = [gamma](double s) { return std::pow(std::max(s, 0.0), 1.0 / gamma); };
  // outer variable rho carries g on the phi side; the kernel is k(phi(x), psi(y)) = 1/(pi (Phi(rho) - Phi(r)))
  const double v = oracle::truncated_double_integral(
      Phi, Phiinv, 0.0, 1.0, [&](double rho) { return 2 * pi * rho * G(rho); }, Phi, 0.0, 1.0,
      [&](double r) { return 2 * pi * r * F(r); }, eps, 1200);
  return v;
}

}  // namespace

TEST(Lhs, ZeroDataGivesExactZero) {
  auto form = linear_benchmark(0.25);
  form.f = Field::zero();
  const auto e = lhs_direct(form, {10000, 8, 1});
  EXPECT_EQ(e.value, cdouble{});
  EXPECT_EQ(e.stderr, 0.0);
  const auto r = rhs_reduced(form, {});
  EXPECT_EQ(r.value, cdouble{});
  const auto rep = verify_reduction_identity(form, {10000, 8, 1}, {});
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.relative_discrepancy, 0.0);
}

TEST(Lhs, AntisymmetryCancelsIdenticalWeights) {
  const auto D = Domain::ball(2, 1.0);
  SynchronizedForm form{Phase::linear(D), Phase::linear(D)};
  form.f = Field::of([](std::span<const double> x) { return 1.0 + x[1] * x[1]; });
  form.g = form.f;
  form.eps = 0.125;
  const auto e = lhs_direct(form, {400'000, 16, 3});
  EXPECT_LE(std::abs(e.value), 3.0 * e.stderr + 1e-12);
  const auto r = rhs_reduced(form, {256, 256, Method::Coarea, 256});
  EXPECT_NEAR(std::abs(r.value), 0.0, 1e-10);
}

TEST(Lhs, DeterministicPerSeed) {
  const auto form = radial_quadratic_benchmark(0.25);
  const auto a = lhs_direct(form, {50'000, 8, 11});
  const auto b = lhs_direct(form, {50'000, 8, 11});
  const auto c = lhs_direct(form, {50'000, 8, 12});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr, b.stderr);
  EXPECT_NE(a.value, c.value);
}

TEST(Lhs, Errors) {
  auto form = linear_benchmark(0.0);
  EXPECT_ERRC(lhs_direct(form, {}), Errc::invalid_argument);
  EXPECT_ERRC(rhs_reduced(form, {}), Errc::invalid_argument);
  form.eps = 0.25;
  EXPECT_ERRC(lhs_direct(form, {10, 1, 1}), Errc::invalid_argument);
}

TEST(Rhs, MatchesLevelSpaceOracleOnLinearBenchmark) {
  for (double eps : {0.25, 0.125}) {
    const double want = linear_benchmark_oracle(eps);
    const auto r = rhs_reduced(linear_benchmark(eps), {512, 512, Method::Coarea, 256});
    EXPECT_NEAR(r.value.real(), want, 2e-4 * std::abs(want)) << eps;
    EXPECT_EQ(r.value.imag(), 0.0);
    EXPECT_LE(std::abs(r.value.real() - want), 2.0 * r.discretization + 1e-6) << eps;
  }
  EXPECT_NEAR(linear_benchmark_oracle(0.25), -1.0172445, 2e-6);
}

TEST(Rhs, DiscretizationShrinksWithResolution) {
  const auto form = linear_benchmark(0.25);
  const auto coarse = rhs_reduced(form, {128, 128, Method::Coarea, 256});
  const auto fine = rhs_reduced(form, {1024, 1024, Method::Coarea, 256});
  EXPECT_LT(fine.discretization, coarse.discretization);
  // N = 512 against N/2 = 256
  const auto mid = rhs_reduced(form, {512, 512, Method::Coarea, 256});
  EXPECT_LE(mid.discretization, 5e-3 * std::abs(mid.value));
}

TEST(Rhs, DensityMethodRequirements) {
  auto lin = linear_benchmark(0.25);
  EXPECT_ERRC(rhs_reduced(lin, {64, 64, Method::ClosedForm, 64}), Errc::no_density_method);
  EXPECT_ERRC(rhs_reduced(lin, {64, 64, Method::MonteCarlo, 64}), Errc::no_density_method);
  auto osc = lin;
  osc.psi = Phase::oscillatory(Domain::ball(2, 1.0), 0.5, 10.0);
  EXPECT_ERRC(rhs_reduced(osc, {64, 64, Method::Coarea, 64}), Errc::no_density_method);
}

TEST(Reduction, RadialBenchmarksAgainstPolarOracle) {
  struct Case {
    SynchronizedForm form;
    double gamma;
    std::function<double(double)> F, G;
  };
  const std::vector<Case> cases{
      {radial_quadratic_benchmark(0.25), 2.0, [](double r) { return 1 - r * r; }, [](double r) { return 1 + r; }},
      {radial_power_benchmark(0.25), 4.0, [](double r) { return std::cos(2 * r); }, [](double r) { return r; }}};
  for (const auto& c : cases) {
    const double want = radial_oracle(c.gamma, c.F, c.G, c.form.eps);
    const auto rhs = rhs_reduced(c.form, {});
    EXPECT_NEAR(rhs.value.real(), want, 1e-3 * std::abs(want)) << c.gamma;
    const auto lhs = lhs_direct(c.form, {1'000'000, 32, 1});
    EXPECT_NEAR(lhs.value.real(), want, std::max(3.0 * lhs.stderr, 1e-2 * std::abs(want))) << c.gamma;
  }
}

TEST(Reduction, IdentityHoldsOnAllBenchmarks) {
  for (double eps : {0.25, 0.125}) {
    for (const auto& [name, form, method] :
         {std::tuple{"linear", linear_benchmark(eps), Method::Coarea},
          std::tuple{"radial2", radial_quadratic_benchmark(eps), Method::ClosedForm},
          std::tuple{"radial-power4", radial_power_benchmark(eps), Method::ClosedForm}}) {
      const auto rep = verify_reduction_identity(form, {1'000'000, 32, 1}, {512, 512, method, 256});
      const double tol = std::max(3.0 * rep.lhs.stderr, 1e-2 * std::abs(rep.rhs.value));
      EXPECT_LE(rep.abs_discrepancy, tol) << name << " eps=" << eps;
      EXPECT_LE(rep.relative_discrepancy, 1e-2) << name << " eps=" << eps;
      EXPECT_TRUE(rep.pass) << name << " eps=" << eps;
    }
  }
}

TEST(Reduction, CoareaAndClosedFormRhsAgreeOnRadialData) {
  const auto form = radial_quadratic_benchmark(0.125);
  const auto a = rhs_reduced(form, {512, 512, Method::ClosedForm, 256});
  const auto b = rhs_reduced(form, {512, 512, Method::Coarea, 256});
  EXPECT_NEAR(std::abs(a.value - b.value), 0.0, 1e-3 * std::abs(a.value));
}

TEST(Reduction, RelativeDiscrepancyFloor) {
  EXPECT_EQ(relative_discrepancy(cdouble{}, cdouble{}), 0.0);
  EXPECT_NEAR(relative_discrepancy(cdouble{1.0}, cdouble{1.01}), 0.01 / 1.01, 1e-15);
}

TEST(Reduction, ToleranceRule) {
  const auto form = radial_quadratic_benchmark(0.25);
  const LhsBudget lb{100'000, 16, 2};
  const RhsBudget rb{256, 256, Method::ClosedForm, 256};
  const auto rep = verify_reduction_identity(form, lb, rb);
  const double stat = 3.0 * rep.lhs.stderr + rep.rhs.discretization;
  const double rel = 0.01 * std::max(std::abs(rep.lhs.value), std::abs(rep.rhs.value));
  EXPECT_DOUBLE_EQ(rep.tolerance, std::max(stat, rel));
  const auto strict = verify_reduction_identity(form, lb, rb, 0.0);
  EXPECT_DOUBLE_EQ(strict.tolerance, stat);
  EXPECT_EQ(strict.pass, strict.abs_discrepancy <= stat);
}
