#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coarea/coarea.hpp"
#include "expect_errc.hpp"
#include "oracles.hpp"

using namespace coarea;

namespace {

GridFunction1D indicator(double a, double b, std::size_t cells, double lo, double hi) {
  return GridFunction1D::sample(a, b, cells, [&](double t) { return (t > lo && t < hi) ? 1.0 : 0.0; });
}

GridFunction1D random_grid(std::mt19937_64& rng, std::size_t cells, bool complex_values) {
  std::normal_distribution<double> Z(0.0, 1.0);
  std::bernoulli_distribution sparse(0.2);
  GridFunction1D F(0.0, 1.0, cells);
  // mixture of noise and a few spikes so the maximal function varies
  for (auto& v : F.values()) v = cdouble(Z(rng), complex_values ? Z(rng) : 0.0) * (sparse(rng) ? 6.0 : 1.0);
  return F;
}

}  // namespace

TEST(Kernel, HilbertConstants) {
  HilbertKernel k;
  EXPECT_DOUBLE_EQ(k.size_constant(), 1.0 / pi);
  EXPECT_NEAR(k.dini_integral(), 4.0 * std::log(2.0) / pi, 1e-12);
  EXPECT_NEAR(k(2.0, 1.0), 1.0 / pi, 1e-16);
  EXPECT_NEAR(k(1.0, 2.0), -1.0 / pi, 1e-16);
  const AnyKernel any = k;
  EXPECT_EQ(any.name(), "hilbert");
  EXPECT_EQ(any(0.5, 0.25), cdouble(k(0.5, 0.25)));
}

TEST(Kernel, Cutoffs) {
  SmoothstepCutoff sm;
  RampCutoff ramp;
  EXPECT_EQ(sm(0.5), 0.0);
  EXPECT_EQ(sm(1.0), 0.0);
  EXPECT_EQ(sm(2.0), 1.0);
  EXPECT_EQ(sm(3.0), 1.0);
  EXPECT_DOUBLE_EQ(sm(1.5), 0.5);
  EXPECT_DOUBLE_EQ(ramp(1.25), 0.25);
  // derivative bound of the smoothstep is attained at the midpoint
  EXPECT_NEAR((sm(1.5 + 1e-7) - sm(1.5 - 1e-7)) / 2e-7, sm.derivative_bound(), 1e-6);
}

TEST(Truncation, ClosedFormLogExample) {
  HilbertKernel k;
  const auto F = indicator(-4.0, 4.0, 1024, -1.0, 1.0);
  EXPECT_NEAR(hard_truncation_at(k, F, 0.5, 2.0).real(), std::log(3.0) / pi, 1e-5);
  EXPECT_NEAR(std::abs(hard_truncation_at(k, F, 0.5, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(truncation_at(k, F, 0.5, 0.0, Truncation::Smooth)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(truncation_at(k, F, 1.0, 0.0, Truncation::Smooth)), 0.0, 1e-15);
  const auto Z = F.like();
  EXPECT_EQ(hard_truncation(k, Z, 0.5).sup_norm(), 0.0);
}

TEST(Truncation, SecondOrderConvergence) {
  HilbertKernel k;
  const double exact = std::log(3.0) / pi;
  std::vector<double> lx, ly, w;
  for (std::size_t N : {256u, 512u, 1024u, 2048u}) {
    const auto F = indicator(-4.0, 4.0, N, -1.0, 1.0);
    const double err = std::abs(hard_truncation_at(k, F, 0.5, 2.0).real() - exact);
    lx.push_back(std::log(8.0 / N));
    ly.push_back(std::log(err));
    w.push_back(1.0);
  }
  EXPECT_NEAR(fit_line(lx, ly, w).slope, 2.0, 0.2);
}

TEST(Truncation, SmoothBelowHardAndMatchesSimpson) {
  HilbertKernel k;
  SmoothstepCutoff chi;
  const auto F = indicator(-4.0, 4.0, 2048, -1.0, 1.0);
  const double sm = truncation_at(k, F, 1.0, 2.0, Truncation::Smooth).real();
  const double hard = hard_truncation_at(k, F, 1.0, 2.0).real();
  EXPECT_GE(sm, 0.0);
  EXPECT_LT(sm, hard);
  EXPECT_LE(hard, std::log(3.0) / pi + 1e-5);
  auto integrand = [&](double t) { return chi(std::abs(2.0 - t)) / (pi * (2.0 - t)); };
  const double want = oracle::simpson(integrand, -1.0, 0.0) + oracle::simpson(integrand, 0.0, 1.0);
  EXPECT_NEAR(sm, want, 1e-5);
}

TEST(Truncation, ResidualVanishesOutsideAnnulusSupport) {
  HilbertKernel k;
  const auto F = indicator(-4.0, 4.0, 512, 1.5, 3.0);
  // s = 0, eps = 0.5: annulus 0.5 < |t| < 1 misses [1.5, 3]
  EXPECT_EQ(truncation_at(k, F, 0.5, 0.0, Truncation::Residual), cdouble{});
  EXPECT_NE(truncation_at(k, F, 1.0, 0.0, Truncation::Residual), cdouble{});
}

TEST(Truncation, HardEqualsSmoothPlusResidual) {
  HilbertKernel k;
  std::mt19937_64 rng(4);
  const auto F = random_grid(rng, 256, true);
  for (double eps : epsilon_ladder(2, 6)) {
    const auto H = hard_truncation(k, F, eps);
    const auto S = smooth_truncation(k, F, eps);
    const auto R = residual(k, F, eps);
    for (std::size_t i = 0; i < F.size(); ++i) EXPECT_NEAR(std::abs(H[i] - S[i] - R[i]), 0.0, 1e-12);
  }
}

TEST(Truncation, ResolutionGuard) {
  HilbertKernel k;
  const GridFunction1D F(0.0, 1.0, 64);
  EXPECT_ERRC(hard_truncation(k, F, 1.0 / 64.0), Errc::resolution_too_coarse);
  EXPECT_NO_THROW(hard_truncation(k, F, 2.0 / 64.0));
  EXPECT_ERRC(hard_truncation(k, F, -1.0), Errc::invalid_argument);
}

TEST(Maximal, TruncatedExamples) {
  HilbertKernel k;
  std::mt19937_64 rng(2);
  const auto F = random_grid(rng, 128, true);
  const double one[] = {0.125};
  const auto M = maximal_truncated(k, F, one);
  const auto H = hard_truncation(k, F, 0.125);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_DOUBLE_EQ(M[i].real(), std::abs(H[i]));
  const auto ladder = epsilon_ladder(2, 5);
  const auto Ml = maximal_truncated(k, F, ladder);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_GE(Ml[i].real(), M[i].real());
  EXPECT_EQ(maximal_truncated(k, F.like(), ladder).sup_norm(), 0.0);
  EXPECT_ERRC(maximal_truncated(k, F, std::span<const double>{}), Errc::empty_epsilon_set);
}

TEST(Maximal, HardyLittlewoodAgainstBruteForce) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto F = random_grid(rng, 64, trial % 2 == 1);
    std::vector<double> a;
    for (const auto& v : F.values()) a.push_back(std::abs(v));
    const auto want = oracle::brute_maximal(a);
    const auto got = hl_maximal(F);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(got[i].real(), want[i], 1e-12);
  }
}

TEST(Maximal, HardyLittlewoodExamples) {
  // F = 1_[0,1] on [0,4] with unit-aligned cells: for the cell ending at 2 the
  // best interval is [0,2], value 1/2
  const std::size_t N = 64;
  const auto F = indicator(0.0, 4.0, N, 0.0, 1.0);
  const auto M = hl_maximal(F);
  const double h = 4.0 / N;
  const std::size_t j = static_cast<std::size_t>(2.0 / h) - 1;
  EXPECT_NEAR(M[j].real(), 0.5, 1e-14);
  EXPECT_NEAR(M[j + 1].real(), 1.0 / (2.0 + h), 1e-14);
  const auto C = GridFunction1D::sample(0.0, 1.0, 32, [](double) { return 0.7; });
  const auto MC = hl_maximal(C);
  for (const auto& v : MC.values()) EXPECT_NEAR(v.real(), 0.7, 1e-14);
}

TEST(Bounds, ResidualAndCutoffPairDominatedByMaximal) {
  HilbertKernel k;
  const double bound = 4.0 * k.size_constant();
  std::mt19937_64 rng(31);
  std::size_t violations = 0, checks = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto F = random_grid(rng, 1024, trial % 2 == 0);
    const auto MF = hl_maximal(F);
    for (double eps : epsilon_ladder(2, 8)) {
      const auto R = residual(k, F, eps);
      const auto S1 = smooth_truncation(k, F, eps, SmoothstepCutoff{});
      const auto S2 = smooth_truncation(k, F, eps, RampCutoff{});
      for (std::size_t i = 0; i < F.size(); ++i) {
        const double lim = bound * MF[i].real() * (1 + 1e-12);
        violations += std::abs(R[i]) > lim;
        violations += std::abs(S1[i] - S2[i]) > lim;
        checks += 2;
      }
    }
  }
  EXPECT_EQ(violations, 0u) << "of " << checks;
}

TEST(Bounds, TruncatedOperatorNormIsUniformInEpsilon) {
  HilbertKernel k;
  const std::size_t N = 128;
  std::vector<double> norms;
  for (double eps : epsilon_ladder(2, 6)) {
    std::vector<std::vector<double>> A(N, std::vector<double>(N));
    for (std::size_t j = 0; j < N; ++j) {
      GridFunction1D e(0.0, 1.0, N);
      e[j] = 1.0 / std::sqrt(e.spacing());  // unit vector in L2
      const auto col = smooth_truncation(k, e, eps);
      for (std::size_t i = 0; i < N; ++i) A[i][j] = col[i].real() * std::sqrt(e.spacing());
    }
    norms.push_back(oracle::operator_norm(A));
  }
  // on a unit interval the large-eps truncations are small; the norms grow as
  // eps shrinks but stay below the untruncated Hilbert norm 1, with
  // shrinking increments
  for (std::size_t i = 1; i < norms.size(); ++i) {
    EXPECT_GE(norms[i], norms[i - 1]);
    EXPECT_LT(norms[i], 1.0);
    if (i >= 2) EXPECT_LT(norms[i] - norms[i - 1], norms[i - 1] - norms[i - 2]);
  }
  const auto rep = verify_hk_package(k, 20000, 3);
  EXPECT_LE(rep.l2_ratio, 1.5);
  EXPECT_GT(rep.l2_ratio, 0.1);
}

TEST(HkPackage, HilbertPasses) {
  HilbertKernel k;
  const auto rep = verify_hk_package(k, 200000, 1);
  EXPECT_TRUE(rep.size_ok);
  EXPECT_TRUE(rep.dini_ok);
  EXPECT_LE(rep.worst_size_ratio, 1.0 + 1e-12);
  EXPECT_GT(rep.worst_size_ratio, 0.999);
  EXPECT_LE(rep.worst_dini_ratio, 1.0 + 1e-12);
  EXPECT_TRUE(std::isfinite(rep.smoothed_dini_constant));
  EXPECT_GT(rep.smoothed_dini_constant, 0.0);
  EXPECT_EQ(rep.samples, 200000u);
}

namespace {
// 1/(s-t) with twice the Hilbert normalization but claiming C = 1/pi.
struct MislabelledKernel {
  double operator()(double s, double t) const { return 2.0 / (pi * (s - t)); }
  double size_constant() const { return 1.0 / pi; }
  double dini_modulus(double u) const { return 2.0 / pi * u / (1.0 - 0.5 * u); }
  double dini_integral() const { return 4.0 * std::log(2.0) / pi; }
  std::string name() const { return "mislabelled"; }
};
}  // namespace

TEST(HkPackage, DetectsWrongConstants) {
  const auto rep = verify_hk_package(MislabelledKernel{}, 1000, 1);
  EXPECT_FALSE(rep.size_ok);
  EXPECT_FALSE(rep.dini_ok);
}

TEST(GridFunction, PairingAndNorms) {
  auto F = GridFunction1D::sample(0.0, 1.0, 4, [](double) { return 2.0; });
  auto G = F.like();
  G[0] = cdouble(0.0, 1.0);
  EXPECT_EQ(pairing(F, G), cdouble(0.0, 0.5));  // no conjugation
  EXPECT_DOUBLE_EQ(F.l2_norm(), 2.0);
  EXPECT_DOUBLE_EQ(F.lr_norm(1.0), 2.0);
  EXPECT_DOUBLE_EQ(F.sup_norm(), 2.0);
  EXPECT_THROW(pairing(F, GridFunction1D(0.0, 2.0, 4)), Error);
  EXPECT_EQ(epsilon_ladder(2, 4), (std::vector<double>{0.25, 0.125, 0.0625}));
}
