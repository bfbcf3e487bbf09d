#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "coarea/coarea.hpp"
#include "expect_errc.hpp"
#include "oracles.hpp"

using namespace coarea;

namespace {

GridFunction1D from_values(const std::vector<double>& v, double a = 0.0, double b = 1.0) {
  GridFunction1D F(a, b, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) F[i] = v[i];
  return F;
}

GridFunction1D random_bounded(std::mt19937_64& rng, std::size_t cells) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::bernoulli_distribution off(0.3);
  GridFunction1D F(0.0, 1.0, cells);
  for (auto& v : F.values()) v = off(rng) ? 0.0 : U(rng);
  return F;
}

std::set<std::pair<int, long>> member_set(const SparseFamily& f) {
  std::set<std::pair<int, long>> s;
  for (const auto& I : f.members) s.insert({I.generation, static_cast<long>(I.index)});
  return s;
}

SparseFamily hand_family(std::vector<DyadicInterval> members) {
  SparseFamily f;
  f.members = std::move(members);
  return f;
}

}  // namespace

TEST(Dyadic, IntervalArithmetic) {
  const DyadicInterval I{2, 1};
  EXPECT_DOUBLE_EQ(I.length(), 0.25);
  EXPECT_EQ(I.range_at(4), (std::pair<std::int64_t, std::int64_t>{4, 8}));
  EXPECT_TRUE(I.contains(DyadicInterval{3, 3}));
  EXPECT_FALSE(I.contains(DyadicInterval{3, 4}));
  EXPECT_FALSE(I.contains(DyadicInterval{1, 0}));
  EXPECT_EQ(I.child(1), (DyadicInterval{3, 3}));
  EXPECT_FALSE((DyadicInterval{1, 2}).valid());
}

TEST(Greedy, ConstantDataGivesRoot) {
  const auto F = GridFunction1D::sample(0.0, 1.0, 64, [](double) { return 3.0; });
  const auto fam = build_sparse_greedy(F, F, 4.0, 6);
  ASSERT_EQ(fam.members.size(), 1u);
  EXPECT_EQ(fam.members[0], (DyadicInterval{0, 0}));
  EXPECT_EQ(fam.eta, 1.0);
  EXPECT_EQ(union_measure(fam.carriers[0]), 64);
}

TEST(Greedy, Errors) {
  const GridFunction1D F(0.0, 1.0, 64), odd(0.0, 1.0, 48);
  EXPECT_ERRC(build_sparse_greedy(F, F, 1.0, 4), Errc::invalid_argument);
  EXPECT_ERRC(build_sparse_greedy(odd, odd, 4.0, 4), Errc::invalid_argument);
  EXPECT_ERRC(build_sparse_greedy(F, F, 4.0, 7), Errc::invalid_argument);
}

TEST(Greedy, EtaAtLeastHalfOnRandomPairs) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const auto F = random_bounded(rng, 1024), G = random_bounded(rng, 1024);
    const auto fam = build_sparse_greedy(F, G, 4.0, 10);
    EXPECT_GE(fam.eta, 0.5) << trial;
    EXPECT_DOUBLE_EQ(certify_carriers(fam), fam.eta);
    EXPECT_GE(verify_sparsity(fam), 0.5);
  }
}

TEST(Greedy, MatchesRecursiveReferenceOnEightCells) {
  // all F in {0,1,5}^8 against three choices of G
  const double vals[] = {0.0, 1.0, 5.0};
  std::size_t families = 0;
  double worst_eta = 1.0;
  for (int code = 0; code < 6561; ++code) {
    std::vector<double> f(8);
    int c = code;
    for (auto& v : f) {
      v = vals[c % 3];
      c /= 3;
    }
    std::vector<double> rev(f.rbegin(), f.rend());
    for (const auto& g : {std::vector<double>(8, 1.0), rev, std::vector<double>{0, 0, 0, 1, 0, 0, 0, 0}}) {
      const auto fam = build_sparse_greedy(from_values(f), from_values(g), 4.0, 3);
      std::set<std::pair<int, long>> want;
      oracle::stopping_reference(f, g, 4.0, 3, 0, 0, want);
      ASSERT_EQ(member_set(fam), want) << "code " << code;
      worst_eta = std::min(worst_eta, fam.eta);
      ++families;
    }
  }
  EXPECT_EQ(families, 3u * 6561u);
  EXPECT_GE(worst_eta, 0.5);
}

TEST(Verify, HandBuiltFamilies) {
  EXPECT_DOUBLE_EQ(verify_sparsity(hand_family({{0, 0}})), 1.0);
  EXPECT_DOUBLE_EQ(verify_sparsity(hand_family({{0, 0}, {1, 0}})), 0.5);
  std::vector<DyadicInterval> tree;
  for (int g = 0; g <= 3; ++g)
    for (std::int64_t i = 0; i < (1 << g); ++i) tree.push_back({g, i});
  EXPECT_DOUBLE_EQ(verify_sparsity(hand_family(tree)), 0.0);
  EXPECT_ERRC(verify_sparsity(hand_family({{0, 0}, {1, 5}})), Errc::non_dyadic_member);
}

TEST(SparseForm, Examples) {
  const auto one = GridFunction1D::sample(0.0, 1.0, 16, [](double) { return 1.0; });
  EXPECT_DOUBLE_EQ(sparse_form(hand_family({{0, 0}}), one, one), 1.0);
  // [0,1] and [0,1/2] with F = G = 1: 1 + 1/2
  EXPECT_DOUBLE_EQ(sparse_form(hand_family({{0, 0}, {1, 0}}), one, one), 1.5);
  EXPECT_ERRC(sparse_form(hand_family({{5, 0}}), one, one), Errc::non_dyadic_member);
}

TEST(SparseForm, LrBoundConstantGrowsAsEtaShrinks) {
  std::mt19937_64 rng(77);
  const double r = 2.0, rp = 2.0;
  std::vector<double> C, eta;
  std::vector<std::pair<GridFunction1D, GridFunction1D>> pairs;
  for (int i = 0; i < 50; ++i) pairs.emplace_back(random_bounded(rng, 1024), random_bounded(rng, 1024));
  for (double lambda : {2.0, 4.0, 16.0}) {
    double c = 0.0, e = 1.0;
    for (const auto& [F, G] : pairs) {
      const auto fam = build_sparse_greedy(F, G, lambda, 10);
      c = std::max(c, sparse_form(fam, F, G) / (F.lr_norm(r) * G.lr_norm(rp)));
      e = std::min(e, fam.eta);
    }
    C.push_back(c);
    eta.push_back(e);
  }
  EXPECT_LE(eta[0], eta[1]);
  EXPECT_LE(eta[1], eta[2]);
  EXPECT_GE(C[0], C[1]);
  EXPECT_GE(C[1], C[2]);
  for (double c : C) EXPECT_TRUE(std::isfinite(c));
}

TEST(Merge, EtaAtLeastHalfTheMinimum) {
  // the three-member union breaks canonical carriers: E_[0,1] would be empty
  SparseFamily a = hand_family({{0, 0}, {1, 0}});
  a.eta = verify_sparsity(a);
  SparseFamily b = hand_family({{0, 0}, {1, 1}});
  b.eta = verify_sparsity(b);
  const auto m = merge_families(a, b);
  EXPECT_EQ(m.members.size(), 3u);
  EXPECT_DOUBLE_EQ(verify_sparsity(m), 0.0);
  EXPECT_GE(m.eta, 0.5 * std::min(a.eta, b.eta));
  EXPECT_DOUBLE_EQ(certify_carriers(m), m.eta);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto F1 = random_bounded(rng, 512), G1 = random_bounded(rng, 512);
    const auto F2 = random_bounded(rng, 512), G2 = random_bounded(rng, 512);
    const auto f1 = build_sparse_greedy(F1, G1, 4.0, 9);
    const auto f2 = build_sparse_greedy(F2, G2, 4.0, 9);
    const auto mm = merge_families(f1, f2);
    EXPECT_GE(mm.eta, 0.5 * std::min(f1.eta, f2.eta)) << trial;
  }
}

TEST(Domination, IndicatorPairAndZero) {
  HilbertKernel k;
  // root [-1, 3] on 2^12 cells; F = G = 1_[0,1]
  const auto F = GridFunction1D::sample(-1.0, 3.0, 4096, [](double t) { return (t > 0 && t < 1) ? 1.0 : 0.0; });
  const auto res = domination_ratio(k, F, F, 0.125, 4.0, 12);
  EXPECT_LE(res.ratio, 10.0);
  EXPECT_GE(res.eta, 0.5);
  EXPECT_NEAR(res.lhs, 0.0, 1e-12);  // antisymmetric kernel on a symmetric pair
  const auto Z = F.like();
  EXPECT_EQ(domination_ratio(k, Z, F, 0.125, 4.0, 12).ratio, 0.0);
}

TEST(Domination, ZeroSparseFormWithNonzeroFormIsAnError) {
  HilbertKernel k;
  const auto F = GridFunction1D::sample(0.0, 1.0, 256, [](double t) { return t > 0.5 ? 1.0 : 0.0; });
  const auto G = GridFunction1D::sample(0.0, 1.0, 256, [](double t) { return t < 0.5 ? 1.0 : 0.0; });
  SparseFamily fam = hand_family({{1, 0}});
  EXPECT_ERRC(domination_ratio(k, F, G, 0.125, fam), Errc::zero_sparse_nonzero_lhs);
}

TEST(Domination, FiniteAcrossLadderAndReproducible) {
  HilbertKernel k;
  auto sweep = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> per_eps(7, 0.0);
    const auto ladder = epsilon_ladder(2, 8);
    for (int trial = 0; trial < 6; ++trial) {
      const auto F = random_bounded(rng, 1024), G = random_bounded(rng, 1024);
      const auto fam = build_sparse_greedy(F, G, 4.0, 10);
      for (std::size_t e = 0; e < ladder.size(); ++e)
        per_eps[e] = std::max(per_eps[e], domination_ratio(k, F, G, ladder[e], fam).ratio);
    }
    return per_eps;
  };
  const auto a = sweep(5), b = sweep(5);
  EXPECT_EQ(a, b);
  for (double v : a) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
}

TEST(DominationSweep, SmallSweepShapeAndDeterminism) {
  DominationSweepConfig cfg;
  cfg.length = 2.0;
  cfg.cells = 1024;
  cfg.depth = 10;
  cfg.trials = 3;
  cfg.k_max = 7;
  const auto a = domination_sweep(HilbertKernel{}, cfg);
  ASSERT_EQ(a.rows.size(), 3u * 6u);
  EXPECT_EQ(a.eps, epsilon_ladder(2, 7));
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].trial, i / 6);
    EXPECT_EQ(a.rows[i].eps, a.eps[i % 6]);
  }
  EXPECT_TRUE(a.all_finite);
  EXPECT_GE(a.min_eta, 0.5);
  EXPECT_EQ(a.max_ratio, *std::max_element(a.max_ratio_per_eps.begin(), a.max_ratio_per_eps.end()));
  const auto b = domination_sweep(HilbertKernel{}, cfg);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  cfg.seed = 2;
  EXPECT_NE(domination_sweep(HilbertKernel{}, cfg).max_ratio, a.max_ratio);
}

TEST(DominationSweep, ZeroDataAndErrors) {
  DominationSweepConfig cfg;
  cfg.length = 1.0;
  cfg.cells = 512;
  cfg.depth = 9;
  cfg.trials = 2;
  cfg.zero_data = true;
  const auto z = domination_sweep(HilbertKernel{}, cfg);
  for (const auto& r : z.rows) EXPECT_EQ(r.result.ratio, 0.0);
  EXPECT_EQ(z.max_ratio, 0.0);
  EXPECT_EQ(z.variation, 1.0);
  cfg.lambda = 1.0;
  EXPECT_ERRC(domination_sweep(HilbertKernel{}, cfg), Errc::invalid_argument);
}

TEST(DominationSweep, RandomStepDataIsBoundedAndPiecewiseConstant) {
  std::mt19937_64 rng(4);
  const auto F = random_bounded_grid(rng, 8.0, 4096, 8);
  std::size_t jumps = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    EXPECT_LE(std::abs(F[i]), 1.0);
    EXPECT_EQ(F[i].imag(), 0.0);
    if (i > 0 && F[i] != F[i - 1]) ++jumps;
  }
  EXPECT_LE(jumps, 7u);
}
