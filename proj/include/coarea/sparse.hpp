#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "coarea/error.hpp"
#include "coarea/kernel.hpp"

namespace coarea {

/// [index 2^-g, (index + 1) 2^-g) relative to the root.
struct DyadicInterval {
  int generation = 0;
  std::int64_t index = 0;

  double length() const { return std::ldexp(1.0, -generation); }

  /// Integer range [lo, hi) at finer resolution `res` >= generation.
  std::pair<std::int64_t, std::int64_t> range_at(int res) const {
    const std::int64_t scale = std::int64_t{1} << (res - generation);
    return {index * scale, (index + 1) * scale};
  }

  bool contains(const DyadicInterval& o) const {
    if (o.generation < generation) return false;
    return (o.index >> (o.generation - generation)) == index;
  }
  DyadicInterval child(int side) const { return {generation + 1, 2 * index + side}; }

  bool valid() const { return generation >= 0 && generation < 62 && index >= 0 && index < (std::int64_t{1} << generation); }

  auto operator<=>(const DyadicInterval&) const = default;
};

/// Finite union of half-open integer ranges at a fixed dyadic resolution.
using DyadicUnion = std::vector<std::pair<std::int64_t, std::int64_t>>;

inline std::int64_t union_measure(const DyadicUnion& u) {
  std::int64_t m = 0;
  for (auto [lo, hi] : u) m += hi - lo;
  return m;
}

struct SparseFamily {
  Interval root{0.0, 1.0};
  std::vector<DyadicInterval> members;
  std::vector<DyadicUnion> carriers;  // parallel to members, units of 2^-resolution
  int resolution = 0;
  double eta = 1.0;
  double lambda = 4.0;
  int depth = 0;  // deepest member generation
  bool depth_exhausted = false;
};

namespace detail {

inline int log2_exact(std::size_t n) {
  require(n >= 1 && std::has_single_bit(n), Errc::invalid_argument, "sparse grids need a power-of-two cell count");
  return std::countr_zero(n);
}

/// prefix sums of |F| over cells
inline std::vector<double> abs_prefix(const GridFunction1D& F) {
  std::vector<double> P(F.size() + 1, 0.0);
  for (std::size_t j = 0; j < F.size(); ++j) P[j + 1] = P[j] + std::abs(F[j]);
  return P;
}

/// Mean of |F| over the cells of I (grid of 2^K cells on the root).
inline double dyadic_average(const std::vector<double>& P, int K, const DyadicInterval& I) {
  const auto [lo, hi] = I.range_at(K);
  return (P[static_cast<std::size_t>(hi)] - P[static_cast<std::size_t>(lo)]) / static_cast<double>(hi - lo);
}

/// Range minus a sorted set of disjoint subranges.
inline DyadicUnion subtract(std::pair<std::int64_t, std::int64_t> whole, DyadicUnion holes) {
  std::sort(holes.begin(), holes.end());
  DyadicUnion out;
  std::int64_t cur = whole.first;
  for (auto [lo, hi] : holes) {
    if (hi <= cur) continue;
    if (lo > cur) out.emplace_back(cur, std::min(lo, whole.second));
    cur = std::max(cur, hi);
    if (cur >= whole.second) break;
  }
  if (cur < whole.second) out.emplace_back(cur, whole.second);
  return out;
}

}  // namespace detail

/// Standard stopping time: every stopping interval I gets as new stopping
/// intervals its maximal dyadic descendants J with <|F|>_J > L <|F|>_I or
/// <|G|>_J > L <|G|>_I. Carriers are I minus its stopping children.
inline SparseFamily build_sparse_greedy(const GridFunction1D& F, const GridFunction1D& G, double lambda, int max_depth) {
  require(lambda > 1.0, Errc::invalid_argument, "stopping threshold must exceed 1");
  require(F.same_grid(G), Errc::invalid_argument, "F and G must share a grid");
  const int K = detail::log2_exact(F.size());
  require(max_depth >= 0 && max_depth <= K, Errc::invalid_argument, "max_depth exceeds grid resolution");
  const auto PF = detail::abs_prefix(F);
  const auto PG = detail::abs_prefix(G);

  SparseFamily fam;
  fam.root = {F.lower(), F.upper()};
  fam.lambda = lambda;
  fam.resolution = max_depth;

  std::vector<DyadicInterval> stack{{0, 0}};
  std::vector<std::vector<DyadicInterval>> stop_children;
  while (!stack.empty()) {
    const DyadicInterval I = stack.back();
    stack.pop_back();
    const double aF = detail::dyadic_average(PF, K, I);
    const double aG = detail::dyadic_average(PG, K, I);
    std::vector<DyadicInterval> stops;
    std::vector<DyadicInterval> search;
    if (I.generation < max_depth) search = {I.child(0), I.child(1)};
    while (!search.empty()) {
      const DyadicInterval J = search.back();
      search.pop_back();
      const bool stop = detail::dyadic_average(PF, K, J) > lambda * aF || detail::dyadic_average(PG, K, J) > lambda * aG;
      if (stop) {
        stops.push_back(J);
        if (J.generation == max_depth) fam.depth_exhausted = true;
      } else if (J.generation < max_depth) {
        search.push_back(J.child(0));
        search.push_back(J.child(1));
      }
    }
    fam.members.push_back(I);
    fam.depth = std::max(fam.depth, I.generation);
    DyadicUnion holes;
    for (const auto& J : stops) holes.push_back(J.range_at(max_depth));
    fam.carriers.push_back(detail::subtract(I.range_at(max_depth), holes));
    for (auto it = stops.rbegin(); it != stops.rend(); ++it) stack.push_back(*it);
  }
  // canonical order: by (generation, index)
  std::vector<std::size_t> order(fam.members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fam.members[a] < fam.members[b]; });
  SparseFamily sorted = fam;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.members[i] = fam.members[order[i]];
    sorted.carriers[i] = fam.carriers[order[i]];
  }
  fam = std::move(sorted);
  fam.eta = 1.0;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto [lo, hi] = fam.members[i].range_at(max_depth);
    fam.eta = std::min(fam.eta, static_cast<double>(union_measure(fam.carriers[i])) / static_cast<double>(hi - lo));
  }
  return fam;
}

/// Canonical carriers E_I = I minus the members strictly inside I; checks
/// dyadic validity and disjointness exactly, returns min |E_I| / |I|.
inline double verify_sparsity(const SparseFamily& fam) {
  int res = 0;
  for (const auto& I : fam.members) {
    require(I.valid(), Errc::non_dyadic_member, "member is not a dyadic subinterval of the root");
    res = std::max(res, I.generation);
  }
  std::set<DyadicInterval> uniq(fam.members.begin(), fam.members.end());
  std::vector<DyadicInterval> ms(uniq.begin(), uniq.end());
  std::vector<DyadicUnion> carriers;
  double eta = ms.empty() ? 0.0 : 1.0;
  for (const auto& I : ms) {
    DyadicUnion holes;
    for (const auto& J : ms)
      if (J != I && I.contains(J)) holes.push_back(J.range_at(res));
    auto E = detail::subtract(I.range_at(res), holes);
    const auto [lo, hi] = I.range_at(res);
    eta = std::min(eta, static_cast<double>(union_measure(E)) / static_cast<double>(hi - lo));
    carriers.push_back(std::move(E));
  }
  // pairwise disjointness by a sweep over all ranges
  DyadicUnion all;
  for (const auto& c : carriers) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i].first < all[i - 1].second) return 0.0;
  return eta;
}

/// Checks the stored carriers: inside their members, pairwise disjoint.
/// Returns min |E_I| / |I| (0 if the check fails).
inline double certify_carriers(const SparseFamily& fam) {
  if (fam.members.empty() || fam.members.size() != fam.carriers.size()) return 0.0;
  DyadicUnion all;
  double eta = 1.0;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto& I = fam.members[i];
    require(I.valid() && I.generation <= fam.resolution, Errc::non_dyadic_member, "member outside carrier resolution");
    const auto [lo, hi] = I.range_at(fam.resolution);
    for (auto [a, b] : fam.carriers[i]) {
      if (a < lo || b > hi || a >= b) return 0.0;
      all.emplace_back(a, b);
    }
    eta = std::min(eta, static_cast<double>(union_measure(fam.carriers[i])) / static_cast<double>(hi - lo));
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i].first < all[i - 1].second) return 0.0;
  return eta;
}

/// Union of two families sharing a root. The member union generally breaks
/// the canonical carriers, so carriers are reallocated bottom-up: each member,
/// deepest first, takes the leftmost free part of itself of measure
/// eta_target |I|, eta_target = min(eta1, eta2) / 2.
inline SparseFamily merge_families(const SparseFamily& a, const SparseFamily& b) {
  SparseFamily m;
  m.root = a.root;
  m.lambda = a.lambda;
  std::set<DyadicInterval> uniq(a.members.begin(), a.members.end());
  uniq.insert(b.members.begin(), b.members.end());
  m.members.assign(uniq.begin(), uniq.end());
  int gen = 0;
  for (const auto& I : m.members) gen = std::max(gen, I.generation);
  const double target = 0.5 * std::min(a.eta, b.eta);
  const int extra = std::max(1, static_cast<int>(std::ceil(-std::log2(std::max(target, 1e-6))))) + 1;
  m.resolution = gen + extra;
  m.depth = gen;
  m.depth_exhausted = a.depth_exhausted || b.depth_exhausted;

  std::vector<std::size_t> order(m.members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto x, auto y) { return m.members[x].generation > m.members[y].generation; });
  // free set as ordered map lo -> hi
  std::map<std::int64_t, std::int64_t> free{{0, std::int64_t{1} << m.resolution}};
  m.carriers.assign(m.members.size(), {});
  for (std::size_t idx : order) {
    const auto [lo, hi] = m.members[idx].range_at(m.resolution);
    auto need = static_cast<std::int64_t>(std::ceil(target * static_cast<double>(hi - lo) - 1e-9));
    auto it = free.upper_bound(lo);
    if (it != free.begin()) --it;
    DyadicUnion got;
    while (need > 0 && it != free.end() && it->first < hi) {
      const std::int64_t a0 = std::max(it->first, lo);
      const std::int64_t b0 = std::min(it->second, hi);
      if (b0 <= a0) {
        ++it;
        continue;
      }
      const std::int64_t take = std::min(need, b0 - a0);
      got.emplace_back(a0, a0 + take);
      need -= take;
      // carve [a0, a0 + take) out of the free range
      const std::int64_t flo = it->first, fhi = it->second;
      it = free.erase(it);
      if (flo < a0) free.emplace(flo, a0);
      if (a0 + take < fhi) it = free.emplace(a0 + take, fhi).first;
    }
    m.carriers[idx] = std::move(got);
  }
  m.eta = certify_carriers(m);
  return m;
}

/// sum over members of <|F|>_I <|G|>_I |I| (|I| in root units).
inline double sparse_form(const SparseFamily& fam, const GridFunction1D& F, const GridFunction1D& G) {
  require(F.same_grid(G), Errc::invalid_argument, "F and G must share a grid");
  const int K = detail::log2_exact(F.size());
  const auto PF = detail::abs_prefix(F);
  const auto PG = detail::abs_prefix(G);
  const double L = fam.root.length();
  double s = 0.0;
  for (const auto& I : fam.members) {
    require(I.valid() && I.generation <= K, Errc::non_dyadic_member, "member finer than the grid");
    s += detail::dyadic_average(PF, K, I) * detail::dyadic_average(PG, K, I) * I.length() * L;
  }
  return s;
}

struct DominationResult {
  double lhs = 0.0;
  double smooth = 0.0;    // |<T_eps,sm F, G>|
  double residual = 0.0;  // |<R_eps F, G>|
  double sparse_value = 0.0;
  double ratio = 0.0;
  double eta = 1.0;
  std::size_t members = 0;
};

/// Domination check against a precomputed family.
template <Kernel1D K, Cutoff C = SmoothstepCutoff>
DominationResult domination_ratio(const K& k, const GridFunction1D& F, const GridFunction1D& G, double eps,
                                  const SparseFamily& fam, const C& chi = C{}) {
  DominationResult r;
  const auto hard = hard_truncation(k, F, eps);
  const auto sm = smooth_truncation(k, F, eps, chi);
  r.lhs = std::abs(pairing(hard, G));
  r.smooth = std::abs(pairing(sm, G));
  GridFunction1D res = hard.like();
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = hard[i] - sm[i];
  r.residual = std::abs(pairing(res, G));
  r.sparse_value = sparse_form(fam, F, G);
  r.eta = fam.eta;
  r.members = fam.members.size();
  if (r.sparse_value == 0.0) {
    require(r.lhs <= 1e-300, Errc::zero_sparse_nonzero_lhs, "sparse form vanishes while the truncated form does not");
    r.ratio = 0.0;
  } else {
    r.ratio = r.lhs / r.sparse_value;
  }
  return r;
}

template <Kernel1D K, Cutoff C = SmoothstepCutoff>
DominationResult domination_ratio(const K& k, const GridFunction1D& F, const GridFunction1D& G, double eps,
                                  double lambda, int max_depth, const C& chi = C{}) {
  return domination_ratio(k, F, G, eps, build_sparse_greedy(F, G, lambda, max_depth), chi);
}

// ---------------------------------------------------------------------------
// Domination sweeps over random bounded data

struct DominationSweepConfig {
  double lambda = 4.0;
  double length = 8.0;  // root interval [0, length]
  std::size_t cells = 4096;
  int pieces = 8;  // steps per random datum
  int depth = 12;
  std::size_t trials = 20;
  int k_min = 2, k_max = 8;  // eps ladder 2^-k
  std::uint64_t seed = 1;
  bool zero_data = false;
};

struct DominationRow {
  std::size_t trial = 0;
  double eps = 0.0;
  DominationResult result;
};

struct DominationSweep {
  std::vector<DominationRow> rows;  // sorted by (trial, eps descending)
  std::vector<double> eps;
  std::vector<double> max_ratio_per_eps;
  double max_ratio = 0.0;
  double min_eta = 1.0;
  double variation = 1.0;  // max / min over the ladder of the per-eps max
  bool all_finite = true;
};

/// Random step function on [0, length]: `pieces` intervals with uniform random
/// breakpoints, each carrying a Uniform(-1, 1) value or (with probability 0.3) zero.
inline GridFunction1D random_bounded_grid(std::mt19937_64& rng, double length, std::size_t cells, int pieces = 16) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> P(0.0, length);
  std::bernoulli_distribution off(0.3);
  std::vector<double> breaks(static_cast<std::size_t>(pieces - 1));
  for (auto& b : breaks) b = P(rng);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> level(static_cast<std::size_t>(pieces));
  for (auto& v : level) v = off(rng) ? 0.0 : U(rng);
  GridFunction1D F(0.0, length, cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const auto j = std::upper_bound(breaks.begin(), breaks.end(), F.node(i)) - breaks.begin();
    F[i] = level[static_cast<std::size_t>(j)];
  }
  return F;
}

/// One greedy family per trial, reused across the ladder. Trial data come
/// from per-trial streams, so the result is independent of scheduling.
template <Kernel1D K, Cutoff C = SmoothstepCutoff>
DominationSweep domination_sweep(const K& k, const DominationSweepConfig& cfg, const C& chi = C{}) {
  require(cfg.lambda > 1.0, Errc::invalid_argument, "stopping threshold must exceed 1");
  require(cfg.trials >= 1, Errc::invalid_argument, "need at least one trial");
  require(cfg.length > 0.0 && cfg.pieces >= 1, Errc::invalid_argument, "bad random data shape");
  DominationSweep out;
  out.eps = epsilon_ladder(cfg.k_min, cfg.k_max);
  const std::size_t E = out.eps.size();
  std::vector<DominationRow> rows(cfg.trials * E);
  std::vector<double> etas(cfg.trials, 1.0);
  parallel_for(cfg.trials, [&](std::size_t trial) {
    std::mt19937_64 rng(mix_seed(cfg.seed) ^ mix_seed(trial + 0x5a5));
    GridFunction1D F(0.0, cfg.length, cfg.cells), G(0.0, cfg.length, cfg.cells);
    if (!cfg.zero_data) {
      F = random_bounded_grid(rng, cfg.length, cfg.cells, cfg.pieces);
      G = random_bounded_grid(rng, cfg.length, cfg.cells, cfg.pieces);
    }
    const auto fam = build_sparse_greedy(F, G, cfg.lambda, cfg.depth);
    etas[trial] = fam.eta;
    for (std::size_t e = 0; e < E; ++e) rows[trial * E + e] = {trial, out.eps[e], domination_ratio(k, F, G, out.eps[e], fam, chi)};
  });
  out.rows = std::move(rows);
  out.max_ratio_per_eps.assign(E, 0.0);
  for (const auto& r : out.rows) {
    const std::size_t e = static_cast<std::size_t>(&r - out.rows.data()) % E;
    if (!std::isfinite(r.result.ratio)) out.all_finite = false;
    out.max_ratio_per_eps[e] = std::max(out.max_ratio_per_eps[e], r.result.ratio);
    out.max_ratio = std::max(out.max_ratio, r.result.ratio);
  }
  for (double e : etas) out.min_eta = std::min(out.min_eta, e);
  const double lo = *std::min_element(out.max_ratio_per_eps.begin(), out.max_ratio_per_eps.end());
  out.variation = lo > 0.0 ? out.max_ratio / lo : (out.max_ratio == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace coarea
