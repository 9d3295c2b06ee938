#pragma once

// Randomized property suites. Each returns how many cases ran and the first failure, so
// the Catch2 runner and the acceptance report share one implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pwts/candidates.hpp"
#include "pwts/clustering.hpp"
#include "pwts/grid_search.hpp"
#include "pwts/lad_lasso.hpp"
#include "pwts/mode_affinity.hpp"
#include "pwts/piecewise_fit.hpp"
#include "support.hpp"

namespace pwts::test {

struct PropertyOutcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = "case " + std::to_string(cases) + ": " + why;
  }
  bool ok() const { return failures == 0; }

  // skipped cases leave `pending` false and are not counted
  bool pending = false;
  void begin() { pending = true; }
  void next() {
    if (pending) ++cases;
    pending = false;
  }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> subsets_of(const CandidateSet& c) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c.subset(i).begin(), c.subset(i).end());
  return out;
}

inline CandidateSet candidates_or_empty(const NormalizedTable& t, const CandidateConfig& cc) {
  try {
    return generate_candidates(t, cc);
  } catch (const NoCandidates&) {
    return CandidateSet(cc.subset_size, t.explanatory());
  }
}

inline bool is_partition(const Clustering& c, std::size_t m, std::string& why) {
  std::vector<int> seen(m, 0);
  for (std::size_t id = 0; id < c.clusters.size(); ++id) {
    if (c.clusters[id].empty()) return why = "empty cluster", false;
    if (!std::is_sorted(c.clusters[id].begin(), c.clusters[id].end())) return why = "unsorted cluster", false;
    for (std::size_t p : c.clusters[id]) {
      if (p >= m || seen[p]++) return why = "point lost or duplicated", false;
      if (c.labels.at(p) != id) return why = "label disagrees with cluster list", false;
    }
  }
  for (int s : seen)
    if (s != 1) return why = "point missing", false;
  std::vector<std::size_t> order;
  for (const auto& g : c.clusters) order.insert(order.end(), g.begin(), g.end());
  if (order != c.display_order) return why = "display order is not the cluster concatenation", false;
  for (std::size_t i = 1; i < c.clusters.size(); ++i)
    if (c.clusters[i - 1].size() < c.clusters[i].size()) return why = "clusters not in decreasing size", false;
  return true;
}

/// Random affinity counts: a few dense blocks plus sparse noise.
inline AffinityMatrix random_affinity(Gen& gen, std::size_t m) {
  AffinityMatrix a(m);
  const auto perm = gen.permutation(m);
  const std::size_t blocks = 1 + gen.index(4);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool same = perm[i] % blocks == perm[j] % blocks;
      if (gen.uniform() < (same ? 0.8 : 0.05)) a.add_pair(i, j, 1 + gen.index(5));
    }
  return a;
}

}  // namespace detail

inline PropertyOutcome prop_affinity_symmetry(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"affinity symmetric with zero diagonal, entries witnessed"};
  Gen gen(seed, 101);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    const std::size_t k = 1 + gen.index(2), m = k + 3 + gen.index(9);
    const auto t = normalize(gen.table(m, k));
    CandidateConfig cc;
    cc.subset_size = k + 1 + gen.index(2);
    cc.scale = gen.uniform(0.3, 1.0);
    cc.lambda = gen.index(2) ? 0.0 : 0.1;
    const auto cands = detail::candidates_or_empty(t, cc);
    if (cands.empty()) continue;
    out.begin();
    const std::size_t bins = 2 + gen.index(47), axis = 1 + gen.index(k);
    const auto modes = detect_point_modes(cands, axis, bins, m);
    const auto a = accumulate_affinity(modes, cands, m);
    for (const auto& pm : modes) {
      if (pm.supporters.empty()) out.fail("point mode without supporters");
      for (std::size_t c : pm.supporters) {
        const auto sub = cands.subset(c);
        if (std::find(sub.begin(), sub.end(), pm.point) == sub.end()) out.fail("supporter misses its point");
        if (angle_bin(cands.angle(c, axis - 1), bins) != pm.mode_bin) out.fail("supporter outside the mode bin");
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (a.at(i, i) != 0) out.fail("non-zero diagonal");
      for (std::size_t j = 0; j < m; ++j) {
        if (a.at(i, j) != a.at(j, i)) out.fail("asymmetric entry");
        if (i == j || a.at(i, j) == 0) continue;
        bool witnessed = false;
        for (std::size_t c = 0; c < cands.size() && !witnessed; ++c) {
          const auto sub = cands.subset(c);
          witnessed = std::find(sub.begin(), sub.end(), i) != sub.end() && std::find(sub.begin(), sub.end(), j) != sub.end();
        }
        if (!witnessed) out.fail("positive entry without a witness candidate");
      }
    }
  }
  return out;
}

inline PropertyOutcome prop_clustering_partition(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"clustering partitions points; pruneMerge idempotent and monotone"};
  Gen gen(seed, 102);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    const std::size_t m = 1 + gen.index(40);
    const auto a = detail::random_affinity(gen, m);
    const auto rule = gen.index(2) ? OverlapRule::EitherRow : OverlapRule::BothRows;
    const auto bin = BinarizedAffinity::from_counts(a);
    const auto grown = seed_grow(bin, rule);
    const auto merged = prune_merge(grown, a, rule);
    std::string why;
    if (!detail::is_partition(grown, m, why)) out.fail("seed_grow: " + why);
    if (!detail::is_partition(merged, m, why)) out.fail("prune_merge: " + why);
    if (merged.count() > grown.count()) out.fail("merging increased the cluster count");
    if (!(prune_merge(merged, a, rule) == merged)) out.fail("prune_merge is not idempotent");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && same_cluster(bin, i, j, rule) != same_cluster(bin, j, i, rule)) out.fail("sameCluster asymmetric");
  }
  return out;
}

inline PropertyOutcome prop_permutation_equivariance(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"clustering permutation equivariance on block matrices"};
  Gen gen(seed, 103);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    // blocks of distinct sizes so seed selection never ties across blocks
    std::vector<std::size_t> sizes;
    std::set<std::size_t> used;
    const std::size_t blocks = 1 + gen.index(5);
    while (sizes.size() < blocks) {
      const std::size_t s = 1 + gen.index(9);
      if (used.insert(s).second) sizes.push_back(s);
    }
    std::size_t m = 0;
    std::vector<std::size_t> block_of;
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t i = 0; i < sizes[b]; ++i) block_of.push_back(b);
      m += sizes[b];
    }
    AffinityMatrix a(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (block_of[i] == block_of[j]) a.add_pair(i, j, 1 + gen.index(9));
    const auto perm = gen.permutation(m);  // new index of old point i is perm[i]
    AffinityMatrix b(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (a.at(i, j)) b.add_pair(perm[i], perm[j], a.at(i, j));
    const auto ca = prune_merge(seed_grow(BinarizedAffinity::from_counts(a)), a);
    const auto cb = prune_merge(seed_grow(BinarizedAffinity::from_counts(b)), b);
    std::vector<std::vector<std::size_t>> image;
    for (const auto& g : ca.clusters) {
      std::vector<std::size_t> mapped;
      for (std::size_t p : g) mapped.push_back(perm[p]);
      image.push_back(std::move(mapped));
    }
    if (!(make_clustering(image, m) == cb)) out.fail("permuted clustering differs from the image");
    if (ca.count() != blocks) out.fail("blocks not recovered");
  }
  return out;
}

inline PropertyOutcome prop_scale_monotonicity(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"scale filter monotone: candidates(s1) within candidates(s2) for s1 <= s2"};
  Gen gen(seed, 104);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    const std::size_t k = 1 + gen.index(2), m = k + 2 + gen.index(10);
    const auto t = normalize(gen.table(m, k));
    CandidateConfig cc;
    cc.subset_size = k + 1 + gen.index(2);
    double s1 = gen.uniform(0.05, 1.0), s2 = gen.uniform(0.05, 1.0);
    if (s1 > s2) std::swap(s1, s2);
    cc.scale = s1;
    const auto small = detail::subsets_of(detail::candidates_or_empty(t, cc));
    cc.scale = s2;
    const auto large = detail::subsets_of(detail::candidates_or_empty(t, cc));
    const std::set<std::vector<std::size_t>> big(large.begin(), large.end());
    for (const auto& s : small)
      if (!big.count(s)) out.fail("subset admitted at the smaller scale only");
    if (large.size() > *binomial(m, cc.subset_size)) out.fail("more candidates than subsets");
  }
  return out;
}

inline PropertyOutcome prop_bin_wrap(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"circular histogram wrap: bin(t) = bin(t + pi)"};
  Gen gen(seed, 105);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    const std::size_t bins = 2 + gen.index(200);
    const double theta = gen.uniform(-kPi / 2, kPi / 2);
    const std::size_t b = angle_bin(theta, bins);
    if (b >= bins) out.fail("bin out of range");
    if (angle_bin(theta + kPi, bins) != b) out.fail("bin(t + pi) differs");
    if (angle_bin(theta - kPi, bins) != b) out.fail("bin(t - pi) differs");
    // the bin's centre lies within half a width of theta, modulo pi
    double d = std::fmod(std::abs(theta - bin_center(b, bins)), kPi);
    d = std::min(d, kPi - d);
    if (d > kPi / static_cast<double>(bins) / 2 + 1e-12) out.fail("theta far from its bin centre");
  }
  return out;
}

inline PropertyOutcome prop_lambda_monotonicity(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"LAD-LASSO slope L1 norm non-increasing in lambda"};
  Gen gen(seed, 106);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    LadLassoProblem p;
    p.explanatory = 1 + gen.index(3);
    const std::size_t s = p.explanatory + 1 + gen.index(5);
    for (std::size_t i = 0; i < s * (p.explanatory + 1); ++i) p.points.push_back(gen.uniform());
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
      p.lambda = lambda;
      double l1 = 0;
      for (double b : solve_lad_lasso(p).plane.slopes) l1 += std::abs(b);
      if (l1 > previous + 1e-9) {
        std::ostringstream msg;
        msg << "|b|_1 rose to " << l1 << " from " << previous << " at lambda " << lambda;
        out.fail(msg.str());
      }
      previous = l1;
    }
  }
  return out;
}

inline PropertyOutcome prop_solver_optimality(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"LAD-LASSO optimum beats 1000 random challengers"};
  Gen gen(seed, 107);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    LadLassoProblem p;
    p.explanatory = 1 + gen.index(3);
    p.lambda = gen.index(3) == 0 ? 0.0 : gen.uniform(0, 1);
    const std::size_t s = p.explanatory + 1 + gen.index(4);
    for (std::size_t i = 0; i < s * (p.explanatory + 1); ++i) p.points.push_back(gen.uniform());
    const auto sol = solve_lad_lasso(p);
    for (int c = 0; c < 1000; ++c) {
      Hyperplane h{sol.plane.intercept + 0.1 * gen.normal(), sol.plane.slopes, Space::Normalized};
      for (double& b : h.slopes) b += (c % 2 ? 0.01 : 1.0) * gen.normal();
      if (lad_objective(p, h) < sol.objective - 1e-9) {
        out.fail("challenger has a lower objective");
        break;
      }
    }
  }
  return out;
}

inline PropertyOutcome prop_parallel_bit_exact(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"grid results bit-identical for 1 and 4 threads"};
  Gen gen(seed, 108);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    const std::size_t k = 1 + gen.index(2), m = k + 4 + gen.index(8);
    const auto data = gen.table(m, k);
    GridConfig g;
    g.scale_steps = {0.5, 1.0};
    g.precision_steps = {12, 24};
    g.parsimony_steps = {0.0, 0.1};
    g.budget = 20 + gen.index(40);
    g.seed = gen.index(1000);
    g.threads = 1;
    AnalysisResult a, b;
    try {
      a = run_grid(data, g);
    } catch (const AllInfeasible&) {
      continue;
    }
    out.begin();
    g.threads = 4;
    b = run_grid(data, g);
    if (a.best != b.best) out.fail("best cell differs");
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      const auto &x = a.cells[i], &y = b.cells[i];
      if (std::memcmp(&x.quality, &y.quality, sizeof(double)) != 0) out.fail("quality bits differ");
      if (!(x.clustering == y.clustering)) out.fail("clustering differs");
      if ((x.affinity == nullptr) != (y.affinity == nullptr) || (x.affinity && !(*x.affinity == *y.affinity)))
        out.fail("affinity differs");
      for (std::size_t f = 0; f < x.fit.fits.size(); ++f)
        if (!(x.fit.fits[f].plane == y.fit.fits[f].plane)) out.fail("fit differs");
    }
  }
  return out;
}

inline PropertyOutcome prop_denormalization(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"normalize in [0,1], round-trips, and denormalized fits agree on raw rows"};
  Gen gen(seed, 109);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    const std::size_t k = 1 + gen.index(3), m = k + 2 + gen.index(15);
    auto raw = gen.table(m, k);
    if (gen.index(4) == 0) {  // a constant column now and then
      std::vector<double> cells = raw.cells();
      const std::size_t col = gen.index(k + 1);
      for (std::size_t i = 0; i < m; ++i) cells[i * (k + 1) + col] = 4.25;
      raw = DataTable(raw.column_names(), cells);
    }
    const auto t = normalize(raw);
    for (double v : t.cells())
      if (!(v >= 0.0 && v <= 1.0)) out.fail("normalized cell outside [0,1]");
    const auto back = denormalize(t);
    for (std::size_t i = 0; i < raw.cells().size(); ++i)
      if (std::abs(back.cells()[i] - raw.cells()[i]) > 1e-12 * std::max(1.0, std::abs(raw.cells()[i])))
        out.fail("round trip error");
    if (!(parse_table(serialize_table(raw)) == raw)) out.fail("serialize/parse is not the identity");
    std::vector<std::size_t> members(m);
    for (std::size_t i = 0; i < m; ++i) members[i] = i;
    CandidateConfig cc;
    cc.subset_size = k + 1;
    const auto f = fit_cluster(t, members, cc, 12 + gen.index(40));
    for (std::size_t i = 0; i < m; ++i) {
      const double via_norm = t.params().inverse(k, f.plane_normalized.evaluate(t.row(i)));
      if (std::abs(f.plane.evaluate(raw.row(i)) - via_norm) > 1e-9 * std::max(1.0, std::abs(via_norm)))
        out.fail("denormalized plane disagrees");
    }
  }
  return out;
}

inline PropertyOutcome prop_quality_relabel(std::size_t cases, std::uint64_t seed = 1) {
  PropertyOutcome out{"Q invariant under point reordering and cluster relabelling"};
  Gen gen(seed, 110);
  for (std::size_t attempt = 0; out.cases < cases; out.next()) {
    if (attempt++ > 50 * cases) return out.fail("too few usable cases generated"), out;
    out.begin();
    const std::size_t m = 6 + gen.index(10);
    const auto raw = gen.table(m, 1);
    const auto t = normalize(raw);
    const std::size_t groups = 1 + gen.index(3);
    std::vector<std::vector<std::size_t>> parts(groups);
    for (std::size_t i = 0; i < m; ++i) parts[gen.index(groups)].push_back(i);
    const auto clustering = make_clustering(parts, m);
    CandidateConfig cc;
    cc.subset_size = 2;
    std::vector<ClusterFit> fits;
    for (const auto& g : clustering.clusters) fits.push_back(fit_cluster(t, g, cc, 24));
    const double q = evaluate_piecewise(t, clustering, fits).quality;

    // rows permuted; clusters carried along with their planes
    const auto perm = gen.permutation(m);
    std::vector<double> cells(raw.cells().size());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < 2; ++c) cells[perm[i] * 2 + c] = raw.at(i, c);
    const auto tp = normalize(DataTable(raw.column_names(), cells));
    std::vector<std::vector<std::size_t>> moved;
    for (const auto& g : clustering.clusters) {
      std::vector<std::size_t> mg;
      for (std::size_t p : g) mg.push_back(perm[p]);
      moved.push_back(mg);
    }
    const auto cp = make_clustering(moved, m);
    std::vector<ClusterFit> fp(cp.count());
    for (std::size_t c = 0; c < cp.count(); ++c)
      for (std::size_t d = 0; d < clustering.count(); ++d) {
        std::vector<std::size_t> mg;
        for (std::size_t p : clustering.clusters[d]) mg.push_back(perm[p]);
        std::sort(mg.begin(), mg.end());
        if (mg == cp.clusters[c]) fp[c] = fits[d];
      }
    const double qp = evaluate_piecewise(tp, cp, fp).quality;
    if (std::abs(q - qp) > 1e-12) out.fail("Q changed under reordering");
    if (q < 0) out.fail("negative Q");
  }
  return out;
}

inline std::vector<PropertyOutcome> all_properties(std::size_t cases = 100, std::uint64_t seed = 1) {
  return {prop_affinity_symmetry(cases, seed),     prop_clustering_partition(cases, seed),
          prop_permutation_equivariance(cases, seed), prop_scale_monotonicity(cases, seed),
          prop_bin_wrap(cases, seed),              prop_lambda_monotonicity(cases, seed),
          prop_solver_optimality(cases, seed),     prop_parallel_bit_exact(cases, seed),
          prop_denormalization(cases, seed),       prop_quality_relabel(cases, seed)};
}

}  // namespace pwts::test
