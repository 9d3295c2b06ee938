#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "pwts/combinatorics.hpp"
#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/lad_lasso.hpp"
#include "pwts/parallel.hpp"
#include "pwts/rng.hpp"

namespace pwts {

struct CandidateConfig {
  std::size_t subset_size = 2;
  double lambda = 0.0;
  double scale = 1.0;
  std::size_t budget = 200000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Exact fits need k+1 points; a penalized fit gets two points of slack.
inline std::size_t default_subset_size(std::size_t explanatory, double lambda) {
  return lambda == 0.0 ? explanatory + 1 : explanatory + 3;
}

/// One candidate solution, materialized. CandidateSet stores these column-wise.
struct CandidateSolution {
  std::vector<std::size_t> subset;
  Hyperplane plane;
  std::vector<double> angles;
  double objective = 0.0;
};

class CandidateSet {
 public:
  CandidateSet() = default;
  CandidateSet(std::size_t subset_size, std::size_t explanatory)
      : subset_size_(subset_size), explanatory_(explanatory) {}

  std::size_t size() const noexcept { return objectives_.size(); }
  bool empty() const noexcept { return objectives_.empty(); }
  std::size_t subset_size() const noexcept { return subset_size_; }
  std::size_t explanatory() const noexcept { return explanatory_; }

  std::span<const std::size_t> subset(std::size_t i) const noexcept {
    return {subsets_.data() + i * subset_size_, subset_size_};
  }
  double intercept(std::size_t i) const noexcept { return intercepts_[i]; }
  std::span<const double> slopes(std::size_t i) const noexcept {
    return {slopes_.data() + i * explanatory_, explanatory_};
  }
  /// atan of slope j for candidate i; `axis` is 0-based here.
  double angle(std::size_t i, std::size_t axis) const noexcept { return angles_[i * explanatory_ + axis]; }
  std::span<const double> angles(std::size_t i) const noexcept {
    return {angles_.data() + i * explanatory_, explanatory_};
  }
  double objective(std::size_t i) const noexcept { return objectives_[i]; }

  CandidateSolution at(std::size_t i) const {
    CandidateSolution c;
    c.subset.assign(subset(i).begin(), subset(i).end());
    c.plane.intercept = intercept(i);
    c.plane.slopes.assign(slopes(i).begin(), slopes(i).end());
    c.angles.assign(angles(i).begin(), angles(i).end());
    c.objective = objective(i);
    return c;
  }

  void push(std::span<const std::size_t> subset, const Hyperplane& plane, double objective) {
    subsets_.insert(subsets_.end(), subset.begin(), subset.end());
    intercepts_.push_back(plane.intercept);
    for (double b : plane.slopes) {
      slopes_.push_back(b);
      angles_.push_back(std::atan(b));
    }
    objectives_.push_back(objective);
  }

  void push_from(const CandidateSet& other, std::size_t i) {
    const auto sub = other.subset(i);
    subsets_.insert(subsets_.end(), sub.begin(), sub.end());
    intercepts_.push_back(other.intercept(i));
    const auto sl = other.slopes(i);
    slopes_.insert(slopes_.end(), sl.begin(), sl.end());
    const auto an = other.angles(i);
    angles_.insert(angles_.end(), an.begin(), an.end());
    objectives_.push_back(other.objective(i));
  }

  void append(const CandidateSet& other) {
    subsets_.insert(subsets_.end(), other.subsets_.begin(), other.subsets_.end());
    intercepts_.insert(intercepts_.end(), other.intercepts_.begin(), other.intercepts_.end());
    slopes_.insert(slopes_.end(), other.slopes_.begin(), other.slopes_.end());
    angles_.insert(angles_.end(), other.angles_.begin(), other.angles_.end());
    objectives_.insert(objectives_.end(), other.objectives_.begin(), other.objectives_.end());
    degenerate_count += other.degenerate_count;
  }

  /// Subsets whose solver call failed and were skipped.
  std::size_t degenerate_count = 0;
  /// True when subsets were drawn at random because C(m, s) exceeded the budget.
  bool sampled = false;

 private:
  std::size_t subset_size_ = 0;
  std::size_t explanatory_ = 0;
  std::vector<std::size_t> subsets_;
  std::vector<double> intercepts_;
  std::vector<double> slopes_;
  std::vector<double> angles_;
  std::vector<double> objectives_;
};

inline void validate(const CandidateConfig& cfg, std::size_t points, std::size_t explanatory) {
  if (cfg.subset_size < explanatory + 1 || cfg.subset_size > points)
    throw std::invalid_argument("subset size must lie in [k+1, m], got " + std::to_string(cfg.subset_size));
  if (!(cfg.scale > 0.0 && cfg.scale <= 1.0)) throw std::invalid_argument("scale must lie in (0, 1]");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (cfg.budget == 0) throw std::invalid_argument("subset budget must be positive");
}

/// Max pairwise distance over all k+1 normalized coordinates is at most scale * sqrt(k+1).
inline bool scale_admissible(const NormalizedTable& table, std::span<const std::size_t> subset, double scale) {
  if (scale >= 1.0) return true;
  const std::size_t cols = table.columns();
  const double limit = scale * scale * static_cast<double>(cols);
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const auto ra = table.row(subset[a]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const auto rb = table.row(subset[b]);
      double d2 = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double d = ra[c] - rb[c];
        d2 += d * d;
      }
      if (d2 > limit) return false;
    }
  }
  return true;
}

/// Subsets to fit, row-major with `s` indices each, in lexicographic order. Every subset
/// when C(m, s) <= budget; otherwise `budget` distinct subsets drawn uniformly (Floyd's
/// algorithm over lexicographic ranks, driven by a counter-based generator).
inline std::vector<std::size_t> select_subsets(std::size_t m, std::size_t s, std::size_t budget,
                                               std::uint64_t seed, bool* sampled = nullptr) {
  const auto total = binomial(m, s);
  std::vector<std::size_t> out;
  if (total && *total <= budget) {
    if (sampled) *sampled = false;
    out.reserve(*total * s);
    auto combo = first_combination(s);
    do out.insert(out.end(), combo.begin(), combo.end());
    while (next_combination(combo, m));
    return out;
  }
  if (!total) throw std::invalid_argument("subset space C(m, s) is too large to sample");
  if (sampled) *sampled = true;
  const std::uint64_t n = *total;
  CounterRng rng(seed, 0xC0FFEEu);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(budget * 2);
  for (std::uint64_t j = n - budget; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> ranks(chosen.begin(), chosen.end());
  std::sort(ranks.begin(), ranks.end());
  out.resize(ranks.size() * s);
  for (std::size_t i = 0; i < ranks.size(); ++i)
    unrank_combination(ranks[i], m, std::span<std::size_t>(out.data() + i * s, s));
  return out;
}

namespace detail {

inline CandidateSet solve_subsets(const NormalizedTable& table, std::span<const std::size_t> subsets,
                                  std::size_t s, double lambda, std::size_t threads) {
  const std::size_t k = table.explanatory();
  const std::size_t count = subsets.size() / s;
  constexpr std::size_t chunk = 2048;
  const std::size_t chunks = (count + chunk - 1) / chunk;
  std::vector<CandidateSet> parts(chunks, CandidateSet(s, k));
  parallel_for(chunks, threads, [&](std::size_t c) {
    LadLassoSolver solver;
    LadLassoProblem problem;
    problem.explanatory = k;
    problem.lambda = lambda;
    CandidateSet& part = parts[c];
    const std::size_t end = std::min(count, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      const auto sub = subsets.subspan(i * s, s);
      problem.points.clear();
      for (std::size_t p : sub) {
        const auto r = table.row(p);
        problem.points.insert(problem.points.end(), r.begin(), r.end());
      }
      try {
        const auto sol = solver.solve(problem);
        part.push(sub, sol.plane, sol.objective);
      } catch (const DegenerateProblem&) {
        ++part.degenerate_count;
      }
    }
  });
  CandidateSet out(s, k);
  for (const auto& part : parts) out.append(part);
  return out;
}

}  // namespace detail

/// Fits every selected subset regardless of scale. Restricting the pool with
/// restrict_to_scale gives the same list generate_candidates would for that scale.
inline CandidateSet generate_candidate_pool(const NormalizedTable& table, const CandidateConfig& cfg) {
  validate(cfg, table.points(), table.explanatory());
  bool sampled = false;
  const auto subsets = select_subsets(table.points(), cfg.subset_size, cfg.budget, cfg.seed, &sampled);
  auto out = detail::solve_subsets(table, subsets, cfg.subset_size, cfg.lambda, cfg.threads);
  out.sampled = sampled;
  return out;
}

inline CandidateSet restrict_to_scale(const CandidateSet& pool, const NormalizedTable& table, double scale) {
  if (scale >= 1.0) return pool;
  CandidateSet out(pool.subset_size(), pool.explanatory());
  out.sampled = pool.sampled;
  out.degenerate_count = pool.degenerate_count;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (scale_admissible(table, pool.subset(i), scale)) out.push_from(pool, i);
  return out;
}

/// Candidate solutions for every scale-admissible subset, sorted by subset.
/// Throws NoCandidates when nothing survives.
inline CandidateSet generate_candidates(const NormalizedTable& table, const CandidateConfig& cfg) {
  validate(cfg, table.points(), table.explanatory());
  bool sampled = false;
  auto subsets = select_subsets(table.points(), cfg.subset_size, cfg.budget, cfg.seed, &sampled);
  const std::size_t s = cfg.subset_size;
  if (cfg.scale < 1.0) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < subsets.size() / s; ++i) {
      const std::span<const std::size_t> sub(subsets.data() + i * s, s);
      if (!scale_admissible(table, sub, cfg.scale)) continue;
      std::copy(sub.begin(), sub.end(), subsets.begin() + kept * s);
      ++kept;
    }
    subsets.resize(kept * s);
  }
  auto out = detail::solve_subsets(table, subsets, s, cfg.lambda, cfg.threads);
  out.sampled = sampled;
  if (out.empty())
    throw NoCandidates("no scale-admissible, non-degenerate subsets at scale " + std::to_string(cfg.scale));
  return out;
}

}  // namespace pwts
