#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pwts/candidates.hpp"
#include "pwts/clustering.hpp"
#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/mode_affinity.hpp"
#include "pwts/parallel.hpp"
#include "pwts/piecewise_fit.hpp"

namespace pwts {

struct HyperParams {
  std::size_t axis = 1;
  double scale = 1.0;
  std::size_t precision = 12;
  double parsimony = 0.0;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct GridConfig {
  std::vector<double> scale_steps{0.25, 0.5, 0.75, 1.0};
  std::vector<std::size_t> precision_steps{12, 24, 48};
  std::vector<double> parsimony_steps{0.0, 0.05, 0.2};
  /// Empty means every explanatory column.
  std::vector<std::size_t> axes;
  /// Zero picks default_subset_size(k, lambda) per parsimony step.
  std::size_t subset_size = 0;
  std::size_t budget = 200000;
  std::uint64_t seed = 0;
  /// Worker count; 0 uses the hardware concurrency. Never affects results.
  std::size_t threads = 0;
  OverlapRule rule = OverlapRule::EitherRow;
};

/// Two qualities within this distance are treated as equal by select_best. Exact fits
/// land on floating-point noise around 1e-16 per point rather than on zero.
inline constexpr double kQualityTie = 1e-9;

struct CellResult {
  HyperParams params;
  bool feasible = false;
  /// +inf when infeasible.
  double quality = std::numeric_limits<double>::infinity();
  std::size_t subset_size = 0;
  std::size_t candidate_count = 0;
  bool sampled = false;
  Clustering clustering;
  PiecewiseResult fit;
  std::shared_ptr<const AffinityMatrix> affinity;

  std::size_t cluster_count() const noexcept { return clustering.count(); }
};

struct Heatmap {
  std::size_t axis = 1;
  double parsimony = 0.0;
  /// values[scale index][precision index]
  std::vector<std::vector<double>> values;
};

struct AnalysisResult {
  GridConfig config;  // axes resolved
  std::vector<CellResult> cells;
  std::size_t best = 0;
  std::vector<Heatmap> heatmaps;

  const CellResult& best_cell() const { return cells.at(best); }

  const CellResult* find(const HyperParams& p) const {
    for (const auto& c : cells)
      if (c.params == p) return &c;
    return nullptr;
  }
};

/// Called after each finished cell with (cells done, cells total).
using ProgressCallback = std::function<void(std::size_t, std::size_t)>;

namespace detail {

template <class T>
void check_steps(const std::vector<T>& steps, const char* name) {
  if (steps.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (!(steps[i - 1] < steps[i])) throw ConfigError(std::string(name) + " must be strictly ascending");
}

}  // namespace detail

/// Checks the grid against a table with `explanatory` columns and fills in default axes.
inline GridConfig resolve_config(GridConfig cfg, std::size_t points, std::size_t explanatory) {
  if (cfg.axes.empty())
    for (std::size_t a = 1; a <= explanatory; ++a) cfg.axes.push_back(a);
  detail::check_steps(cfg.scale_steps, "scale steps");
  detail::check_steps(cfg.precision_steps, "precision steps");
  detail::check_steps(cfg.parsimony_steps, "parsimony steps");
  detail::check_steps(cfg.axes, "axes");
  for (double s : cfg.scale_steps)
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("scale steps must lie in (0, 1]");
  for (std::size_t b : cfg.precision_steps)
    if (b < 2) throw ConfigError("precision steps must be at least 2");
  for (double l : cfg.parsimony_steps)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("parsimony steps must be finite and >= 0");
  for (std::size_t a : cfg.axes)
    if (a < 1 || a > explanatory) throw ConfigError("axis " + std::to_string(a) + " is out of range");
  if (cfg.budget == 0) throw ConfigError("budget must be positive");
  if (cfg.subset_size != 0 && (cfg.subset_size < explanatory + 1 || cfg.subset_size > points))
    throw ConfigError("subset size must lie in [k+1, m]");
  return cfg;
}

inline std::size_t subset_size_for(const GridConfig& cfg, std::size_t points, std::size_t explanatory,
                                   double lambda) {
  if (cfg.subset_size != 0) return cfg.subset_size;
  return std::min(default_subset_size(explanatory, lambda), points);
}

/// argmin Q over feasible cells; near-ties (kQualityTie) prefer fewer clusters, larger
/// scale, smaller precision, smaller parsimony, then smaller axis.
inline std::size_t select_best(const std::vector<CellResult>& cells) {
  double q_min = std::numeric_limits<double>::infinity();
  for (const auto& c : cells)
    if (c.feasible) q_min = std::min(q_min, c.quality);
  if (!std::isfinite(q_min)) throw AllInfeasible();
  const auto key = [](const CellResult& c) {
    return std::make_tuple(c.cluster_count(), -c.params.scale, c.params.precision, c.params.parsimony,
                           c.params.axis);
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!c.feasible || c.quality > q_min + kQualityTie) continue;
    if (!best || key(c) < key(cells[*best])) best = i;
  }
  return *best;
}

/// Clusters and fits one cell given the scale-filtered candidates.
struct CellPipeline {
  const NormalizedTable& table;
  const GridConfig& cfg;

  struct FitKey {
    std::vector<std::size_t> members;
    double lambda;
    std::size_t bins;
    auto operator<=>(const FitKey&) const = default;
  };
  std::map<FitKey, ClusterFit> fit_cache;
  std::mutex cache_mutex;

  ClusterFit fit(const std::vector<std::size_t>& members, double lambda, std::size_t subset_size, std::size_t bins) {
    FitKey key{members, lambda, bins};
    {
      std::lock_guard lock(cache_mutex);
      if (auto it = fit_cache.find(key); it != fit_cache.end()) return it->second;
    }
    CandidateConfig cc;
    cc.subset_size = subset_size;
    cc.lambda = lambda;
    cc.budget = cfg.budget;
    cc.seed = cfg.seed;
    cc.threads = 1;
    ClusterFit f = fit_cluster(table, members, cc, bins);
    std::lock_guard lock(cache_mutex);
    fit_cache.emplace(std::move(key), f);
    return f;
  }

  CellResult run(const HyperParams& p, const CandidateSet& candidates, std::size_t subset_size) {
    CellResult cell;
    cell.params = p;
    cell.subset_size = subset_size;
    cell.candidate_count = candidates.size();
    cell.sampled = candidates.sampled;
    if (candidates.empty()) return cell;
    const std::size_t m = table.points();
    const auto modes = detect_point_modes(candidates, p.axis, p.precision, m);
    auto affinity = std::make_shared<AffinityMatrix>(accumulate_affinity(modes, candidates, m));
    const auto bin = BinarizedAffinity::from_counts(*affinity);
    cell.clustering = prune_merge(seed_grow(bin, cfg.rule), *affinity, cfg.rule);
    std::vector<ClusterFit> fits;
    fits.reserve(cell.clustering.count());
    for (const auto& members : cell.clustering.clusters) fits.push_back(fit(members, p.parsimony, subset_size, p.precision));
    cell.fit = evaluate_piecewise(table, cell.clustering, std::move(fits));
    cell.quality = cell.fit.quality;
    cell.feasible = true;
    cell.affinity = std::move(affinity);
    return cell;
  }
};

/// Every (axis, parsimony, scale, precision) cell in that nesting order. Candidates are
/// solved once per parsimony step and filtered per scale, which gives the same lists as
/// generating them per cell.
inline AnalysisResult run_grid(const DataTable& data, const GridConfig& config, const ProgressCallback& progress = {}) {
  const std::size_t k = data.explanatory();
  const std::size_t m = data.points();
  AnalysisResult result;
  result.config = resolve_config(config, m, k);
  const GridConfig& cfg = result.config;
  const NormalizedTable table = normalize(data);

  const std::size_t n_axes = cfg.axes.size(), n_lambda = cfg.parsimony_steps.size();
  const std::size_t n_scale = cfg.scale_steps.size(), n_bins = cfg.precision_steps.size();
  const std::size_t total = n_axes * n_lambda * n_scale * n_bins;
  const auto index = [&](std::size_t a, std::size_t l, std::size_t s, std::size_t b) {
    return ((a * n_lambda + l) * n_scale + s) * n_bins + b;
  };
  result.cells.resize(total);

  CellPipeline pipeline{table, cfg, {}, {}};
  std::mutex progress_mutex;
  std::size_t done = 0;
  const std::size_t threads = resolve_threads(cfg.threads);

  for (std::size_t l = 0; l < n_lambda; ++l) {
    const double lambda = cfg.parsimony_steps[l];
    CandidateConfig cc;
    cc.subset_size = subset_size_for(cfg, m, k, lambda);
    cc.lambda = lambda;
    cc.budget = cfg.budget;
    cc.seed = cfg.seed;
    cc.threads = threads;
    const CandidateSet pool = generate_candidate_pool(table, cc);
    for (std::size_t s = 0; s < n_scale; ++s) {
      const CandidateSet candidates = restrict_to_scale(pool, table, cfg.scale_steps[s]);
      parallel_for(n_axes * n_bins, threads, [&](std::size_t job) {
        const std::size_t a = job / n_bins, b = job % n_bins;
        const HyperParams p{cfg.axes[a], cfg.scale_steps[s], cfg.precision_steps[b], lambda};
        result.cells[index(a, l, s, b)] = pipeline.run(p, candidates, cc.subset_size);
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(++done, total);
        }
      });
    }
  }

  for (std::size_t a = 0; a < n_axes; ++a)
    for (std::size_t l = 0; l < n_lambda; ++l) {
      Heatmap h;
      h.axis = cfg.axes[a];
      h.parsimony = cfg.parsimony_steps[l];
      h.values.assign(n_scale, std::vector<double>(n_bins));
      for (std::size_t s = 0; s < n_scale; ++s)
        for (std::size_t b = 0; b < n_bins; ++b) h.values[s][b] = result.cells[index(a, l, s, b)].quality;
      result.heatmaps.push_back(std::move(h));
    }
  result.best = select_best(result.cells);
  return result;
}

}  // namespace pwts
