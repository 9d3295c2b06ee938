#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pwts/candidates.hpp"
#include "pwts/clustering.hpp"
#include "pwts/data_model.hpp"
#include "pwts/lad_lasso.hpp"
#include "pwts/mode_affinity.hpp"

namespace pwts {

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

/// Expresses a normalized-space plane in original units.
inline Hyperplane denormalize_plane(const Hyperplane& plane, const NormalizationParams& params) {
  const std::size_t k = plane.slopes.size();
  const double y_span = params.span[k];
  Hyperplane out;
  out.space = Space::Original;
  out.slopes.resize(k);
  double shift = plane.intercept;
  for (std::size_t j = 0; j < k; ++j) {
    out.slopes[j] = y_span * plane.slopes[j] / params.span[j];
    shift -= plane.slopes[j] * params.offset[j] / params.span[j];
  }
  out.intercept = params.offset[k] + y_span * shift;
  return out;
}

struct ClusterFit {
  std::size_t cluster_id = 0;
  Hyperplane plane;             // original units
  Hyperplane plane_normalized;  // normalized units
  std::size_t member_count = 0;
  /// False for clusters too small (or too degenerate) to identify k slopes.
  bool slopes_defined = false;
  /// |residual| per member in normalized units, in the order members were given.
  std::vector<double> residuals;

  double quality() const noexcept {
    double q = 0.0;
    for (double r : residuals) q += r;
    return q;
  }
};

namespace detail {

/// Mean direction of angles taken modulo pi.
inline double circular_mean_mod_pi(std::span<const double> angles) {
  double s = 0.0, c = 0.0;
  for (double t : angles) {
    s += std::sin(2.0 * t);
    c += std::cos(2.0 * t);
  }
  return 0.5 * std::atan2(s, c);
}

inline void finish_fit(ClusterFit& fit, const NormalizedTable& table, std::span<const std::size_t> members) {
  const std::size_t k = table.explanatory();
  fit.residuals.clear();
  for (std::size_t p : members) fit.residuals.push_back(std::abs(table.y(p) - fit.plane_normalized.evaluate(table.row(p))));
  fit.plane = denormalize_plane(fit.plane_normalized, table.params());
  fit.member_count = members.size();
  (void)k;
}

inline void constant_fit(ClusterFit& fit, const NormalizedTable& table, std::span<const std::size_t> members) {
  std::vector<double> ys;
  for (std::size_t p : members) ys.push_back(table.y(p));
  fit.slopes_defined = false;
  fit.plane_normalized = Hyperplane{median(std::move(ys)), std::vector<double>(table.explanatory(), 0.0),
                                    Space::Normalized};
  finish_fit(fit, table, members);
}

}  // namespace detail

/// Modal Theil-Sen fit of one cluster.
///  - fewer than k+1 members: zero slopes, intercept at the median y;
///  - exactly k+1: exact interpolation;
///  - otherwise: candidates inside the cluster (no scale filter), per-axis circular mode
///    bin over all candidate angles, slope = tan of the mean angle inside that bin,
///    intercept = median of y - b.x over members.
inline ClusterFit fit_cluster(const NormalizedTable& table, std::span<const std::size_t> members,
                              const CandidateConfig& cfg, std::size_t bins) {
  if (members.empty()) throw std::invalid_argument("cannot fit an empty cluster");
  if (bins < 2) throw std::invalid_argument("precision needs at least two bins");
  const std::size_t k = table.explanatory();
  ClusterFit fit;
  if (members.size() < k + 1) {
    detail::constant_fit(fit, table, members);
    return fit;
  }

  const NormalizedTable sub = table.subset(members);
  if (members.size() == k + 1) {
    LadLassoProblem problem;
    problem.explanatory = k;
    problem.points = sub.cells();
    problem.lambda = 0.0;
    fit.plane_normalized = solve_lad_lasso(problem).plane;
    fit.slopes_defined = true;
    detail::finish_fit(fit, table, members);
    return fit;
  }

  CandidateConfig inner = cfg;
  inner.scale = 1.0;
  inner.subset_size = std::clamp(cfg.subset_size, k + 1, members.size());
  CandidateSet candidates;
  try {
    candidates = generate_candidates(sub, inner);
  } catch (const NoCandidates&) {
    detail::constant_fit(fit, table, members);
    return fit;
  }

  Hyperplane plane{0.0, std::vector<double>(k, 0.0), Space::Normalized};
  std::vector<double> in_bin;
  for (std::size_t axis = 1; axis <= k; ++axis) {
    const std::size_t mode = angle_histogram(candidates, axis, bins).mode();
    in_bin.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double theta = candidates.angle(c, axis - 1);
      if (angle_bin(theta, bins) == mode) in_bin.push_back(theta);
    }
    plane.slopes[axis - 1] = std::tan(detail::circular_mean_mod_pi(in_bin));
  }
  std::vector<double> offsets;
  offsets.reserve(members.size());
  for (std::size_t p : members) {
    const auto r = table.row(p);
    double v = r[k];
    for (std::size_t j = 0; j < k; ++j) v -= plane.slopes[j] * r[j];
    offsets.push_back(v);
  }
  plane.intercept = median(std::move(offsets));
  fit.plane_normalized = std::move(plane);
  fit.slopes_defined = std::all_of(fit.plane_normalized.slopes.begin(), fit.plane_normalized.slopes.end(),
                                   [](double b) { return std::isfinite(b); });
  if (!fit.slopes_defined) {
    detail::constant_fit(fit, table, members);
    return fit;
  }
  detail::finish_fit(fit, table, members);
  return fit;
}

struct PiecewiseResult {
  std::vector<ClusterFit> fits;
  /// Sum over all points of |normalized residual| from the point's own cluster fit.
  double quality = 0.0;
  /// Residual per point (normalized units), indexed by point.
  std::vector<double> point_residuals;
};

inline PiecewiseResult evaluate_piecewise(const NormalizedTable& table, const Clustering& clustering,
                                          std::vector<ClusterFit> fits) {
  if (fits.size() != clustering.count()) throw std::invalid_argument("need one fit per cluster");
  PiecewiseResult out;
  out.point_residuals.assign(table.points(), 0.0);
  for (std::size_t c = 0; c < clustering.count(); ++c) {
    fits[c].cluster_id = c;
    const auto& plane = fits[c].plane_normalized;
    for (std::size_t p : clustering.clusters[c])
      out.point_residuals[p] = std::abs(table.y(p) - plane.evaluate(table.row(p)));
  }
  // summed in point order so the value does not depend on cluster labelling
  for (double r : out.point_residuals) out.quality += r;
  out.fits = std::move(fits);
  return out;
}

}  // namespace pwts
