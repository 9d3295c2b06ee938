#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/rng.hpp"

namespace pwts {

enum class SyntheticKind {
  Anscombe1,
  Anscombe2,
  Anscombe3,
  Anscombe4,
  Simpsons,
  TwoHyperplanes3d,
  CleanLine2d,
  NoisyLine2d,
  RegimeShift2d,
};

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Anscombe1;
  std::uint64_t seed = 1;
  /// Total point count for randomized kinds.
  std::optional<std::size_t> size_override;
  /// Standard deviation of Gaussian noise added to the dependent variable, in output units.
  std::optional<double> noise;
};

struct DatasetInfo {
  SyntheticKind kind;
  std::string_view name;
  std::string_view description;
  std::uint64_t default_seed;
  bool randomized;
};

inline const std::array<DatasetInfo, 9>& dataset_catalog() {
  static const std::array<DatasetInfo, 9> catalog{{
      {SyntheticKind::Anscombe1, "anscombe1", "Anscombe quartet I: noisy linear relationship", 1, false},
      {SyntheticKind::Anscombe2, "anscombe2", "Anscombe quartet II: smooth curve", 1, false},
      {SyntheticKind::Anscombe3, "anscombe3", "Anscombe quartet III: exact line with one outlier", 1, false},
      {SyntheticKind::Anscombe4, "anscombe4", "Anscombe quartet IV: vertical stack with one leverage point", 1, false},
      {SyntheticKind::Simpsons, "simpsons",
       "Salary vs experience for three entry grades: each grade rises, the pooled trend falls", 1, true},
      {SyntheticKind::TwoHyperplanes3d, "two-hyperplanes-3d",
       "Two planes in disjoint regions of (x1,x2,y); each depends on one explanatory variable only", 1, true},
      {SyntheticKind::CleanLine2d, "clean-line-2d", "50 points exactly on y = 2 + 0.7x", 1, true},
      {SyntheticKind::NoisyLine2d, "noisy-line-2d", "50 points on y = 2 + 0.7x with Gaussian noise", 1, true},
      {SyntheticKind::RegimeShift2d, "regime-shift-2d", "Slope 2 below x = 0.5, slope -1 above", 1, true},
  }};
  return catalog;
}

inline const DatasetInfo& dataset_info(SyntheticKind kind) {
  for (const auto& info : dataset_catalog())
    if (info.kind == kind) return info;
  throw std::logic_error("dataset kind missing from catalog");
}

inline SyntheticKind parse_kind(std::string_view name) {
  for (const auto& info : dataset_catalog())
    if (info.name == name) return info.kind;
  throw UnknownKind(std::string(name));
}

// ---------------------------------------------------------------------------
// Anscombe quartet, canonical published values.

namespace anscombe {

inline constexpr std::array<double, 11> x123{10, 8, 13, 9, 11, 14, 6, 4, 12, 7, 5};
inline constexpr std::array<double, 11> y1{8.04, 6.95, 7.58, 8.81, 8.33, 9.96, 7.24, 4.26, 10.84, 4.82, 5.68};
inline constexpr std::array<double, 11> y2{9.14, 8.14, 8.74, 8.77, 9.26, 8.10, 6.13, 3.10, 9.13, 7.26, 4.74};
inline constexpr std::array<double, 11> y3{7.46, 6.77, 12.74, 7.11, 7.81, 8.84, 6.08, 5.39, 8.15, 6.42, 5.73};
inline constexpr std::array<double, 11> x4{8, 8, 8, 8, 8, 8, 8, 19, 8, 8, 8};
inline constexpr std::array<double, 11> y4{6.58, 5.76, 7.71, 8.84, 8.47, 7.04, 5.25, 12.50, 5.56, 7.91, 6.89};

}  // namespace anscombe

/// Raw-unit generating plane of a synthetic relationship: y = intercept + slopes . x
struct GeneratingPlane {
  double intercept;
  std::vector<double> slopes;
};

/// The two planes behind two-hyperplanes-3d, in output units.
inline std::array<GeneratingPlane, 2> two_hyperplanes_truth() {
  // Design space: p1 is y = 0.3 x1 on x2 in [0, 0.25]; p2 is y = 2 x2 - 1 on x2 in [0.75, 1].
  // Output units: x1 = 10 u1, x2 = 5 + 20 u2, y = 100 + 50 v.
  return {{{100.0, {1.5, 0.0}}, {25.0, {0.0, 5.0}}}};
}

namespace detail {

inline double gaussian(CounterRng& rng) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline DataTable from_pairs(std::string x_name, std::string y_name, std::span<const double> xs,
                            std::span<const double> ys) {
  std::vector<double> cells;
  cells.reserve(xs.size() * 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cells.push_back(xs[i]);
    cells.push_back(ys[i]);
  }
  return DataTable({std::move(x_name), std::move(y_name)}, std::move(cells));
}

inline std::vector<std::size_t> split_groups(std::size_t total, std::size_t groups, std::size_t min_each) {
  if (total < groups * min_each)
    throw std::invalid_argument("synthetic size override too small: need at least " +
                                std::to_string(groups * min_each) + " points");
  std::vector<std::size_t> sizes(groups, total / groups);
  for (std::size_t g = 0; g < total % groups; ++g) ++sizes[g];
  return sizes;
}

// Three grades in design units, each on v = 0.5 u + offset, with grade centres falling
// along a line of negative slope. Tenure is stratified within each grade and the grade
// extremes are pinned, so runs differ only in jitter.
inline DataTable simpsons(const SyntheticSpec& spec) {
  struct Grade {
    double lo, hi, offset;
  };
  // senior hires (short tenure, high pay), graduates, manual workers
  constexpr std::array<Grade, 3> grades{{{0.0, 0.2, 0.85}, {0.4, 0.6, 0.25}, {0.8, 1.0, -0.35}}};
  const auto sizes = split_groups(spec.size_override.value_or(60), 3, 2);
  const double noise = spec.noise.value_or(0.0);
  CounterRng rng(spec.seed, 0x51u);
  std::vector<double> xs, ys;
  for (std::size_t g = 0; g < 3; ++g) {
    const std::size_t n = sizes[g];
    const double lo = grades[g].lo, hi = grades[g].hi;
    for (std::size_t i = 0; i < n; ++i) {
      const double jitter = rng.uniform();
      double u = lo + (hi - lo) * (static_cast<double>(i) + jitter) / static_cast<double>(n);
      if (i == 0) u = lo;
      if (i + 1 == n) u = hi;
      const double v = 0.5 * u + grades[g].offset;
      xs.push_back(2.0 + 38.0 * u);
      ys.push_back(20000.0 + 100000.0 * v + noise * gaussian(rng));
    }
  }
  return from_pairs("experience", "salary", xs, ys);
}

inline DataTable two_hyperplanes(const SyntheticSpec& spec) {
  const auto sizes = split_groups(spec.size_override.value_or(60), 2, 2);
  const double noise = spec.noise.value_or(0.0);
  CounterRng rng(spec.seed, 0x3du);
  std::vector<double> cells;
  const auto push = [&](double u1, double u2, double v) {
    cells.push_back(10.0 * u1);
    cells.push_back(5.0 + 20.0 * u2);
    cells.push_back(100.0 + 50.0 * v + noise * gaussian(rng));
  };
  for (std::size_t i = 0; i < sizes[0]; ++i) {
    const double u1 = i == 0 ? 0.0 : i == 1 ? 1.0 : rng.uniform();
    const double u2 = i == 0 ? 0.0 : rng.uniform(0.0, 0.25);
    push(u1, u2, 0.3 * u1);
  }
  for (std::size_t i = 0; i < sizes[1]; ++i) {
    const double u1 = rng.uniform();
    const double u2 = i == 0 ? 1.0 : i == 1 ? 0.75 : rng.uniform(0.75, 1.0);
    push(u1, u2, 2.0 * u2 - 1.0);
  }
  return DataTable({"x1", "x2", "y"}, std::move(cells));
}

inline DataTable line(const SyntheticSpec& spec, double default_noise) {
  const std::size_t m = spec.size_override.value_or(50);
  if (m < 3) throw std::invalid_argument("synthetic size override too small: need at least 3 points");
  const double noise = spec.noise.value_or(default_noise);
  CounterRng rng(spec.seed, 0x11u);
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = rng.uniform(0.0, 10.0);
    ys[i] = 2.0 + 0.7 * xs[i] + (noise > 0.0 ? noise * gaussian(rng) : 0.0);
  }
  return from_pairs("x", "y", xs, ys);
}

inline DataTable regime_shift(const SyntheticSpec& spec) {
  const std::size_t m = spec.size_override.value_or(60);
  if (m < 3) throw std::invalid_argument("synthetic size override too small: need at least 3 points");
  const double noise = spec.noise.value_or(0.0);
  CounterRng rng(spec.seed, 0x77u);
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = rng.uniform();
    const double y = x < 0.5 ? 1.0 + 2.0 * x : 2.0 - (x - 0.5);
    xs[i] = x;
    ys[i] = y + (noise > 0.0 ? noise * gaussian(rng) : 0.0);
  }
  return from_pairs("x", "y", xs, ys);
}

}  // namespace detail

inline DataTable generate_synthetic(const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::Anscombe1: return detail::from_pairs("x", "y", anscombe::x123, anscombe::y1);
    case SyntheticKind::Anscombe2: return detail::from_pairs("x", "y", anscombe::x123, anscombe::y2);
    case SyntheticKind::Anscombe3: return detail::from_pairs("x", "y", anscombe::x123, anscombe::y3);
    case SyntheticKind::Anscombe4: return detail::from_pairs("x", "y", anscombe::x4, anscombe::y4);
    case SyntheticKind::Simpsons: return detail::simpsons(spec);
    case SyntheticKind::TwoHyperplanes3d: return detail::two_hyperplanes(spec);
    case SyntheticKind::CleanLine2d: return detail::line(spec, 0.0);
    case SyntheticKind::NoisyLine2d: return detail::line(spec, 0.5);
    case SyntheticKind::RegimeShift2d: return detail::regime_shift(spec);
  }
  throw UnknownKind("?");
}

}  // namespace pwts
