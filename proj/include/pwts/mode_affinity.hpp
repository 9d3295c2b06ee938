#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pwts/candidates.hpp"

namespace pwts {

/// Circular bin of a slope angle. Angles are identified modulo pi and bins are centred on
/// multiples of pi/bins, so bin 0 straddles the vertical direction (+-pi/2) and the
/// horizontal direction (angle 0) sits at the centre of its bin for every bin count.
inline std::size_t angle_bin(double theta, std::size_t bins) {
  const double pi = std::numbers::pi;
  const double width = pi / static_cast<double>(bins);
  double r = std::fmod(theta + 0.5 * pi + 0.5 * width, pi);
  if (r < 0.0) r += pi;
  const auto b = static_cast<std::size_t>(r / width);
  return b >= bins ? bins - 1 : b;
}

/// Centre angle of a bin, in [-pi/2, pi/2).
inline double bin_center(std::size_t bin, std::size_t bins) {
  const double pi = std::numbers::pi;
  return -0.5 * pi + pi * static_cast<double>(bin) / static_cast<double>(bins);
}

/// Whether `theta` (mod pi) falls inside `bin`.
inline bool bin_contains(std::size_t bin, std::size_t bins, double theta) { return angle_bin(theta, bins) == bin; }

struct AngleHistogram {
  std::size_t axis = 1;  // 1-based explanatory column
  std::vector<std::uint32_t> counts;

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_width() const noexcept { return std::numbers::pi / static_cast<double>(counts.size()); }

  /// Most populated bin; ties go to the smallest index.
  std::size_t mode() const noexcept {
    std::size_t best = 0;
    for (std::size_t b = 1; b < counts.size(); ++b)
      if (counts[b] > counts[best]) best = b;
    return best;
  }
};

/// Histogram of one axis' angles over all candidates.
inline AngleHistogram angle_histogram(const CandidateSet& candidates, std::size_t axis, std::size_t bins) {
  AngleHistogram h;
  h.axis = axis;
  h.counts.assign(bins, 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) ++h.counts[angle_bin(candidates.angle(c, axis - 1), bins)];
  return h;
}

struct PointMode {
  std::size_t point = 0;
  std::size_t axis = 1;
  std::size_t mode_bin = 0;
  /// Candidate ids whose subset contains `point` and whose angle falls in `mode_bin`.
  std::vector<std::size_t> supporters;
};

inline void check_mode_args(const CandidateSet& candidates, std::size_t axis, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("precision needs at least two bins");
  if (axis < 1 || axis > candidates.explanatory()) throw std::invalid_argument("axis out of range");
}

/// Siegel-style partition: each point gets the modal bin of the candidates through it.
inline std::vector<PointMode> detect_point_modes(const CandidateSet& candidates, std::size_t axis,
                                                 std::size_t bins, std::size_t points) {
  check_mode_args(candidates, axis, bins);
  std::vector<std::uint32_t> counts(points * bins, 0);
  std::vector<std::uint32_t> bin_of(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bin_of[c] = static_cast<std::uint32_t>(angle_bin(candidates.angle(c, axis - 1), bins));
    for (std::size_t p : candidates.subset(c)) ++counts[p * bins + bin_of[c]];
  }
  std::vector<PointMode> modes;
  std::vector<std::size_t> slot(points, SIZE_MAX);
  for (std::size_t p = 0; p < points; ++p) {
    const std::uint32_t* row = counts.data() + p * bins;
    std::size_t best = 0;
    for (std::size_t b = 1; b < bins; ++b)
      if (row[b] > row[best]) best = b;
    if (row[best] == 0) continue;
    slot[p] = modes.size();
    PointMode& mode = modes.emplace_back();
    mode.point = p;
    mode.axis = axis;
    mode.mode_bin = best;
    mode.supporters.reserve(row[best]);
  }
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (std::size_t p : candidates.subset(c))
      if (slot[p] != SIZE_MAX && modes[slot[p]].mode_bin == bin_of[c]) modes[slot[p]].supporters.push_back(c);
  return modes;
}

/// Symmetric m x m vote counts with a zero diagonal.
class AffinityMatrix {
 public:
  AffinityMatrix() = default;
  explicit AffinityMatrix(std::size_t points) : m_(points), counts_(points * points, 0) {}

  std::size_t size() const noexcept { return m_; }
  std::uint64_t at(std::size_t i, std::size_t j) const noexcept { return counts_[i * m_ + j]; }

  void add_pair(std::size_t i, std::size_t j, std::uint64_t votes = 1) noexcept {
    counts_[i * m_ + j] += votes;
    counts_[j * m_ + i] += votes;
  }

  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  friend bool operator==(const AffinityMatrix&, const AffinityMatrix&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// For every point mode and every supporting candidate, each unordered pair of the
/// candidate's subset gets one vote.
inline AffinityMatrix accumulate_affinity(const std::vector<PointMode>& modes, const CandidateSet& candidates,
                                          std::size_t points) {
  AffinityMatrix a(points);
  // a candidate contributes its pairs once per point mode it supports
  std::vector<std::uint32_t> weight(candidates.size(), 0);
  for (const auto& mode : modes)
    for (std::size_t c : mode.supporters) ++weight[c];
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (weight[c] == 0) continue;
    const auto sub = candidates.subset(c);
    for (std::size_t x = 0; x < sub.size(); ++x)
      for (std::size_t y = x + 1; y < sub.size(); ++y) a.add_pair(sub[x], sub[y], weight[c]);
  }
  return a;
}

}  // namespace pwts
