#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pwts/mode_affinity.hpp"

namespace pwts {

/// How "more than half the non-zero entries of either row" is read.
enum class OverlapRule {
  /// overlap > min(rowCount_i, rowCount_j) / 2
  EitherRow,
  /// overlap > max(rowCount_i, rowCount_j) / 2
  BothRows,
};

/// Boolean association matrix stored as packed rows.
class BinarizedAffinity {
 public:
  BinarizedAffinity() = default;
  explicit BinarizedAffinity(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0), row_count_(n, 0) {}

  /// True where the vote count is positive. Every point is associated with itself, so
  /// the diagonal is set: a point's signature includes the point.
  static BinarizedAffinity from_counts(const AffinityMatrix& a) {
    BinarizedAffinity b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        if (i == j || a.at(i, j) > 0) b.set(i, j);
    return b;
  }

  std::size_t size() const noexcept { return n_; }
  bool test(std::size_t i, std::size_t j) const noexcept { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u; }
  std::size_t row_count(std::size_t i) const noexcept { return row_count_[i]; }

  /// Sets entry (i, j). Callers building a symmetric matrix set both halves.
  void set(std::size_t i, std::size_t j) noexcept {
    std::uint64_t& w = bits_[i * words_ + j / 64];
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (!(w & mask)) {
      w |= mask;
      ++row_count_[i];
    }
  }

  std::size_t overlap(std::size_t i, std::size_t j) const noexcept {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_; ++w) n += std::popcount(bits_[i * words_ + w] & bits_[j * words_ + w]);
    return n;
  }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> row_count_;
};

/// Hamming-style rule: rows with no common column are never together; otherwise they are
/// together when the common count exceeds half the smaller (or, for BothRows, larger) row.
inline bool same_cluster(const BinarizedAffinity& bin, std::size_t i, std::size_t j,
                         OverlapRule rule = OverlapRule::EitherRow) {
  const std::size_t common = bin.overlap(i, j);
  if (common == 0) return false;
  const std::size_t ri = bin.row_count(i), rj = bin.row_count(j);
  const std::size_t ref = rule == OverlapRule::EitherRow ? std::min(ri, rj) : std::max(ri, rj);
  return 2 * common > ref;
}

struct Clustering {
  std::vector<std::size_t> labels;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> display_order;

  std::size_t count() const noexcept { return clusters.size(); }
  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// Orders clusters by decreasing size (ties by smallest member), sorts members, and
/// rebuilds labels and the block-diagonal display order.
inline Clustering make_clustering(std::vector<std::vector<std::size_t>> groups, std::size_t points) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
  });
  Clustering out;
  out.labels.assign(points, SIZE_MAX);
  for (std::size_t c = 0; c < groups.size(); ++c)
    for (std::size_t p : groups[c]) {
      if (p >= points || out.labels[p] != SIZE_MAX) throw std::invalid_argument("clusters must partition the points");
      out.labels[p] = c;
      out.display_order.push_back(p);
    }
  if (out.display_order.size() != points) throw std::invalid_argument("clusters must partition the points");
  out.clusters = std::move(groups);
  return out;
}

/// Initial allocation: the unallocated point with the most associations seeds a cluster
/// that takes every unallocated point passing same_cluster against it; repeat.
inline Clustering seed_grow(const BinarizedAffinity& bin, OverlapRule rule = OverlapRule::EitherRow) {
  const std::size_t n = bin.size();
  std::vector<bool> allocated(n, false);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t remaining = n; remaining > 0;) {
    std::size_t seed = SIZE_MAX;
    for (std::size_t i = 0; i < n; ++i)
      if (!allocated[i] && (seed == SIZE_MAX || bin.row_count(i) > bin.row_count(seed))) seed = i;
    std::vector<std::size_t> group{seed};
    allocated[seed] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (!allocated[j] && same_cluster(bin, seed, j, rule)) {
        group.push_back(j);
        allocated[j] = true;
      }
    remaining -= group.size();
    groups.push_back(std::move(group));
  }
  return make_clustering(std::move(groups), n);
}

/// Cluster-level association: total votes between members of a and b.
inline AffinityMatrix cluster_affinity(const Clustering& clustering, const AffinityMatrix& a) {
  const std::size_t c = clustering.count();
  AffinityMatrix out(c);
  std::vector<std::uint64_t> sums(c * c, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const std::uint64_t v = a.at(i, j);
      if (v == 0) continue;
      const std::size_t ci = clustering.labels[i], cj = clustering.labels[j];
      if (ci != cj) out.add_pair(ci, cj, v);
    }
  return out;
}

/// Repeatedly merges clusters whose aggregated affinity rows pass the same rule used for
/// points, until no pair merges.
inline Clustering prune_merge(const Clustering& initial, const AffinityMatrix& a,
                              OverlapRule rule = OverlapRule::EitherRow) {
  if (initial.labels.size() != a.size()) throw std::invalid_argument("clustering and affinity sizes differ");
  Clustering current = make_clustering(initial.clusters, a.size());
  for (;;) {
    const std::size_t c = current.count();
    const auto bin = BinarizedAffinity::from_counts(cluster_affinity(current, a));
    std::vector<std::size_t> parent(c);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool merged = false;
    for (std::size_t x = 0; x < c; ++x)
      for (std::size_t y = x + 1; y < c; ++y)
        if (same_cluster(bin, x, y, rule)) {
          const std::size_t rx = find(x), ry = find(y);
          if (rx != ry) {
            parent[std::max(rx, ry)] = std::min(rx, ry);
            merged = true;
          }
        }
    if (!merged) return current;
    std::vector<std::vector<std::size_t>> groups(c);
    for (std::size_t x = 0; x < c; ++x) {
      auto& g = groups[find(x)];
      g.insert(g.end(), current.clusters[x].begin(), current.clusters[x].end());
    }
    current = make_clustering(std::move(groups), a.size());
  }
}

}  // namespace pwts
