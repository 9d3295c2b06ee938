#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pwts {

/// C(n, k), or nullopt when the value does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = (k > n - k) ? n - k : k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > UINT64_MAX) return std::nullopt;
  }
  return static_cast<std::uint64_t>(result);
}

/// Advances `combo` (strictly increasing indices < n) to the next combination in
/// lexicographic order. Returns false after the last one.
inline bool next_combination(std::span<std::size_t> combo, std::size_t n) {
  const std::size_t k = combo.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (combo[i] < n - k + i) {
      ++combo[i];
      for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> combo(k);
  for (std::size_t i = 0; i < k; ++i) combo[i] = i;
  return combo;
}

/// The `rank`-th k-subset of {0..n-1} in lexicographic order.
inline void unrank_combination(std::uint64_t rank, std::size_t n, std::span<std::size_t> out) {
  const std::size_t k = out.size();
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t c = next;; ++c) {
      const std::uint64_t below = *binomial(n - 1 - c, k - 1 - pos);
      if (rank < below) {
        out[pos] = c;
        next = c + 1;
        break;
      }
      rank -= below;
    }
  }
}

}  // namespace pwts
