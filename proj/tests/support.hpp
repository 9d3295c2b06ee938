#pragma once

// Shared generators and independent oracles for the test programs. Nothing here calls
// into the code under test except to build inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pwts/data_model.hpp"
#include "pwts/lad_lasso.hpp"
#include "pwts/rng.hpp"

namespace pwts::test {

inline constexpr double kPi = 3.14159265358979323846;

inline DataTable table_xy(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> cells;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cells.push_back(xs[i]);
    cells.push_back(ys[i]);
  }
  return DataTable({"x", "y"}, std::move(cells));
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Classic Theil-Sen: median over all pairs with distinct x.
inline double pairwise_median_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] != xs[j]) slopes.push_back((ys[j] - ys[i]) / (xs[j] - xs[i]));
  return median_of(std::move(slopes));
}

struct Line {
  double intercept;
  double slope;
};

inline Line ols(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return {my - sxy / sxx * mx, sxy / sxx};
}

/// k = 1 LAD-LASSO by brute force: slope on a grid over [lo, hi] with step h, intercept
/// solved exactly (median of y - b x) at each slope.
inline double lad_grid_oracle(const LadLassoProblem& p, double lo = -3.0, double hi = 3.0, double h = 1e-3) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> r(p.size());
  const auto steps = static_cast<long>(std::llround((hi - lo) / h));
  for (long t = 0; t <= steps; ++t) {
    const double b = lo + h * static_cast<double>(t);
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = p.row(i)[1] - b * p.row(i)[0];
    const double b0 = median_of(r);
    double j = p.lambda * std::abs(b);
    for (double v : r) j += std::abs(v - b0);
    best = std::min(best, j);
  }
  return best;
}

/// Hand-rolled generator helpers over the counter RNG.
struct Gen {
  CounterRng rng;
  explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : rng(seed, stream) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return rng.uniform(lo, hi); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng.below(n)); }
  double normal() {
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * rng.uniform());
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[index(i)]);
    return p;
  }

  /// Random table with m rows and k explanatory columns, every cell in [0, 10).
  DataTable table(std::size_t m, std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
    names.push_back("y");
    std::vector<double> cells(m * (k + 1));
    for (double& c : cells) c = uniform(0.0, 10.0);
    return DataTable(std::move(names), std::move(cells));
  }
};

}  // namespace pwts::test
