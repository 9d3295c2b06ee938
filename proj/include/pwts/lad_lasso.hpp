#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pwts/combinatorics.hpp"
#include "pwts/errors.hpp"

namespace pwts {

enum class Space { Normalized, Original };

/// y = intercept + slopes . x
struct Hyperplane {
  double intercept = 0.0;
  std::vector<double> slopes;
  Space space = Space::Normalized;

  double evaluate(std::span<const double> x) const noexcept {
    double v = intercept;
    for (std::size_t j = 0; j < slopes.size(); ++j) v += slopes[j] * x[j];
    return v;
  }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};

/// s points of k explanatory values plus the dependent value, row-major.
struct LadLassoProblem {
  std::size_t explanatory = 1;
  std::vector<double> points;
  double lambda = 0.0;

  std::size_t size() const noexcept { return points.size() / (explanatory + 1); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {points.data() + i * (explanatory + 1), explanatory + 1};
  }
};

struct LadLassoSolution {
  Hyperplane plane;
  double objective = 0.0;
  std::size_t zero_slopes = 0;
  /// Points whose residual the vertex pins to zero.
  std::vector<std::size_t> basis;
};

/// J = sum |y - b0 - b.x| + lambda * sum |b_j|; the intercept is not penalized.
inline double lad_objective(const LadLassoProblem& problem, const Hyperplane& plane) {
  const std::size_t k = problem.explanatory;
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const auto r = problem.row(i);
    sum += std::abs(r[k] - plane.evaluate(r));
  }
  double l1 = 0.0;
  for (double b : plane.slopes) l1 += std::abs(b);
  return sum + problem.lambda * l1;
}

/// Exact LAD-LASSO by vertex enumeration. The objective is convex piecewise linear with
/// kinks where a residual or a slope is zero, so a minimizer sits where k+1 independent
/// kinks meet: fix a set of slopes at zero, interpolate the remaining unknowns through
/// as many points. Reuses its scratch buffers across calls; one instance per thread.
class LadLassoSolver {
 public:
  static constexpr double kPivotTolerance = 1e-10;

  LadLassoSolution solve(const LadLassoProblem& problem) {
    const std::size_t k = problem.explanatory;
    const std::size_t s = problem.size();
    if (s == 0) throw std::invalid_argument("LAD-LASSO problem needs at least one point");
    if (problem.lambda < 0.0) throw std::invalid_argument("LAD-LASSO penalty must be non-negative");

    best_found_ = false;
    best_objective_ = std::numeric_limits<double>::infinity();
    best_zero_count_ = 0;
    best_slopes_.assign(k, 0.0);

    for (std::size_t zero_count = k + 1; zero_count-- > 0;) {
      const std::size_t free_count = k - zero_count;
      const std::size_t unknowns = free_count + 1;
      if (unknowns > s) continue;
      // free slopes are the complement of the zero set; enumerate zero sets lexicographically
      std::vector<std::size_t> zero_set = first_combination(zero_count);
      do {
        free_.clear();
        for (std::size_t j = 0, z = 0; j < k; ++j) {
          if (z < zero_set.size() && zero_set[z] == j) {
            ++z;
            continue;
          }
          free_.push_back(j);
        }
        std::vector<std::size_t> basis = first_combination(unknowns);
        do {
          if (!interpolate(problem, basis)) continue;
          consider(problem, basis, zero_count);
        } while (next_combination(basis, s));
      } while (next_combination(zero_set, k));
    }

    if (!best_found_) throw DegenerateProblem("every interpolation system is singular");
    LadLassoSolution out;
    out.plane.intercept = best_intercept_;
    out.plane.slopes = best_slopes_;
    out.objective = best_objective_;
    out.zero_slopes = best_zero_count_;
    out.basis = best_basis_;
    return out;
  }

 private:
  // Solves [1 x_free] c = y over the basis rows by Gaussian elimination with partial pivoting.
  bool interpolate(const LadLassoProblem& problem, std::span<const std::size_t> basis) {
    const std::size_t n = basis.size();
    const std::size_t k = problem.explanatory;
    matrix_.resize(n * (n + 1));
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = problem.row(basis[r]);
      double* a = matrix_.data() + r * (n + 1);
      a[0] = 1.0;
      for (std::size_t c = 0; c < free_.size(); ++c) a[c + 1] = row[free_[c]];
      a[n] = row[k];
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(matrix_[r * (n + 1) + col]) > std::abs(matrix_[pivot * (n + 1) + col])) pivot = r;
      if (std::abs(matrix_[pivot * (n + 1) + col]) < kPivotTolerance) return false;
      if (pivot != col)
        for (std::size_t c = 0; c <= n; ++c) std::swap(matrix_[pivot * (n + 1) + c], matrix_[col * (n + 1) + c]);
      const double diag = matrix_[col * (n + 1) + col];
      for (std::size_t r = col + 1; r < n; ++r) {
        const double f = matrix_[r * (n + 1) + col] / diag;
        if (f == 0.0) continue;
        for (std::size_t c = col; c <= n; ++c) matrix_[r * (n + 1) + c] -= f * matrix_[col * (n + 1) + c];
      }
    }
    solution_.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
      double v = matrix_[r * (n + 1) + n];
      for (std::size_t c = r + 1; c < n; ++c) v -= matrix_[r * (n + 1) + c] * solution_[c];
      solution_[r] = v / matrix_[r * (n + 1) + r];
    }
    return true;
  }

  void consider(const LadLassoProblem& problem, std::span<const std::size_t> basis, std::size_t zero_count) {
    const std::size_t k = problem.explanatory;
    slopes_.assign(k, 0.0);
    for (std::size_t c = 0; c < free_.size(); ++c) slopes_[free_[c]] = solution_[c + 1];
    const double intercept = solution_[0];

    double objective = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
      const auto r = problem.row(i);
      double fit = intercept;
      for (std::size_t j = 0; j < k; ++j) fit += slopes_[j] * r[j];
      objective += std::abs(r[k] - fit);
    }
    double l1 = 0.0;
    for (double b : slopes_) l1 += std::abs(b);
    objective += problem.lambda * l1;

    bool take = !best_found_;
    if (!take) {
      const double tol = 1e-12 * (1.0 + std::abs(best_objective_));
      if (objective < best_objective_ - tol) {
        take = true;
      } else if (objective <= best_objective_ + tol) {
        // ties: more zero slopes, then the lexicographically smallest basis
        take = zero_count > best_zero_count_ ||
               (zero_count == best_zero_count_ &&
                std::lexicographical_compare(basis.begin(), basis.end(), best_basis_.begin(), best_basis_.end()));
      }
    }
    if (!take) return;
    best_found_ = true;
    best_objective_ = objective;
    best_zero_count_ = zero_count;
    best_intercept_ = intercept;
    best_slopes_ = slopes_;
    best_basis_.assign(basis.begin(), basis.end());
  }

  std::vector<double> matrix_;
  std::vector<double> solution_;
  std::vector<double> slopes_;
  std::vector<std::size_t> free_;

  bool best_found_ = false;
  double best_objective_ = 0.0;
  std::size_t best_zero_count_ = 0;
  double best_intercept_ = 0.0;
  std::vector<double> best_slopes_;
  std::vector<std::size_t> best_basis_;
};

inline LadLassoSolution solve_lad_lasso(const LadLassoProblem& problem) {
  LadLassoSolver solver;
  return solver.solve(problem);
}

}  // namespace pwts
