// Runs the default grid on the Simpson's paradox dataset and prints the chosen fits.
#include <cstdio>

#include "pwts/pwts.hpp"

int main() {
  const pwts::DataTable data = pwts::generate_synthetic({pwts::SyntheticKind::Simpsons});
  const auto result = pwts::run_grid(data, pwts::GridConfig{});
  const auto& best = result.best_cell();
  std::printf("best: axis %zu  scale %g  precision %zu  parsimony %g  Q %.3g\n", best.params.axis,
              best.params.scale, best.params.precision, best.params.parsimony, best.quality);
  for (const auto& f : best.fit.fits)
    std::printf("  cluster %zu (%zu points): salary = %.0f + %.1f * experience\n", f.cluster_id, f.member_count,
                f.plane.intercept, f.plane.slopes[0]);

  // the pooled trend, for contrast
  pwts::GridConfig pooled;
  pooled.scale_steps = {1.0};
  pooled.precision_steps = {12};
  pooled.parsimony_steps = {0.0};
  const auto coarse = pwts::run_grid(data, pooled).best_cell();
  std::printf("coarse bins: %zu cluster(s), slope %.1f\n", coarse.cluster_count(),
              coarse.fit.fits.front().plane.slopes[0]);
}
