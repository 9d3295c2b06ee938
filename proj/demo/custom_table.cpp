// Fits a small hand-written table: two line segments with a break at x = 5.
#include <iostream>

#include "pwts/pwts.hpp"

int main() {
  const char* text =
      "x,y\n"
      "0,1\n1,3\n2,5\n3,7\n4,9\n"
      "5,30\n6,29\n7,28\n8,27\n9,26\n";
  const pwts::DataTable data = pwts::parse_table(text);

  pwts::GridConfig cfg;
  cfg.scale_steps = {0.5, 1.0};
  cfg.precision_steps = {16};
  cfg.parsimony_steps = {0.0};
  const auto result = pwts::run_grid(data, cfg);

  const auto& best = result.best_cell();
  std::cout << "clusters: " << best.cluster_count() << "  Q: " << best.quality << '\n';
  for (std::size_t p = 0; p < data.points(); ++p)
    std::cout << "  point " << p << " -> cluster " << best.clustering.labels[p] << '\n';
  for (const auto& f : best.fit.fits)
    std::cout << "  y = " << f.plane.intercept << " + " << f.plane.slopes[0] << " x\n";
  std::cout << pwts::render_heatmap(pwts::result_to_json(result), 1, 0.0);
}
