// Prints the closed-form capacity and minimum-energy curve for the 4x4
// reference network.

#include <cstdio>

#include "dtnlab/analysis.hpp"
#include "dtnlab/mobility.hpp"
#include "dtnlab/topology.hpp"

int main() {
  using namespace dtnlab;
  const auto topo = CellTopology::build_grid(4, 4);
  const auto model = random_walk_matrix(topo, 0.3);
  const RadioParams radio{2, 1, 1};
  const auto rep = capacity(topo, model.pi, 20, radio);

  std::printf("q  = %.4f  p  = %.4f\n", rep.probs.pair_same, rep.probs.busy_same);
  std::printf("q' = %.4f  p' = %.4f\n", rep.probs.dest_adj, rep.probs.user_adj);
  std::printf("mu = %.4f  kappa = %.4f  gamma = %.4f\n", rep.mu, rep.kappa, model.gamma);

  const auto curve = energy_curve(rep);
  std::printf("minimum energy curve knots:\n");
  for (int k = 0; k < 5; ++k)
    std::printf("  lambda = %.4f  phi = %.4f\n", curve.knots[k], curve.values[k]);
  return 0;
}
