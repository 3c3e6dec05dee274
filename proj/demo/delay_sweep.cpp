// Simulates the relay algorithm on the 4x4 reference network over a grid of
// arrival rates and prints measured delay next to the analytic bound.

#include <cstdio>

#include "dtnlab/engine.hpp"

int main() {
  using namespace dtnlab;
  RunSpec spec;
  spec.topo = CellTopology::build_grid(4, 4);
  spec.mobility = random_walk_matrix(spec.topo, 0.3);
  spec.radio = RadioParams{2, 1, 1};
  spec.n_users = 20;
  spec.slots = 200000;
  spec.warmup = 20000;
  spec.seed = 42;

  const auto rep = capacity(spec.topo, spec.mobility.pi, spec.n_users, spec.radio);
  const double alpha = estimate_alpha(spec.mobility);
  std::printf("capacity mu = %.4f\n", rep.mu);
  std::printf("%8s %12s %14s %14s\n", "lambda", "avg delay", "avg backlog", "delay bound");
  for (double lambda : {0.1, 0.2, 0.3, 0.4, 0.45}) {
    RunSpec s = spec;
    s.lambda = lambda;
    const auto st = run(s);
    const auto bound = delay_bound(rep, spec.topo.max_degree(), lambda, alpha,
                                   spec.mobility.gamma);
    std::printf("%8.2f %12.1f %14.1f %14.3e\n", lambda, st.avg_delay(),
                st.avg_backlog(), bound.slots);
  }
  return 0;
}
