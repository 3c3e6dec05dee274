#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dtnlab/analysis.hpp"
#include "dtnlab/mobility.hpp"
#include "dtnlab/rng.hpp"
#include "dtnlab/topology.hpp"

// Brute-force validators. The event indicators here are coded from the plain
// definitions of the events (pairing i <-> i^1), not from the closed forms,
// so agreement with the analysis module is a genuine cross-check.

namespace dtnlab::oracle {

constexpr std::uint64_t kEnumerationBudget = 1000000;

inline int partner(int node) { return node ^ 1; }

namespace detail {

inline std::uint64_t placement_count(int cells, int n_users) {
  std::uint64_t total = 1;
  for (int i = 0; i < n_users; ++i) {
    if (total > kEnumerationBudget / cells + 1) return kEnumerationBudget + 1;
    total *= cells;
  }
  return total;
}

/// Per-cell event indicators evaluated on one joint placement.
struct CellEvents {
  bool pair_same = false;      // source-destination pair inside the cell
  bool busy_same = false;      // at least 2 users inside
  bool lone_dest_adj = false;  // exactly 1 user, its destination adjacent
  bool lone_user_adj = false;  // exactly 1 user, somebody adjacent
  bool cross_pair = false;     // no inside pair, a pair split with an adjacent cell
  bool crowd_no_pair = false;  // >=2 users, no pair inside or across
  // opportunity indicators of the necessity proof
  bool same_direct = false;    // I1
  bool same_relay = false;     // I2
  bool adj_direct = false;     // I3
  bool adj_relay = false;      // I4
};

inline CellEvents cell_events(const CellTopology& topo,
                              const std::vector<int>& placement, int cell) {
  CellEvents ev;
  int count = 0;
  int lone = -1;
  bool cross = false;
  bool adjacent_user = false;
  for (int i = 0; i < static_cast<int>(placement.size()); ++i) {
    if (placement[i] != cell) continue;
    ++count;
    lone = i;
    if (placement[partner(i)] == cell && partner(i) != i) ev.pair_same = true;
    if (topo.adjacent(cell, placement[partner(i)])) cross = true;
  }
  for (int i = 0; i < static_cast<int>(placement.size()); ++i)
    if (topo.adjacent(cell, placement[i])) adjacent_user = true;

  ev.busy_same = count >= 2;
  ev.lone_dest_adj = count == 1 && topo.adjacent(cell, placement[partner(lone)]);
  ev.lone_user_adj = count == 1 && adjacent_user;
  ev.cross_pair = !ev.pair_same && cross;
  ev.crowd_no_pair = count >= 2 && !ev.pair_same && !cross;

  ev.same_direct = ev.pair_same;
  ev.same_relay = count >= 2;
  ev.adj_direct = count >= 1 && cross;
  ev.adj_relay = count >= 1 && adjacent_user;
  return ev;
}

template <class Fn>
void for_each_placement(int cells, int n_users, const std::vector<double>& pi,
                        Fn&& fn) {
  std::vector<int> placement(n_users, 0);
  const std::uint64_t total = placement_count(cells, n_users);
  for (std::uint64_t index = 0; index < total; ++index) {
    double weight = 1.0;
    for (int i = 0; i < n_users; ++i) weight *= pi[placement[i]];
    fn(static_cast<const std::vector<int>&>(placement), weight);
    // mixed-radix increment
    for (int i = 0; i < n_users; ++i) {
      if (++placement[i] < cells) break;
      placement[i] = 0;
    }
  }
}

}  // namespace detail

/// Exhaustive enumeration of all C^N joint placements, weighted by the
/// product of per-user stationary probabilities.
inline SteadyStateProbs enumerate_probabilities(const CellTopology& topo,
                                                const std::vector<double>& pi,
                                                int n_users) {
  if (n_users < 2 || n_users % 2 != 0)
    throw std::invalid_argument("N must be even and >= 2");
  const int cells = topo.cell_count();
  if (detail::placement_count(cells, n_users) > kEnumerationBudget)
    throw std::invalid_argument("instance exceeds the enumeration budget");

  SteadyStateProbs out;
  detail::for_each_placement(cells, n_users, pi, [&](const std::vector<int>& pl, double w) {
    for (int cell = 0; cell < cells; ++cell) {
      const auto ev = detail::cell_events(topo, pl, cell);
      out.pair_same += w * ev.pair_same;
      out.busy_same += w * ev.busy_same;
      out.dest_adj += w * ev.lone_dest_adj;
      out.user_adj += w * ev.lone_user_adj;
      out.pair_cross += w * ev.cross_pair;
      out.crowd_no_pair += w * ev.crowd_no_pair;
    }
  });
  out.pair_same /= cells;
  out.busy_same /= cells;
  out.dest_adj /= cells;
  out.user_adj /= cells;
  out.pair_cross /= cells;
  out.crowd_no_pair /= cells;
  return out;
}

/// Expectation of the best per-cell opportunity value Z_c under the
/// necessity-proof preference order, divided by 2N: an independent route to
/// the network capacity.
inline double expected_z(const CellTopology& topo, const std::vector<double>& pi,
                         int n_users, const RadioParams& radio) {
  radio.validate();
  const int cells = topo.cell_count();
  if (detail::placement_count(cells, n_users) > kEnumerationBudget)
    throw std::invalid_argument("instance exceeds the enumeration budget");
  const double r1 = radio.same_cell_rate, r2 = radio.adjacent_rate;
  const bool same_dominant = rate_regime(radio) == RateRegime::SameCellDominant;

  double total = 0.0;
  detail::for_each_placement(cells, n_users, pi, [&](const std::vector<int>& pl, double w) {
    for (int cell = 0; cell < cells; ++cell) {
      const auto ev = detail::cell_events(topo, pl, cell);
      double z = 0.0;
      if (same_dominant) {
        if (ev.same_direct) z = 2.0 * r1;
        else if (ev.same_relay) z = r1;
        else if (ev.adj_direct) z = 2.0 * r2;
        else if (ev.adj_relay) z = r2;
      } else {
        if (ev.same_direct) z = 2.0 * r1;
        else if (ev.adj_direct) z = 2.0 * r2;
        else if (ev.same_relay) z = r1;
        else if (ev.adj_relay) z = r2;
      }
      total += w * z;
    }
  });
  return total / (2.0 * n_users);
}

struct Lemma1Report {
  bool ok = true;
  double worst_lower_margin = 0.0;  // min of E[f|chi] - lower bound
  double worst_upper_margin = 0.0;  // min of upper bound - E[f|chi]
};

/// Checks the joint-mobility sandwich: for every conditioning placement,
/// f_av (1 - 2N a g^d) <= E[f(chi(t+d)) | chi(t)] <= f_av (1 + 2N a g^d).
inline Lemma1Report verify_lemma1(
    const MobilityModel& model, int n_users, int lag, double alpha,
    const std::function<double(const std::vector<int>&)>& f) {
  const int cells = model.cells();
  const double decay = alpha * std::pow(model.gamma, lag);
  if (decay > 1.0 / (static_cast<double>(n_users) * n_users))
    throw std::invalid_argument("lemma requires alpha gamma^d <= 1/N^2");
  if (detail::placement_count(cells, n_users) > kEnumerationBudget)
    throw std::invalid_argument("instance exceeds the enumeration budget");

  // d-step transition matrix
  Matrix power(cells, std::vector<double>(cells, 0.0));
  for (int i = 0; i < cells; ++i) power[i][i] = 1.0;
  for (int s = 0; s < lag; ++s) {
    Matrix next(cells, std::vector<double>(cells, 0.0));
    for (int i = 0; i < cells; ++i)
      for (int k = 0; k < cells; ++k) {
        if (power[i][k] == 0.0) continue;
        for (int j = 0; j < cells; ++j)
          next[i][j] += power[i][k] * model.transition[k][j];
      }
    power.swap(next);
  }

  double f_av = 0.0;
  detail::for_each_placement(cells, n_users, model.pi,
                             [&](const std::vector<int>& pl, double w) {
                               double v = f(pl);
                               if (v < 0.0)
                                 throw std::invalid_argument("f must be non-negative");
                               f_av += w * v;
                             });

  const double lower = f_av * (1.0 - 2.0 * n_users * decay);
  const double upper = f_av * (1.0 + 2.0 * n_users * decay);
  Lemma1Report rep;
  rep.worst_lower_margin = rep.worst_upper_margin = std::numeric_limits<double>::infinity();

  std::vector<int> from(n_users, 0);
  const std::uint64_t total = detail::placement_count(cells, n_users);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    double cond = 0.0;
    std::vector<int> to(n_users, 0);
    for (std::uint64_t jdx = 0; jdx < total; ++jdx) {
      double w = 1.0;
      for (int i = 0; i < n_users; ++i) w *= power[from[i]][to[i]];
      if (w > 0.0) cond += w * f(to);
      for (int i = 0; i < n_users; ++i) {
        if (++to[i] < cells) break;
        to[i] = 0;
      }
    }
    rep.worst_lower_margin = std::min(rep.worst_lower_margin, cond - lower);
    rep.worst_upper_margin = std::min(rep.worst_upper_margin, upper - cond);
    for (int i = 0; i < n_users; ++i) {
      if (++from[i] < cells) break;
      from[i] = 0;
    }
  }
  rep.ok = rep.worst_lower_margin >= -1e-12 && rep.worst_upper_margin >= -1e-12;
  return rep;
}

struct MonteCarloEstimate {
  SteadyStateProbs mean;
  SteadyStateProbs half_width;  // 99% confidence half-widths
  std::uint64_t samples = 0;
};

/// Stochastic cross-check for instances too large to enumerate: samples
/// joint placements directly from pi^N.
inline MonteCarloEstimate monte_carlo_probabilities(const CellTopology& topo,
                                                    const std::vector<double>& pi,
                                                    int n_users,
                                                    std::uint64_t samples,
                                                    std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("need at least 1e4 samples");
  const int cells = topo.cell_count();
  std::vector<double> cdf(pi.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) cdf[i] = (acc += pi[i]);

  double sum[6] = {0}, sumsq[6] = {0};
  std::vector<int> placement(n_users);
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto rng = substream(seed, Stream::Experiment, s, 0);
    for (int i = 0; i < n_users; ++i) {
      const double u = rng.uniform();
      int cell = 0;
      while (cell + 1 < cells && u >= cdf[cell]) ++cell;
      placement[i] = cell;
    }
    double obs[6] = {0};
    for (int cell = 0; cell < cells; ++cell) {
      const auto ev = detail::cell_events(topo, placement, cell);
      obs[0] += ev.pair_same;
      obs[1] += ev.busy_same;
      obs[2] += ev.lone_dest_adj;
      obs[3] += ev.lone_user_adj;
      obs[4] += ev.cross_pair;
      obs[5] += ev.crowd_no_pair;
    }
    for (int k = 0; k < 6; ++k) {
      const double v = obs[k] / cells;
      sum[k] += v;
      sumsq[k] += v * v;
    }
  }

  MonteCarloEstimate est;
  est.samples = samples;
  double* means[6] = {&est.mean.pair_same, &est.mean.busy_same, &est.mean.dest_adj,
                      &est.mean.user_adj, &est.mean.pair_cross, &est.mean.crowd_no_pair};
  double* widths[6] = {&est.half_width.pair_same, &est.half_width.busy_same,
                       &est.half_width.dest_adj, &est.half_width.user_adj,
                       &est.half_width.pair_cross, &est.half_width.crowd_no_pair};
  for (int k = 0; k < 6; ++k) {
    const double mean = sum[k] / samples;
    const double var = std::max(0.0, sumsq[k] / samples - mean * mean);
    *means[k] = mean;
    *widths[k] = 2.576 * std::sqrt(var / samples);
  }
  return est;
}

}  // namespace dtnlab::oracle
