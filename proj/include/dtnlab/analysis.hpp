#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtnlab/mobility.hpp"
#include "dtnlab/topology.hpp"

namespace dtnlab {

/// Same-cell rate R1, adjacent-cell rate R2 (packets/slot), and the arrival
/// burst bound A_max.
struct RadioParams {
  int same_cell_rate = 1;  // R1
  int adjacent_rate = 0;   // R2
  int max_arrivals = 1;    // A_max

  void validate() const {
    if (same_cell_rate < 1) throw std::invalid_argument("R1 must be >= 1");
    if (adjacent_rate < 0 || adjacent_rate > same_cell_rate)
      throw std::invalid_argument("need R1 >= R2 >= 0");
    if (max_arrivals < 1) throw std::invalid_argument("A_max must be >= 1");
  }
};

enum class RateRegime {
  SameCellDominant,  // R1 >= 2 R2
  AdjacentCompetitive,  // 2 R2 > R1 >= R2
};

inline RateRegime rate_regime(const RadioParams& radio) {
  return radio.same_cell_rate >= 2 * radio.adjacent_rate
             ? RateRegime::SameCellDominant
             : RateRegime::AdjacentCompetitive;
}

/// The six steady-state cell-occupancy probabilities, each averaged over
/// cells. Comments give the event whose probability is taken per cell.
struct SteadyStateProbs {
  double pair_same = 0.0;      // q:   a source-destination pair in the cell
  double busy_same = 0.0;      // p:   at least 2 users in the cell
  double dest_adj = 0.0;       // q':  exactly 1 user, destination adjacent
  double user_adj = 0.0;       // p':  exactly 1 user, some user adjacent
  double pair_cross = 0.0;     // q'': no pair inside, but a pair split with an adjacent cell
  double crowd_no_pair = 0.0;  // p'': >=2 users, no pair inside or with adjacent cells
};

/// Capacity analysis of one instance in a single report.
struct CapacityReport {
  SteadyStateProbs probs;
  double theta = 0.0;   // users per cell, N / C
  double mu = 0.0;      // network capacity, packets/slot per user
  RateRegime regime = RateRegime::SameCellDominant;
  double kappa = 0.0;   // fraction of capacity carried via relays
  std::vector<double> pi_adj;  // per-cell adjacent-occupancy mass
  int nodes = 0;
  RadioParams radio;
};

/// Conditional probability that a user is in some adjacent cell of c, given
/// it is not in c.
inline double adjacent_mass(const CellTopology& topo,
                            const std::vector<double>& pi, int cell) {
  double mass = 0.0;
  for (int n : topo.neighbors(cell)) mass += pi[n];
  const double other = 1.0 - pi[cell];
  if (other <= 0.0) {
    if (!topo.neighbors(cell).empty())
      throw std::invalid_argument("pi_c = 1 with non-empty adjacency");
    return 0.0;
  }
  return mass / other;
}

namespace detail {

/// Compensated (Kahan) accumulator for the per-cell probability sums.
class KahanSum {
 public:
  void add(double v) {
    double y = v - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// 2^i * C(N/2, i) * pi^i * (1-pi)^(N-i), evaluated in log space for large N
/// to avoid binomial overflow.
inline double paired_occupancy_term(int n_users, int i, double pi) {
  const int half = n_users / 2;
  if (pi <= 0.0) return i == 0 ? std::pow(1.0 - pi, n_users) : 0.0;
  if (pi >= 1.0) return i == n_users ? 1.0 : 0.0;
  if (n_users <= 50) {
    double binom = 1.0;
    for (int k = 0; k < i; ++k) binom = binom * (half - k) / (k + 1);
    return std::ldexp(binom * std::pow(pi, i) * std::pow(1.0 - pi, n_users - i), i);
  }
  const double log_binom = std::lgamma(half + 1.0) - std::lgamma(i + 1.0) -
                           std::lgamma(half - i + 1.0);
  return std::exp(i * std::log(2.0) + log_binom + i * std::log(pi) +
                  (n_users - i) * std::log1p(-pi));
}

}  // namespace detail

/// Closed forms for the six probabilities from the per-cell occupancy
/// distribution pi and the number of users N (even, >= 2).
inline SteadyStateProbs steady_state_probs(const CellTopology& topo,
                                           const std::vector<double>& pi,
                                           int n_users) {
  if (n_users < 2 || n_users % 2 != 0)
    throw std::invalid_argument("N must be even and >= 2");
  const int c = topo.cell_count();
  if (static_cast<int>(pi.size()) != c)
    throw std::invalid_argument("pi size does not match topology");

  detail::KahanSum q, p, q1, p1, q2, p2;
  for (int cell = 0; cell < c; ++cell) {
    const double pc = pi[cell];
    const double adj = adjacent_mass(topo, pi, cell);
    const double none = std::pow(1.0 - pc, n_users);
    const double lone = n_users * pc * std::pow(1.0 - pc, n_users - 1);

    q.add(1.0 - std::pow(1.0 - pc * pc, n_users / 2));
    p.add(1.0 - none - lone);
    q1.add(adj * lone);
    p1.add((1.0 - std::pow(1.0 - adj, n_users - 1)) * lone);

    detail::KahanSum cross, crowd;
    for (int i = 1; i <= n_users / 2; ++i) {
      const double occ = detail::paired_occupancy_term(n_users, i, pc);
      const double miss = std::pow(1.0 - adj, i);
      cross.add(occ * (1.0 - miss));
      if (i >= 2) crowd.add(occ * miss);
    }
    q2.add(cross.value());
    p2.add(crowd.value());
  }

  SteadyStateProbs out;
  out.pair_same = q.value() / c;
  out.busy_same = p.value() / c;
  out.dest_adj = q1.value() / c;
  out.user_adj = p1.value() / c;
  out.pair_cross = q2.value() / c;
  out.crowd_no_pair = p2.value() / c;
  return out;
}

/// Relay fraction at capacity.
inline double relay_fraction(const SteadyStateProbs& pr, const RadioParams& radio) {
  const double r1 = radio.same_cell_rate, r2 = radio.adjacent_rate;
  const double num = r1 * pr.busy_same + r2 * pr.user_adj - r1 * pr.pair_same - r2 * pr.dest_adj;
  const double den = r1 * pr.busy_same + r2 * pr.user_adj + r1 * pr.pair_same + r2 * pr.dest_adj;
  return num / den;
}

/// Network capacity (packets/slot per user) for both rate regimes.
inline CapacityReport capacity(const CellTopology& topo,
                               const std::vector<double>& pi, int n_users,
                               const RadioParams& radio) {
  radio.validate();
  CapacityReport rep;
  rep.probs = steady_state_probs(topo, pi, n_users);
  rep.theta = static_cast<double>(n_users) / topo.cell_count();
  rep.regime = rate_regime(radio);
  rep.nodes = n_users;
  rep.radio = radio;
  rep.pi_adj.resize(topo.cell_count());
  for (int cell = 0; cell < topo.cell_count(); ++cell)
    rep.pi_adj[cell] = adjacent_mass(topo, pi, cell);

  const auto& pr = rep.probs;
  const double r1 = radio.same_cell_rate, r2 = radio.adjacent_rate;
  if (rep.regime == RateRegime::SameCellDominant) {
    rep.mu = (r1 * pr.pair_same + r1 * pr.busy_same + r2 * pr.dest_adj +
              r2 * pr.user_adj) /
             (2.0 * rep.theta);
  } else {
    rep.mu = (2.0 * r1 * pr.pair_same + 2.0 * r2 * pr.pair_cross +
              r1 * pr.crowd_no_pair + r2 * (pr.user_adj - pr.dest_adj)) /
             (2.0 * rep.theta);
  }
  rep.kappa = relay_fraction(pr, radio);
  return rep;
}

/// Lyapunov drift constant B = (A_max + R1 + J R2)^2 + R1^2.
inline double b_constant(const RadioParams& radio, int max_degree) {
  const double in_rate = radio.max_arrivals + radio.same_cell_rate +
                         static_cast<double>(max_degree) * radio.adjacent_rate;
  return in_rate * in_rate +
         static_cast<double>(radio.same_cell_rate) * radio.same_cell_rate;
}

struct DelayBound {
  double slots = 0.0;
  int mixing_lag = 0;
  double rho = 0.0;
  double b = 0.0;
};

/// Minimum energy function: a piecewise linear curve with at most four
/// pieces, valid for R1 >= 2 R2.
struct EnergyCurve {
  // knots[0] = 0, interior breakpoints, knots[4] = mu
  std::array<double, 5> knots{};
  std::array<double, 4> slopes{};  // 1/R1, 2/R1, 1/R2, 2/R2
  std::array<double, 5> values{};  // curve value at each knot
  double mu = 0.0;

  double operator()(double lambda) const {
    if (lambda < 0.0) throw std::invalid_argument("negative rate");
    if (lambda >= mu) throw std::invalid_argument("rate not stabilizable");
    for (int piece = 3; piece >= 0; --piece) {
      if (lambda >= knots[piece])
        return values[piece] + slopes[piece] * (lambda - knots[piece]);
    }
    return 0.0;
  }
};

inline EnergyCurve energy_curve(const CapacityReport& rep) {
  const RadioParams& radio = rep.radio;
  if (rate_regime(radio) != RateRegime::SameCellDominant)
    throw std::invalid_argument(
        "minimum energy function is only available for R1 >= 2 R2");
  const auto& pr = rep.probs;
  const double r1 = radio.same_cell_rate;
  const double r2 = radio.adjacent_rate;
  const double theta = rep.theta;

  EnergyCurve curve;
  curve.mu = rep.mu;
  curve.knots = {0.0, r1 * pr.pair_same / theta,
                 r1 * (pr.busy_same + pr.pair_same) / (2.0 * theta),
                 (r1 * (pr.busy_same + pr.pair_same) + 2.0 * r2 * pr.dest_adj) /
                     (2.0 * theta),
                 rep.mu};
  const double inf = std::numeric_limits<double>::infinity();
  curve.slopes = {1.0 / r1, 2.0 / r1, r2 > 0 ? 1.0 / r2 : inf,
                  r2 > 0 ? 2.0 / r2 : inf};
  curve.values[0] = 0.0;
  curve.values[1] = pr.pair_same / theta;
  curve.values[2] = pr.busy_same / theta;
  curve.values[3] = (pr.busy_same + pr.dest_adj) / theta;
  curve.values[4] = r2 > 0 ? curve.values[3] + curve.slopes[3] * (curve.knots[4] - curve.knots[3])
                           : curve.values[3];
  return curve;
}

/// Average delay bound for the 2-hop relay algorithm at load rho = lambda/mu.
/// The (alpha, gamma, d) inputs are reported back so results are auditable.
inline DelayBound delay_bound(const CapacityReport& rep, int max_degree,
                              double lambda, double alpha, double gamma) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  const double rho = lambda / rep.mu;
  if (rho >= 1.0) throw std::invalid_argument("unstable: lambda >= mu");
  DelayBound out;
  out.rho = rho;
  out.b = b_constant(rep.radio, max_degree);
  out.mixing_lag = mixing_lag(alpha, gamma, rep.nodes, rho);
  out.slots = out.b * rep.nodes * (2.0 * out.mixing_lag + 1.0) /
              (lambda * rep.mu * rep.kappa * (1.0 - rho));
  return out;
}

struct EnergyDelayBounds {
  double avg_energy = 0.0;  // per user per slot
  double delay_slots = 0.0;
  int mixing_lag = 0;
  double rho = 0.0;   // position of lambda inside the second piece
  double delta = 0.0; // relay-direction coin used by the matching algorithm
};

/// Energy/delay tradeoff bounds for the minimum energy algorithm, valid
/// when lambda lies strictly inside the second piece of the curve.
inline EnergyDelayBounds energy_bounds(const CapacityReport& rep, int max_degree,
                                       double lambda, double beta, double alpha,
                                       double gamma) {
  const auto& pr = rep.probs;
  const double r1 = rep.radio.same_cell_rate;
  const double theta = rep.theta;
  const double base = r1 * pr.pair_same / theta;
  const double span = r1 * (pr.busy_same - pr.pair_same) / (2.0 * theta);
  const double rho = (lambda - base) / span;
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("lambda outside the relay-assisted piece of the curve");
  if (beta <= 1.0 || beta >= 1.0 / rho)
    throw std::invalid_argument("beta must be in (1, 1/rho)");

  EnergyDelayBounds out;
  out.rho = rho;
  out.delta = (beta - 1.0) / (2.0 * beta);
  const EnergyCurve curve = energy_curve(rep);
  out.avg_energy = curve(lambda) +
                   (beta - 1.0) * rho * (pr.busy_same - pr.pair_same) / theta;
  out.mixing_lag = mixing_lag_energy(alpha, gamma, rep.nodes, pr.busy_same,
                                     pr.pair_same, rho, beta);
  const double b = b_constant(rep.radio, max_degree);
  out.delay_slots = 4.0 * b * rep.nodes * theta * (2.0 * out.mixing_lag + 1.0) /
                    (lambda * r1 * (pr.busy_same - pr.pair_same) * rho * (beta - 1.0));
  return out;
}

}  // namespace dtnlab
