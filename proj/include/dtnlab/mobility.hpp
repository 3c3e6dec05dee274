#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dtnlab/rng.hpp"
#include "dtnlab/topology.hpp"

namespace dtnlab {

using Matrix = std::vector<std::vector<double>>;

/// Per-user Markov mobility: transition matrix P, stationary distribution pi,
/// and the second-largest eigenvalue modulus gamma that governs mixing.
struct MobilityModel {
  Matrix transition;          // C x C row-stochastic
  std::vector<double> pi;     // stationary distribution
  double gamma = 0.0;         // second-largest eigenvalue modulus
  bool unconstrained = false; // true only for the i.i.d. teleport model
  bool ergodic = true;

  int cells() const { return static_cast<int>(transition.size()); }
};

namespace detail {

inline void check_row_stochastic(const Matrix& p) {
  for (const auto& row : p) {
    if (row.size() != p.size())
      throw std::invalid_argument("transition matrix must be square");
    double s = 0.0;
    for (double v : row) {
      if (v < 0.0) throw std::invalid_argument("negative transition probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("transition matrix row does not sum to 1");
  }
}

inline Eigen::MatrixXd to_eigen(const Matrix& p) {
  const int c = static_cast<int>(p.size());
  Eigen::MatrixXd m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = p[i][j];
  return m;
}

/// Strong connectivity of the support graph.
inline bool strongly_connected(const Matrix& p) {
  const int c = static_cast<int>(p.size());
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(c, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int j = 0; j < c; ++j) {
        double w = transpose ? p[j][v] : p[v][j];
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
      }
    }
    return reached == c;
  };
  return reach_all(false) && reach_all(true);
}

/// Strong connectivity plus at least one lazy state.
inline bool support_ergodic(const Matrix& p) {
  const int c = static_cast<int>(p.size());
  if (!strongly_connected(p)) return false;
  for (int i = 0; i < c; ++i)
    if (p[i][i] > 0.0) return true;
  return false;  // periodic chains are treated as non-ergodic here
}

}  // namespace detail

/// Stationary distribution of an ergodic chain: power iteration with a dense
/// linear-solve fallback. Throws if neither converges (non-ergodic P).
inline std::vector<double> stationary_distribution(const Matrix& p) {
  detail::check_row_stochastic(p);
  if (!detail::strongly_connected(p))
    throw std::invalid_argument("chain is reducible: no unique stationary distribution");
  const int c = static_cast<int>(p.size());
  std::vector<double> pi(c, 1.0 / c), next(c, 0.0);
  const double tol = 1e-13;
  const long max_iter = 1000000;
  for (long it = 0; it < max_iter; ++it) {
    for (int j = 0; j < c; ++j) next[j] = 0.0;
    for (int i = 0; i < c; ++i) {
      const double w = pi[i];
      if (w == 0.0) continue;
      for (int j = 0; j < c; ++j) next[j] += w * p[i][j];
    }
    double diff = 0.0;
    for (int j = 0; j < c; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff <= tol) {
      double s = 0.0;
      for (double v : pi) s += v;
      for (double& v : pi) v /= s;
      for (double v : pi)
        if (v <= 0.0) throw std::invalid_argument("chain is not ergodic");
      return pi;
    }
  }
  // Dense fallback: solve pi (P - I) = 0 with sum(pi) = 1.
  Eigen::MatrixXd a = detail::to_eigen(p).transpose() - Eigen::MatrixXd::Identity(c, c);
  for (int j = 0; j < c; ++j) a(c - 1, j) = 1.0;  // replace one equation
  Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
  b(c - 1) = 1.0;
  Eigen::VectorXd x = a.fullPivLu().solve(b);
  double resid = 0.0;
  Eigen::VectorXd px = detail::to_eigen(p).transpose() * x - x;
  for (int j = 0; j < c; ++j) resid = std::max(resid, std::abs(px(j)));
  if (resid > 1e-10) throw std::invalid_argument("stationary solve failed: chain not ergodic");
  for (int j = 0; j < c; ++j)
    if (x(j) <= 0.0) throw std::invalid_argument("chain is not ergodic");
  return std::vector<double>(x.data(), x.data() + c);
}

/// Second-largest eigenvalue modulus of P.
inline double slem(const Matrix& p) {
  detail::check_row_stochastic(p);
  const int c = static_cast<int>(p.size());
  if (c == 1) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(detail::to_eigen(p));
  std::vector<double> mods(c);
  for (int i = 0; i < c; ++i) mods[i] = std::abs(solver.eigenvalues()(i));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  double g = mods[1];
  if (g > 1.0) g = std::min(g, 1.0);  // clip eigensolver roundoff
  return g;
}

/// Markovian random walk on a grid: with probability x pick one of the four
/// cardinal directions uniformly; infeasible directions fold back into the
/// stay probability.
inline MobilityModel random_walk_matrix(const CellTopology& topo, double move_prob) {
  if (move_prob < 0.0 || move_prob >= 1.0)
    throw std::invalid_argument("move probability must be in [0, 1)");
  if (!topo.grid())
    throw std::invalid_argument("random walk mobility requires a grid topology");
  const int c = topo.cell_count();
  MobilityModel m;
  m.transition.assign(c, std::vector<double>(c, 0.0));
  for (int i = 0; i < c; ++i) {
    double stay = 1.0;
    for (int n : topo.neighbors(i)) {
      m.transition[i][n] = move_prob / 4.0;
      stay -= move_prob / 4.0;
    }
    m.transition[i][i] = stay;
  }
  if (move_prob == 0.0) {
    m.ergodic = false;
    m.pi.assign(c, 1.0 / c);  // any distribution is stationary for P = I
    m.gamma = 1.0;
    return m;
  }
  m.pi = stationary_distribution(m.transition);
  m.gamma = slem(m.transition);
  return m;
}

/// The i.i.d. teleport model: every row of P equals pi, so gamma = 0.
inline MobilityModel iid_matrix(const std::vector<double>& pi) {
  const int c = static_cast<int>(pi.size());
  if (c < 1) throw std::invalid_argument("empty distribution");
  double s = 0.0;
  for (double v : pi) {
    if (v <= 0.0) throw std::invalid_argument("i.i.d. model requires strictly positive cell probabilities");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("distribution does not sum to 1");
  MobilityModel m;
  m.transition.assign(c, pi);
  m.pi = pi;
  m.gamma = 0.0;
  m.unconstrained = true;
  return m;
}

/// Wraps a custom transition matrix, checking the adjacency support.
inline MobilityModel custom_matrix(const CellTopology& topo, Matrix p) {
  detail::check_row_stochastic(p);
  const int c = topo.cell_count();
  if (static_cast<int>(p.size()) != c)
    throw std::invalid_argument("matrix size does not match topology");
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      if (p[i][j] > 0.0 && i != j && !topo.adjacent(i, j))
        throw std::invalid_argument("transition between non-adjacent cells");
  MobilityModel m;
  m.transition = std::move(p);
  m.ergodic = detail::support_ergodic(m.transition);
  if (!m.ergodic) throw std::invalid_argument("custom chain is not ergodic");
  m.pi = stationary_distribution(m.transition);
  m.gamma = slem(m.transition);
  return m;
}

/// Empirical mixing constant: the smallest alpha (>= 1) for which the
/// geometric sandwich holds over d = 1..horizon. Bounds derived from it are
/// empirical, not certified for all d.
inline double estimate_alpha(const MobilityModel& model, int horizon = 200) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (model.gamma <= 0.0) return 1.0;  // rows already equal pi
  const int c = model.cells();
  Matrix power = model.transition;
  double alpha = 1.0;
  for (int d = 1; d <= horizon; ++d) {
    if (d > 1) {
      Matrix next(c, std::vector<double>(c, 0.0));
      for (int i = 0; i < c; ++i)
        for (int k = 0; k < c; ++k) {
          const double w = power[i][k];
          if (w == 0.0) continue;
          for (int j = 0; j < c; ++j) next[i][j] += w * model.transition[k][j];
        }
      power.swap(next);
    }
    const double decay = std::pow(model.gamma, d);
    if (decay < 1e-300) break;
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) {
        double ratio = std::abs(power[i][j] - model.pi[j]) / (model.pi[j] * decay);
        alpha = std::max(alpha, ratio);
      }
  }
  return alpha;
}

/// Mixing lag of the throughput-delay bound: smallest d with
/// alpha gamma^d <= (1 - rho) / (8 N^2).
inline int mixing_lag(double alpha, double gamma, int n_users, double rho) {
  if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("rho must be in [0, 1)");
  if (alpha < 1.0) throw std::invalid_argument("alpha must be >= 1");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
  if (gamma == 0.0) return 0;
  const double target = (1.0 - rho) / (8.0 * n_users * static_cast<double>(n_users));
  int d = static_cast<int>(std::ceil(std::log(8.0 * n_users * static_cast<double>(n_users) * alpha / (1.0 - rho)) /
                                     std::log(1.0 / gamma)));
  if (d < 0) d = 0;
  while (alpha * std::pow(gamma, d) > target) ++d;
  return d;
}

/// Mixing lag of the energy-delay bound: smallest d with
/// alpha gamma^d <= (p - q) rho (beta - 1) / (4 beta (p + q) N^2).
inline int mixing_lag_energy(double alpha, double gamma, int n_users, double p,
                             double q, double rho, double beta) {
  if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("rho must be in (0, 1)");
  if (beta <= 1.0 || beta >= 1.0 / rho) throw std::invalid_argument("beta must be in (1, 1/rho)");
  if (p <= q) throw std::invalid_argument("requires p > q");
  if (gamma == 0.0) return 0;
  const double n2 = static_cast<double>(n_users) * n_users;
  const double target = (p - q) * rho * (beta - 1.0) / (4.0 * beta * (p + q) * n2);
  int d = static_cast<int>(std::ceil(std::log(4.0 * n2 * (p + q) * alpha * beta /
                                              ((p - q) * rho * (beta - 1.0))) /
                                     std::log(1.0 / gamma)));
  if (d < 0) d = 0;
  while (alpha * std::pow(gamma, d) > target) ++d;
  return d;
}

/// One transition sampled from row P[current].
inline int next_position(const MobilityModel& model, int current, double u) {
  const auto& row = model.transition[current];
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(row.size()); ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  return static_cast<int>(row.size()) - 1;
}

/// Advances every node one slot; draws come from the mobility substream so
/// the walk is bit-reproducible given the root seed.
inline void step(std::vector<int>& positions, const MobilityModel& model,
                 std::uint64_t root_seed, std::uint64_t slot) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    auto rng = substream(root_seed, Stream::Mobility, slot, i);
    positions[i] = next_position(model, positions[i], rng.uniform());
  }
}

}  // namespace dtnlab
