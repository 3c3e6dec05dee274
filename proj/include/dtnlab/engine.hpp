#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dtnlab/analysis.hpp"
#include "dtnlab/mobility.hpp"
#include "dtnlab/rng.hpp"
#include "dtnlab/scheduler.hpp"
#include "dtnlab/topology.hpp"

namespace dtnlab {

struct Packet {
  std::uint64_t id = 0;
  int src = -1;
  int dst = -1;
  std::uint64_t birth_slot = 0;
  int hops = 0;
};

enum class Algorithm { TwoHopRelay, TwoHopRelayAlt, MinEnergy };

struct RunSpec {
  CellTopology topo;
  MobilityModel mobility;
  RadioParams radio;
  int n_users = 0;
  Algorithm algorithm = Algorithm::TwoHopRelay;
  SchedulerParams sched;  // zeroed fields are filled in from lambda
  double lambda = 0.0;
  std::uint64_t slots = 0;
  std::uint64_t warmup = 0;  // excluded from every average
  std::uint64_t seed = 1;
  bool saturate = false;  // sources never run dry; lambda and arrivals ignored
  std::vector<std::uint64_t> backlog_probes;  // slots at which to snapshot backlog
};

struct SimStats {
  std::uint64_t slots = 0;
  std::uint64_t warmup = 0;
  int n_users = 0;

  std::uint64_t arrivals = 0;  // post-warmup only, like everything below
  std::uint64_t delivered = 0;
  std::uint64_t delay_sum = 0;
  std::uint64_t energy_used = 0;       // cell-slots with >= 1 packet sent
  std::uint64_t energy_scheduled = 0;  // cell-slots with a committed opportunity

  double backlog_time_sum = 0.0;
  double backlog_second_half_sum = 0.0;
  std::uint64_t second_half_slots = 0;
  std::uint64_t final_backlog = 0;

  std::array<std::uint64_t, kDecisionKinds> kind_counts{};
  std::array<std::uint64_t, kDecisionKinds> opportunity_counts{};
  std::vector<std::uint64_t> delivered_per_node;     // indexed by destination
  std::vector<std::uint64_t> relay_delivered_by_dst; // 2-hop deliveries only
  std::vector<std::pair<std::uint64_t, std::uint64_t>> backlog_probes;  // (slot, backlog)

  SchedulerParams effective_sched;  // the parameters actually used

  std::uint64_t measured_slots() const { return slots - warmup; }
  double delivered_rate() const {
    return static_cast<double>(delivered) / (static_cast<double>(measured_slots()) * n_users);
  }
  double avg_delay() const {
    return delivered ? static_cast<double>(delay_sum) / delivered : 0.0;
  }
  double avg_backlog() const {
    return backlog_time_sum / static_cast<double>(measured_slots());
  }
  double avg_backlog_second_half() const {
    return second_half_slots ? backlog_second_half_sum / second_half_slots : 0.0;
  }
  double avg_energy() const {
    return static_cast<double>(energy_used) / (static_cast<double>(measured_slots()) * n_users);
  }
  double avg_energy_scheduled() const {
    return static_cast<double>(energy_scheduled) /
           (static_cast<double>(measured_slots()) * n_users);
  }
};

namespace detail {

/// Per-node FIFO bank: queue (holder, dst) for dst != holder. The queue
/// keyed by the holder's own destination holds the packets it generated;
/// every other queue holds relayed packets awaiting their destination.
class QueueBank {
 public:
  explicit QueueBank(int n_users) : n_(n_users), queues_(static_cast<std::size_t>(n_users) * n_users) {}

  std::deque<Packet>& at(int holder, int dst) { return queues_[holder * n_ + dst]; }
  const std::deque<Packet>& at(int holder, int dst) const { return queues_[holder * n_ + dst]; }

  bool has_new_packets(int node) const {
    return saturate_ || !at(node, partner_of(node)).empty();
  }
  bool has_relay_packets(int node, int dst) const {
    if (dst == partner_of(node)) return false;
    return !at(node, dst).empty();
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& q : queues_) t += q.size();
    return t;
  }

  void set_saturate(bool s) { saturate_ = s; }
  bool saturated() const { return saturate_; }

 private:
  int n_;
  std::vector<std::deque<Packet>> queues_;
  bool saturate_ = false;
};

inline void fill_effective_params(RunSpec& spec) {
  auto& s = spec.sched;
  if (spec.algorithm == Algorithm::MinEnergy) {
    const CapacityReport rep =
        capacity(spec.topo, spec.mobility.pi, spec.n_users, spec.radio);
    const EnergyCurve curve = energy_curve(rep);
    if (s.beta == 0.0) s.beta = 1.5;
    if (s.regime == 0) {
      if (spec.saturate) {
        s.regime = 2;
      } else {
        s.regime = 4;
        for (int k = 1; k <= 4; ++k)
          if (spec.lambda <= curve.knots[k]) { s.regime = k; break; }
      }
    }
    if (s.rho == 0.0) {
      const double lo = curve.knots[s.regime - 1], hi = curve.knots[s.regime];
      double rho = spec.saturate ? 0.5 : (spec.lambda - lo) / (hi - lo);
      if (rho <= 0.0) rho = 1e-6;
      if (rho >= 1.0) rho = 1.0 - 1e-6;
      s.rho = rho;
    }
    if (s.beta >= 1.0 / s.rho) s.beta = 0.5 * (1.0 + 1.0 / s.rho);
    if (s.delta < 0.0) s.delta = (s.beta - 1.0) / (2.0 * s.beta);
  } else {
    if (s.rho == 0.0) {
      const CapacityReport rep =
          capacity(spec.topo, spec.mobility.pi, spec.n_users, spec.radio);
      s.rho = spec.saturate ? 0.999 : spec.lambda / rep.mu;
    }
    if (s.delta < 0.0) {
      double d = (1.0 - s.rho) / 4.0;
      if (d < 0.001) d = 0.001;  // keeps the coin valid for overload runs
      if (d > 0.2499) d = 0.2499;
      s.delta = d;
    }
  }
}

}  // namespace detail

/// One deterministic run of the slotted simulation. Slot order: arrivals,
/// per-cell decisions from the frozen position snapshot, synchronized
/// transmission (packets received this slot become sendable next slot),
/// statistics, mobility step.
inline SimStats run(RunSpec spec) {
  if (spec.n_users < 2 || spec.n_users % 2 != 0)
    throw std::invalid_argument("n_users must be even and >= 2");
  if (spec.slots == 0) throw std::invalid_argument("slots must be positive");
  if (spec.warmup >= spec.slots)
    throw std::invalid_argument("warmup must be smaller than the horizon");
  if (!spec.saturate && (spec.lambda < 0.0 || spec.lambda > 1.0))
    throw std::invalid_argument("lambda must be in [0, 1]");
  spec.radio.validate();
  if (static_cast<int>(spec.mobility.pi.size()) != spec.topo.cell_count())
    throw std::invalid_argument("mobility model does not match topology");
  detail::fill_effective_params(spec);

  const int n = spec.n_users;
  const int cells = spec.topo.cell_count();
  const int r1_cap = spec.radio.same_cell_rate;
  const int r2_cap = spec.radio.adjacent_rate;

  SimStats stats;
  stats.slots = spec.slots;
  stats.warmup = spec.warmup;
  stats.n_users = n;
  stats.delivered_per_node.assign(n, 0);
  stats.relay_delivered_by_dst.assign(n, 0);
  stats.effective_sched = spec.sched;

  detail::QueueBank bank(n);
  bank.set_saturate(spec.saturate);
  std::uint64_t next_packet_id = 0;

  // Initial placement sampled from the stationary distribution.
  std::vector<int> positions(n);
  {
    std::vector<double> cdf(spec.mobility.pi.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) acc = cdf[i] = acc + spec.mobility.pi[i];
    for (int i = 0; i < n; ++i) {
      auto rng = substream(spec.seed, Stream::Experiment, 0, i);
      const double u = rng.uniform();
      int cell = 0;
      while (cell + 1 < cells && u >= cdf[cell]) ++cell;
      positions[i] = cell;
    }
  }

  std::vector<std::vector<int>> occupants(cells);
  std::vector<std::vector<int>> adjacent_occupants(cells);
  std::vector<CellDecision> decisions(cells);
  struct Reception { int rx; Packet packet; };
  std::vector<Reception> inbox;
  std::size_t probe_cursor = 0;
  std::vector<std::uint64_t> probes = spec.backlog_probes;
  std::sort(probes.begin(), probes.end());

  for (std::uint64_t t = 0; t < spec.slots; ++t) {
    const bool measured = t >= spec.warmup;

    // arrivals
    if (!spec.saturate && spec.lambda > 0.0) {
      for (int i = 0; i < n; ++i) {
        auto rng = substream(spec.seed, Stream::Arrivals, t, i);
        if (rng.uniform() < spec.lambda) {
          bank.at(i, partner_of(i)).push_back(
              Packet{next_packet_id++, i, partner_of(i), t, 0});
          if (measured) ++stats.arrivals;
        }
      }
    }

    // position snapshot
    for (auto& v : occupants) v.clear();
    for (int i = 0; i < n; ++i) occupants[positions[i]].push_back(i);
    for (int c = 0; c < cells; ++c) {
      auto& adj = adjacent_occupants[c];
      adj.clear();
      for (int nbr : spec.topo.neighbors(c))
        for (int i : occupants[nbr]) adj.push_back(i);
    }

    // per-cell decisions
    for (int c = 0; c < cells; ++c) {
      auto rng = substream(spec.seed, Stream::Scheduling, t, c);
      switch (spec.algorithm) {
        case Algorithm::TwoHopRelay:
          decisions[c] = two_hop_relay_decide(occupants[c], adjacent_occupants[c],
                                              bank, spec.radio, spec.sched, rng);
          break;
        case Algorithm::TwoHopRelayAlt:
          decisions[c] = two_hop_relay_decide_alt(occupants[c], adjacent_occupants[c],
                                                  bank, spec.radio, spec.sched, rng);
          break;
        case Algorithm::MinEnergy:
          decisions[c] = min_energy_decide(occupants[c], adjacent_occupants[c],
                                           bank, spec.radio, spec.sched, rng);
          break;
      }
    }

    // synchronized execution; receptions are committed after all sends
    inbox.clear();
    for (int c = 0; c < cells; ++c) {
      const CellDecision& d = decisions[c];
      if (measured && d.opportunity != DecisionKind::Idle) {
        ++stats.energy_scheduled;
        ++stats.opportunity_counts[static_cast<int>(d.opportunity)];
      }
      if (d.kind == DecisionKind::Idle) continue;

      const bool same_cell = d.kind == DecisionKind::SameCellDirect ||
                             d.kind == DecisionKind::SameCellRelayNew ||
                             d.kind == DecisionKind::SameCellRelayDeliver;
      const int capacity = same_cell ? r1_cap : r2_cap;
      const bool new_packets = d.kind == DecisionKind::SameCellDirect ||
                               d.kind == DecisionKind::AdjDirect ||
                               d.kind == DecisionKind::SameCellRelayNew ||
                               d.kind == DecisionKind::AdjRelayNew;
      const bool deliver = d.kind == DecisionKind::SameCellDirect ||
                           d.kind == DecisionKind::AdjDirect ||
                           d.kind == DecisionKind::SameCellRelayDeliver ||
                           d.kind == DecisionKind::AdjRelayDeliver;
      auto& queue = new_packets ? bank.at(d.tx, partner_of(d.tx)) : bank.at(d.tx, d.rx);

      int sent = 0;
      for (; sent < capacity; ++sent) {
        Packet pkt;
        if (!queue.empty()) {
          pkt = queue.front();
          queue.pop_front();
        } else if (spec.saturate && new_packets) {
          pkt = Packet{next_packet_id++, d.tx, partner_of(d.tx), t, 0};
        } else {
          break;
        }
        ++pkt.hops;
        if (deliver) {
          if (measured) {
            ++stats.delivered;
            stats.delay_sum += t - pkt.birth_slot;
            ++stats.delivered_per_node[pkt.dst];
            if (pkt.hops == 2) ++stats.relay_delivered_by_dst[pkt.dst];
          }
        } else {
          inbox.push_back(Reception{d.rx, pkt});
        }
      }
      if (sent > 0 && measured) {
        ++stats.energy_used;
        ++stats.kind_counts[static_cast<int>(d.kind)];
      }
    }
    for (auto& r : inbox) bank.at(r.rx, r.packet.dst).push_back(r.packet);

    // statistics
    const std::uint64_t backlog = bank.total();
    if (measured) {
      stats.backlog_time_sum += static_cast<double>(backlog);
      if (t >= spec.slots / 2) {
        stats.backlog_second_half_sum += static_cast<double>(backlog);
        ++stats.second_half_slots;
      }
    }
    while (probe_cursor < probes.size() && probes[probe_cursor] == t) {
      stats.backlog_probes.emplace_back(t, backlog);
      ++probe_cursor;
    }

    // mobility
    step(positions, spec.mobility, spec.seed, t);
  }
  stats.final_backlog = bank.total();
  return stats;
}

struct SweepRow {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  SimStats stats;
};

inline int sweep_threads() {
  if (const char* env = std::getenv("DTNLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// One independent run per (lambda, seed) combination, in deterministic row
/// order regardless of the worker count.
inline std::vector<SweepRow> sweep(const RunSpec& base,
                                   const std::vector<double>& lambdas,
                                   const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepRow> rows;
  for (double l : lambdas)
    for (std::uint64_t s : seeds) rows.push_back(SweepRow{l, s, {}});

  const int workers = std::min<int>(sweep_threads(), static_cast<int>(rows.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      RunSpec spec = base;
      spec.lambda = rows[i].lambda;
      spec.seed = rows[i].seed;
      spec.sched = base.sched;  // per-run effective params derived from lambda
      rows[i].stats = run(std::move(spec));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace dtnlab
