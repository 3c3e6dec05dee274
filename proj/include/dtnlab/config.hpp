#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dtnlab/analysis.hpp"
#include "dtnlab/engine.hpp"
#include "dtnlab/mobility.hpp"
#include "dtnlab/topology.hpp"

namespace dtnlab {

using nlohmann::json;

constexpr const char* kConfigSchema = "dtnlab-config-1";
constexpr const char* kReportSchema = "dtnlab-report-1";

struct MobilitySpec {
  std::string type;  // "random_walk" | "iid" | "custom"
  double move_prob = 0.0;
  std::vector<double> pi;
  Matrix matrix;

  MobilityModel build(const CellTopology& topo) const {
    if (type == "random_walk") return random_walk_matrix(topo, move_prob);
    if (type == "iid") {
      if (static_cast<int>(pi.size()) != topo.cell_count())
        throw std::invalid_argument("pi length does not match cell count");
      return iid_matrix(pi);
    }
    if (type == "custom") return custom_matrix(topo, matrix);
    throw std::invalid_argument("unknown mobility type: " + type);
  }
};

struct TopologySpec {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> gaps;
  std::vector<std::vector<int>> adjacency;  // non-empty = explicit adjacency

  CellTopology build() const {
    if (!adjacency.empty()) return CellTopology::from_adjacency(adjacency);
    return CellTopology::build_grid(rows, cols, gaps);
  }
};

struct SimConfig {
  std::string name = "custom";
  int nodes = 0;
  RadioParams radio;
  TopologySpec topology;
  MobilitySpec mobility;
  std::string algorithm = "two_hop_relay";  // | "two_hop_relay_alt" | "min_energy"
  SchedulerParams sched;
  double lambda = 0.0;
  std::uint64_t slots = 100000;
  std::uint64_t warmup = 0;  // 0 = default 10% of the horizon
  std::uint64_t seed = 1;

  std::uint64_t effective_warmup() const { return warmup ? warmup : slots / 10; }

  RunSpec make_run_spec() const {
    RunSpec spec;
    spec.topo = topology.build();
    spec.mobility = mobility.build(spec.topo);
    spec.radio = radio;
    spec.n_users = nodes;
    if (algorithm == "two_hop_relay") spec.algorithm = Algorithm::TwoHopRelay;
    else if (algorithm == "two_hop_relay_alt") spec.algorithm = Algorithm::TwoHopRelayAlt;
    else if (algorithm == "min_energy") spec.algorithm = Algorithm::MinEnergy;
    else throw std::invalid_argument("unknown algorithm: " + algorithm);
    spec.sched = sched;
    spec.lambda = lambda;
    spec.slots = slots;
    spec.warmup = effective_warmup();
    spec.seed = seed;
    return spec;
  }
};

inline json config_to_json(const SimConfig& cfg) {
  json j;
  j["schema"] = kConfigSchema;
  j["name"] = cfg.name;
  j["nodes"] = cfg.nodes;
  j["radio"] = {{"r1", cfg.radio.same_cell_rate},
                {"r2", cfg.radio.adjacent_rate},
                {"a_max", cfg.radio.max_arrivals}};
  if (!cfg.topology.adjacency.empty()) {
    j["topology"] = {{"adjacency", cfg.topology.adjacency}};
  } else {
    json gaps = json::array();
    for (auto [r, c] : cfg.topology.gaps) gaps.push_back({r, c});
    j["topology"] = {{"rows", cfg.topology.rows}, {"cols", cfg.topology.cols}, {"gaps", gaps}};
  }
  if (cfg.mobility.type == "random_walk")
    j["mobility"] = {{"type", "random_walk"}, {"move_prob", cfg.mobility.move_prob}};
  else if (cfg.mobility.type == "iid")
    j["mobility"] = {{"type", "iid"}, {"pi", cfg.mobility.pi}};
  else
    j["mobility"] = {{"type", "custom"}, {"matrix", cfg.mobility.matrix}};
  json alg = {{"type", cfg.algorithm}};
  if (cfg.sched.rho > 0.0) alg["rho"] = cfg.sched.rho;
  if (cfg.sched.beta > 0.0) alg["beta"] = cfg.sched.beta;
  if (cfg.sched.delta >= 0.0) alg["delta"] = cfg.sched.delta;
  if (cfg.sched.regime > 0) alg["regime"] = cfg.sched.regime;
  j["algorithm"] = alg;
  j["sim"] = {{"lambda", cfg.lambda}, {"slots", cfg.slots},
              {"warmup", cfg.warmup}, {"seed", cfg.seed}};
  return j;
}

inline SimConfig parse_config(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.contains("schema") && j.at("schema").get<std::string>() != kConfigSchema)
    throw std::invalid_argument("unsupported config schema");
  SimConfig cfg;
  cfg.name = j.value("name", std::string("custom"));
  cfg.nodes = j.at("nodes").get<int>();

  const json& radio = j.at("radio");
  cfg.radio.same_cell_rate = radio.at("r1").get<int>();
  cfg.radio.adjacent_rate = radio.at("r2").get<int>();
  cfg.radio.max_arrivals = radio.value("a_max", 1);

  const json& topo = j.at("topology");
  if (topo.contains("adjacency")) {
    cfg.topology.adjacency = topo.at("adjacency").get<std::vector<std::vector<int>>>();
  } else {
    cfg.topology.rows = topo.at("rows").get<int>();
    cfg.topology.cols = topo.at("cols").get<int>();
    for (const auto& g : topo.value("gaps", json::array()))
      cfg.topology.gaps.emplace_back(g.at(0).get<int>(), g.at(1).get<int>());
  }

  const json& mob = j.at("mobility");
  cfg.mobility.type = mob.at("type").get<std::string>();
  if (cfg.mobility.type == "random_walk")
    cfg.mobility.move_prob = mob.at("move_prob").get<double>();
  else if (cfg.mobility.type == "iid")
    cfg.mobility.pi = mob.at("pi").get<std::vector<double>>();
  else if (cfg.mobility.type == "custom")
    cfg.mobility.matrix = mob.at("matrix").get<Matrix>();
  else
    throw std::invalid_argument("unknown mobility type: " + cfg.mobility.type);

  if (j.contains("algorithm")) {
    const json& alg = j.at("algorithm");
    cfg.algorithm = alg.value("type", std::string("two_hop_relay"));
    cfg.sched.rho = alg.value("rho", 0.0);
    cfg.sched.beta = alg.value("beta", 0.0);
    cfg.sched.delta = alg.value("delta", -1.0);
    cfg.sched.regime = alg.value("regime", 0);
  }
  if (j.contains("sim")) {
    const json& sim = j.at("sim");
    cfg.lambda = sim.value("lambda", 0.0);
    cfg.slots = sim.value("slots", std::uint64_t{100000});
    cfg.warmup = sim.value("warmup", std::uint64_t{0});
    cfg.seed = sim.value("seed", std::uint64_t{1});
  }
  return cfg;
}

/// Built-in instances. "paper-fig2" is the 4x4 reference network; the
/// small-* instances are sized for exhaustive enumeration.
inline SimConfig preset(const std::string& name) {
  SimConfig cfg;
  cfg.name = name;
  if (name == "paper-fig2") {
    cfg.nodes = 20;
    cfg.radio = RadioParams{2, 1, 1};
    cfg.topology.rows = cfg.topology.cols = 4;
    cfg.mobility.type = "random_walk";
    cfg.mobility.move_prob = 0.3;
    cfg.lambda = 0.4;
    return cfg;
  }
  if (name == "coded-relay-6") {
    cfg.nodes = 6;
    cfg.radio = RadioParams{1, 0, 1};
    cfg.topology.rows = cfg.topology.cols = 2;
    cfg.mobility.type = "iid";
    cfg.mobility.pi.assign(4, 0.25);
    cfg.sched.delta = 0.0;
    return cfg;
  }
  if (name == "small-2x2-n4" || name == "small-2x2-n6") {
    cfg.nodes = name == "small-2x2-n4" ? 4 : 6;
    cfg.radio = RadioParams{2, 1, 1};
    cfg.topology.rows = cfg.topology.cols = 2;
    cfg.mobility.type = "iid";
    cfg.mobility.pi.assign(4, 0.25);
    cfg.lambda = 0.1;
    return cfg;
  }
  if (name == "strip-1x3-n4") {
    cfg.nodes = 4;
    cfg.radio = RadioParams{2, 1, 1};
    cfg.topology.rows = 1;
    cfg.topology.cols = 3;
    cfg.mobility.type = "custom";
    cfg.mobility.matrix = {{0.9, 0.1, 0.0}, {0.2, 0.6, 0.2}, {0.0, 0.2, 0.8}};
    cfg.lambda = 0.1;
    return cfg;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

inline std::vector<std::string> preset_names() {
  return {"paper-fig2", "coded-relay-6", "small-2x2-n4", "small-2x2-n6", "strip-1x3-n4"};
}

inline json report_to_json(const CapacityReport& rep) {
  json j;
  j["schema"] = kReportSchema;
  j["probs"] = {{"pair_same", rep.probs.pair_same},
                {"busy_same", rep.probs.busy_same},
                {"dest_adj", rep.probs.dest_adj},
                {"user_adj", rep.probs.user_adj},
                {"pair_cross", rep.probs.pair_cross},
                {"crowd_no_pair", rep.probs.crowd_no_pair}};
  j["theta"] = rep.theta;
  j["mu"] = rep.mu;
  j["kappa"] = rep.kappa;
  j["nodes"] = rep.nodes;
  j["regime"] = rep.regime == RateRegime::SameCellDominant ? "same_cell_dominant"
                                                           : "adjacent_competitive";
  j["radio"] = {{"r1", rep.radio.same_cell_rate},
                {"r2", rep.radio.adjacent_rate},
                {"a_max", rep.radio.max_arrivals}};
  j["pi_adj"] = rep.pi_adj;
  return j;
}

inline CapacityReport report_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kReportSchema)
    throw std::invalid_argument("unsupported report schema");
  CapacityReport rep;
  const json& pr = j.at("probs");
  rep.probs.pair_same = pr.at("pair_same").get<double>();
  rep.probs.busy_same = pr.at("busy_same").get<double>();
  rep.probs.dest_adj = pr.at("dest_adj").get<double>();
  rep.probs.user_adj = pr.at("user_adj").get<double>();
  rep.probs.pair_cross = pr.at("pair_cross").get<double>();
  rep.probs.crowd_no_pair = pr.at("crowd_no_pair").get<double>();
  rep.theta = j.at("theta").get<double>();
  rep.mu = j.at("mu").get<double>();
  rep.kappa = j.at("kappa").get<double>();
  rep.nodes = j.at("nodes").get<int>();
  rep.regime = j.at("regime").get<std::string>() == "same_cell_dominant"
                   ? RateRegime::SameCellDominant
                   : RateRegime::AdjacentCompetitive;
  rep.radio.same_cell_rate = j.at("radio").at("r1").get<int>();
  rep.radio.adjacent_rate = j.at("radio").at("r2").get<int>();
  rep.radio.max_arrivals = j.at("radio").at("a_max").get<int>();
  rep.pi_adj = j.at("pi_adj").get<std::vector<double>>();
  return rep;
}

}  // namespace dtnlab
