#include <catch2/catch_amalgamated.hpp>

#include "dtnlab/config.hpp"

using namespace dtnlab;

TEST_CASE("presets round-trip through JSON") {
  for (const auto& name : preset_names()) {
    const SimConfig cfg = preset(name);
    const SimConfig back = parse_config(config_to_json(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.nodes == cfg.nodes);
    CHECK(back.radio.same_cell_rate == cfg.radio.same_cell_rate);
    CHECK(back.radio.adjacent_rate == cfg.radio.adjacent_rate);
    CHECK(back.mobility.type == cfg.mobility.type);
    CHECK(back.mobility.move_prob == cfg.mobility.move_prob);
    CHECK(back.mobility.pi == cfg.mobility.pi);
    CHECK(back.mobility.matrix == cfg.mobility.matrix);
    CHECK(back.algorithm == cfg.algorithm);
    CHECK(back.sched.delta == cfg.sched.delta);
    CHECK(back.lambda == cfg.lambda);
    CHECK(back.slots == cfg.slots);
    CHECK(back.seed == cfg.seed);
  }
  CHECK_THROWS_AS(preset("no-such-preset"), std::invalid_argument);
}

TEST_CASE("every preset yields a runnable spec") {
  for (const auto& name : preset_names()) {
    SimConfig cfg = preset(name);
    RunSpec spec = cfg.make_run_spec();
    CHECK(spec.n_users == cfg.nodes);
    CHECK(spec.warmup == cfg.slots / 10);
    CHECK(static_cast<int>(spec.mobility.pi.size()) == spec.topo.cell_count());
    spec.slots = 2000;
    spec.warmup = 200;
    if (name == "coded-relay-6") spec.saturate = true;
    CHECK_NOTHROW(run(spec));
  }
}

TEST_CASE("explicit topologies and warmups survive the round trip") {
  SimConfig cfg;
  cfg.nodes = 4;
  cfg.radio = RadioParams{2, 1, 1};
  cfg.topology.adjacency = {{1, 3}, {0, 2}, {1, 3}, {0, 2}};
  cfg.mobility.type = "iid";
  cfg.mobility.pi = {0.25, 0.25, 0.25, 0.25};
  cfg.algorithm = "min_energy";
  cfg.sched.beta = 1.4;
  cfg.lambda = 0.15;
  cfg.warmup = 777;

  const SimConfig back = parse_config(config_to_json(cfg));
  CHECK(back.topology.adjacency == cfg.topology.adjacency);
  CHECK(back.algorithm == "min_energy");
  CHECK(back.sched.beta == 1.4);
  CHECK(back.warmup == 777);
  CHECK(back.effective_warmup() == 777);

  SimConfig gapped;
  gapped.nodes = 4;
  gapped.radio = RadioParams{2, 1, 1};
  gapped.topology.rows = gapped.topology.cols = 2;
  gapped.topology.gaps = {{0, 0}};
  gapped.mobility.type = "random_walk";
  gapped.mobility.move_prob = 0.5;
  const SimConfig gb = parse_config(config_to_json(gapped));
  CHECK(gb.topology.gaps == gapped.topology.gaps);
  CHECK(gb.topology.build().cell_count() == 3);
}

TEST_CASE("config parsing rejects bad input") {
  json j = config_to_json(preset("paper-fig2"));
  j["schema"] = "dtnlab-config-99";
  CHECK_THROWS_AS(parse_config(j), std::invalid_argument);

  CHECK_THROWS_AS(parse_config(json::array()), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(json{{"schema", kConfigSchema}}), json::exception);

  json bad_mob = config_to_json(preset("paper-fig2"));
  bad_mob["mobility"] = {{"type", "teleport"}};
  CHECK_THROWS_AS(parse_config(bad_mob), std::invalid_argument);

  SimConfig cfg = preset("paper-fig2");
  cfg.algorithm = "flooding";
  CHECK_THROWS_AS(cfg.make_run_spec(), std::invalid_argument);
  cfg = preset("paper-fig2");
  cfg.mobility.type = "iid";
  cfg.mobility.pi = {0.5, 0.5};
  CHECK_THROWS_AS(cfg.make_run_spec(), std::invalid_argument);
}

TEST_CASE("capacity reports round-trip through JSON") {
  const auto topo = CellTopology::build_grid(4, 4);
  const auto model = random_walk_matrix(topo, 0.3);
  const auto rep = capacity(topo, model.pi, 20, RadioParams{2, 1, 1});
  const auto back = report_from_json(report_to_json(rep));
  CHECK(back.probs.pair_same == rep.probs.pair_same);
  CHECK(back.probs.user_adj == rep.probs.user_adj);
  CHECK(back.mu == rep.mu);
  CHECK(back.kappa == rep.kappa);
  CHECK(back.theta == rep.theta);
  CHECK(back.nodes == rep.nodes);
  CHECK(back.regime == rep.regime);
  CHECK(back.pi_adj == rep.pi_adj);

  json j = report_to_json(rep);
  j["schema"] = "other";
  CHECK_THROWS_AS(report_from_json(j), std::invalid_argument);
}
