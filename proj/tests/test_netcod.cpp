#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "dtnlab/netcod.hpp"

using namespace dtnlab;
using netcod::kConfigMembers;
using netcod::kRelay;

namespace {

struct AlwaysFull {
  bool has_new_packets(int) const { return true; }
  bool has_relay_packets(int, int) const { return true; }
};

}  // namespace

TEST_CASE("configuration constants") {
  CHECK_THAT(netcod::config_probability(),
             Catch::Matchers::WithinAbs(4.0 * 27.0 / 4096.0, 1e-15));
  // at eps = 1/8 and a fair baseline coin the per-node gain collapses to nu/36
  CHECK_THAT(netcod::analytic_gain(0.125, 0.0),
             Catch::Matchers::WithinAbs(netcod::config_probability() / 36.0, 1e-15));
  CHECK(netcod::analytic_gain(0.2, 0.0) < netcod::analytic_gain(0.05, 0.0));
}

TEST_CASE("destination pairs map to configurations") {
  CHECK(netcod::config_of_pair(0, 3) == 0);
  CHECK(netcod::config_of_pair(3, 0) == 0);
  CHECK(netcod::config_of_pair(1, 2) == 1);
  CHECK(netcod::config_of_pair(1, 3) == 2);
  CHECK(netcod::config_of_pair(0, 2) == 3);
  // source-destination partners never share a configuration
  CHECK_THROWS_AS(netcod::config_of_pair(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(netcod::config_of_pair(4, 0), std::invalid_argument);
}

TEST_CASE("configuration detection") {
  // relay with nodes 1 and 2 in cell 3, everyone else elsewhere
  const auto hit = netcod::detect_configuration({0, 3, 3, 1, 3, 2});
  REQUIRE(hit.has_value());
  CHECK(hit->cell == 3);
  CHECK(hit->config == 1);

  // an extra bystander in the cell breaks the configuration
  CHECK_FALSE(netcod::detect_configuration({0, 3, 3, 1, 3, 3}).has_value());
  // relay missing from the crowd
  CHECK_FALSE(netcod::detect_configuration({3, 3, 3, 1, 0, 2}).has_value());
  // relay alone with a partnered pair is not a configuration
  CHECK_FALSE(netcod::detect_configuration({3, 3, 0, 1, 3, 2}).has_value());

  CHECK_THROWS_AS(netcod::detect_configuration({0, 1, 2}), std::invalid_argument);
}

TEST_CASE("enhanced cell distribution audit") {
  AlwaysFull q;
  const double eps = 0.125, delta = 0.0;
  const int cfg = 0;  // members 0 and 3
  const int a = kConfigMembers[cfg][0], b = kConfigMembers[cfg][1];
  const std::uint64_t trials = 1000000;

  std::uint64_t fresh_a = 0, fresh_b = 0, coded = 0;
  std::map<std::tuple<int, int, bool>, std::uint64_t> combos;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = substream(77, Stream::Scheduling, t, 0);
    const auto act = netcod::nc_schedule(cfg, eps, delta, q, rng);
    switch (act.type) {
      case netcod::NcActionType::NewToRelay:
        (act.sender == a ? fresh_a : fresh_b) += 1;
        break;
      case netcod::NcActionType::CodedDeliver:
        ++coded;
        break;
      case netcod::NcActionType::Unchanged: {
        const bool is_new = act.cell.opportunity == DecisionKind::SameCellRelayNew;
        ++combos[{act.cell.tx, act.cell.rx, is_new}];
        break;
      }
    }
  }

  const double n = static_cast<double>(trials);
  const double tol = 0.002;  // > 6 binomial standard errors at these rates
  CHECK(std::abs(fresh_a / n - (1.0 - eps) / 9.0) < tol);
  CHECK(std::abs(fresh_b / n - (1.0 - eps) / 9.0) < tol);
  CHECK(std::abs(coded / n - (1.0 + 2.0 * eps) / 9.0) < tol);

  const double pn = (1.0 - delta) / 12.0, pd = (1.0 + delta) / 12.0;
  const std::pair<std::tuple<int, int, bool>, double> expected[8] = {
      {{a, kRelay, false}, pd}, {{b, kRelay, false}, pd},
      {{kRelay, a, true}, pn},  {{kRelay, b, true}, pn},
      {{a, b, true}, pn},       {{a, b, false}, pd},
      {{b, a, true}, pn},       {{b, a, false}, pd},
  };
  double unchanged_total = 0.0;
  for (const auto& [key, prob] : expected) {
    REQUIRE(combos.count(key) == 1);
    const double freq = combos[key] / n;
    CHECK(std::abs(freq - prob) < tol);
    unchanged_total += freq;
  }
  CHECK(combos.size() == 8);
  CHECK_THAT(unchanged_total, Catch::Matchers::WithinAbs(2.0 / 3.0, 0.003));
}

TEST_CASE("enhanced run bookkeeping") {
  const auto st = netcod::run_enhanced(0.125, 0.0, 500000, 11);
  CHECK(st.xor_decodes == 2 * st.xor_broadcasts);
  CHECK(st.xor_broadcasts > 0);

  std::uint64_t arrivals = 0, services = 0;
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 2; ++s) {
      arrivals += st.coded_arrivals[k][s];
      services += st.coded_services[k][s];
    }
  CHECK(arrivals == services + st.coded_final_backlog);
  // the eps bias keeps every coded queue stable
  CHECK(st.coded_final_backlog < 100);
  for (int k = 0; k < 4; ++k)
    for (int s = 0; s < 2; ++s) CHECK(st.coded_peak[k][s] < 200);

  CHECK_THROWS_AS(netcod::run_enhanced(0.0, 0.0, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(netcod::run_enhanced(0.3, 0.0, 1000, 1), std::invalid_argument);
}

TEST_CASE("matched-seed comparison shows the coding gain") {
  const std::uint64_t slots = 2000000;
  const auto cmp = netcod::run_nc_experiment(0.125, slots, 21);

  // each of the four configurations appears at the predicted frequency
  const double nu = netcod::config_probability();
  const double se = std::sqrt(nu * (1.0 - nu) / slots);
  for (auto v : cmp.enhanced.config_counts)
    CHECK(std::abs(static_cast<double>(v) / slots - nu) < 4.0 * se);

  // the enhanced algorithm outperforms the plain relay under identical
  // mobility, by roughly the advertised margin
  CHECK(cmp.mean_gain > 0.0);
  CHECK(cmp.mean_gain < 3.0 * cmp.analytic_gain_per_node);
  for (int i = 0; i < 4; ++i) {
    CHECK(cmp.baseline_rate[i] > 0.05);
    CHECK(cmp.enhanced_rate[i] > cmp.baseline_rate[i] - 1e-3);
  }
}
