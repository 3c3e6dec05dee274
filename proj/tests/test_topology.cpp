#include <catch2/catch_amalgamated.hpp>

#include "dtnlab/topology.hpp"

using dtnlab::CellTopology;

TEST_CASE("full grid adjacency") {
  const auto topo = CellTopology::build_grid(4, 4);
  REQUIRE(topo.cell_count() == 16);
  REQUIRE(topo.max_degree() == 4);

  // corner, edge, interior degrees
  CHECK(topo.neighbors(0).size() == 2);
  CHECK(topo.neighbors(1).size() == 3);
  CHECK(topo.neighbors(5).size() == 4);

  CHECK(topo.adjacent(0, 1));
  CHECK(topo.adjacent(0, 4));
  CHECK_FALSE(topo.adjacent(0, 5));   // diagonals do not share an edge
  CHECK_FALSE(topo.adjacent(0, 0));

  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) CHECK(topo.adjacent(a, b) == topo.adjacent(b, a));
}

TEST_CASE("single cell and strip grids") {
  const auto one = CellTopology::build_grid(1, 1);
  REQUIRE(one.cell_count() == 1);
  CHECK(one.max_degree() == 0);

  const auto strip = CellTopology::build_grid(1, 3);
  REQUIRE(strip.cell_count() == 3);
  CHECK(strip.adjacent(0, 1));
  CHECK(strip.adjacent(1, 2));
  CHECK_FALSE(strip.adjacent(0, 2));
  CHECK(strip.max_degree() == 2);
}

TEST_CASE("grids with gaps") {
  const auto topo = CellTopology::build_grid(2, 2, {{0, 0}});
  REQUIRE(topo.cell_count() == 3);
  // remaining cells (0,1) (1,0) (1,1) are indexed row-major as 0 1 2
  CHECK(topo.adjacent(0, 2));
  CHECK(topo.adjacent(1, 2));
  CHECK_FALSE(topo.adjacent(0, 1));  // diagonal pair

  CHECK_THROWS_AS(CellTopology::build_grid(2, 2, {{2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(CellTopology::build_grid(2, 2, {{0, 0}, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(CellTopology::build_grid(1, 1, {{0, 0}}), std::invalid_argument);
  // removing the middle of a strip disconnects it
  CHECK_THROWS_AS(CellTopology::build_grid(1, 3, {{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(CellTopology::build_grid(0, 4), std::invalid_argument);
}

TEST_CASE("explicit adjacency validation") {
  const auto ring = CellTopology::from_adjacency({{1, 3}, {0, 2}, {1, 3}, {0, 2}});
  REQUIRE(ring.cell_count() == 4);
  CHECK(ring.max_degree() == 2);
  CHECK_FALSE(ring.grid().has_value());

  CHECK_THROWS_AS(CellTopology::from_adjacency({{1}, {}}), std::invalid_argument);  // asymmetric
  CHECK_THROWS_AS(CellTopology::from_adjacency({{0}}), std::invalid_argument);      // self loop
  CHECK_THROWS_AS(CellTopology::from_adjacency({{1}, {0}, {3}, {2}}),
                  std::invalid_argument);                                           // disconnected
  CHECK_THROWS_AS(CellTopology::from_adjacency({{5}, {0}}), std::invalid_argument); // unknown id
}

TEST_CASE("duplicate neighbor entries are collapsed") {
  const auto topo = CellTopology::from_adjacency({{1, 1}, {0}});
  CHECK(topo.neighbors(0).size() == 1);
}
