#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "urlab/gridworld.hpp"
#include "urlab/stats.hpp"

using namespace urlab;

namespace {

GridSpec open_10x10_with_dispenser() {
  std::vector<std::string> rows(10, std::string(10, '.'));
  rows[6][6] = 'D';
  return parse_layout(rows, {0.75});
}

}  // namespace

TEST_CASE("observe_bits: corner, enclosed, interior", "[gridworld]") {
  const GridSpec open = open_10x10_with_dispenser();
  // top-left corner: left and up read off-grid walls -> (1,0,1,0)
  CHECK(observe_bits(open, {0, 0}) == 0b0101u);
  // open interior
  CHECK(observe_bits(open, {4, 4}) == 0u);

  const GridSpec boxed = parse_layout({".#.", "#.#", ".#D"}, {1.0});
  CHECK(observe_bits(boxed, {1, 1}) == 0b1111u);  // fully enclosed
  CHECK_THROWS_AS(observe_bits(boxed, {1, 0}), std::domain_error);
}

TEST_CASE("step: rewards follow tile semantics", "[gridworld]") {
  RandomSource rng(1);

  SECTION("bumping into a wall leaves position and costs -10") {
    const GridSpec spec = parse_layout({".#.", "...", "..D"}, {1.0});
    const auto [state, percept] = step(spec, GridState{{0, 0}}, grid_actions::right, rng);
    CHECK(state.pos == Coord{0, 0});
    CHECK(percept.reward == -10.0);
    CHECK(percept.observation == observe_bits(spec, {0, 0}));
  }

  SECTION("moving off-grid is a bump") {
    const GridSpec spec = open_10x10_with_dispenser();
    const auto [state, percept] = step(spec, GridState{{0, 0}}, grid_actions::up, rng);
    CHECK(state.pos == Coord{0, 0});
    CHECK(percept.reward == -10.0);
  }

  SECTION("no-op on an empty tile costs -1") {
    const GridSpec spec = open_10x10_with_dispenser();
    const auto [state, percept] = step(spec, GridState{{3, 3}}, grid_actions::noop, rng);
    CHECK(state.pos == Coord{3, 3});
    CHECK(percept.reward == -1.0);
  }

  SECTION("dispenser with theta = 1 always pays") {
    const GridSpec spec = parse_layout({"D..", "...", "..."}, {1.0});
    // start tile is the dispenser here; validate() only demands it be open
    const auto [state, percept] = step(spec, GridState{{0, 0}}, grid_actions::noop, rng);
    CHECK(percept.reward == 100.0);
  }

  SECTION("dispenser payout frequency matches theta (binomial, 3 sigma)") {
    const GridSpec spec = open_10x10_with_dispenser();
    RandomSource payout_rng(99);
    const int n = 10000;
    std::int64_t payouts = 0;
    for (int i = 0; i < n; ++i) {
      const auto [_, percept] = step(spec, GridState{{6, 6}}, grid_actions::noop, payout_rng);
      if (percept.reward == 100.0) ++payouts;
    }
    CHECK(binomial_within_3sigma(payouts, n, 0.75));
  }
}

TEST_CASE("step: never moves more than one tile, onto walls, or off-grid", "[gridworld]") {
  const GridSpec spec = parse_layout({".#...", ".....", "..#..", ".D...", "....."}, {0.5});
  RandomSource rng(5);
  GridState state{spec.start()};
  for (int i = 0; i < 2000; ++i) {
    const Action a{static_cast<std::uint8_t>(rng.uniform_int(5))};
    const auto [next, percept] = step(spec, state, a, rng);
    CHECK(std::abs(next.pos.x - state.pos.x) + std::abs(next.pos.y - state.pos.y) <= 1);
    CHECK(spec.in_bounds(next.pos));
    CHECK(spec.at(next.pos).kind != TileKind::Wall);
    state = next;
  }
}

TEST_CASE("exact percept distribution matches step's sampling", "[gridworld]") {
  SECTION("empty destination is a point mass") {
    const GridSpec spec = open_10x10_with_dispenser();
    const auto dist = exact_percept_distribution(spec, GridState{{3, 3}}, grid_actions::right);
    REQUIRE(dist.size() == 1);
    CHECK(dist.support()[0].first.reward == -1.0);
    CHECK(dist.total_mass() == Catch::Approx(1.0));
  }

  SECTION("dispenser destination splits theta / 1-theta") {
    const GridSpec spec = open_10x10_with_dispenser();
    const auto dist = exact_percept_distribution(spec, GridState{{6, 5}}, grid_actions::down);
    REQUIRE(dist.size() == 2);
    const auto obs = observe_bits(spec, {6, 6});
    CHECK(dist.probability_of(Percept{obs, 4, 100.0}) == Catch::Approx(0.75));
    CHECK(dist.probability_of(Percept{obs, 4, -1.0}) == Catch::Approx(0.25));
  }

  SECTION("noise tile: equiprobable observations over its alphabet") {
    const GridSpec spec = parse_layout({"N..", ".D.", "..."}, {0.75}, 16);
    const auto dist = exact_percept_distribution(spec, GridState{{0, 0}}, grid_actions::noop);
    REQUIRE(dist.size() == 16);
    for (const auto& [e, p] : dist.support()) {
      CHECK(p == Catch::Approx(1.0 / 16.0));
      CHECK(e.reward == -1.0);
    }
  }

  SECTION("empirical distribution agrees (chi-squared, p > 0.001)") {
    const GridSpec spec = open_10x10_with_dispenser();
    const GridState state{{6, 5}};
    const auto dist = exact_percept_distribution(spec, state, grid_actions::down);
    RandomSource rng(1234);
    const int n = 10000;
    std::vector<double> observed(dist.size(), 0.0), expected(dist.size());
    for (int i = 0; i < n; ++i) {
      const auto [_, e] = step(spec, state, grid_actions::down, rng);
      for (std::size_t k = 0; k < dist.size(); ++k)
        if (dist.support()[k].first == e) observed[k] += 1.0;
    }
    for (std::size_t k = 0; k < dist.size(); ++k) expected[k] = n * dist.support()[k].second;
    CHECK(chi_squared_gof_pvalue(observed, expected) > 0.001);
  }
}

TEST_CASE("observations alias distinct positions", "[gridworld]") {
  const GridSpec spec = open_10x10_with_dispenser();
  CHECK(observe_bits(spec, {3, 3}) == observe_bits(spec, {5, 4}));
}

TEST_CASE("reachable_count", "[gridworld]") {
  SECTION("2x2 grid, no walls") {
    CHECK(reachable_count(parse_layout({"..", ".D"}, {1.0})) == 4);
  }
  SECTION("middle column of walls splits a 3x3") {
    CHECK(reachable_count(parse_layout({".#.", ".#.", ".#D"}, {1.0})) == 3);
  }
  SECTION("walled-off dispenser is excluded") {
    const GridSpec spec = parse_layout({".#D", ".##", "..."}, {1.0});
    CHECK(reachable_count(spec) == 5);
    CHECK_FALSE(tile_reachable(spec, {2, 0}));
  }
}

TEST_CASE("layout parsing is bit-exact", "[gridworld]") {
  SECTION("round trip through tiles") {
    const GridSpec spec = parse_layout({".#D", "...", "N.."}, {0.25});
    CHECK(spec.at(Coord{1, 0}).kind == TileKind::Wall);
    CHECK(spec.at(Coord{2, 0}).kind == TileKind::Dispenser);
    CHECK(spec.at(Coord{2, 0}).theta == 0.25);
    CHECK(spec.at(Coord{0, 2}).kind == TileKind::Noise);
    CHECK(spec.at(Coord{0, 2}).noise_alphabet == 16);
  }
  SECTION("trailing whitespace rejected") {
    CHECK_THROWS_AS(parse_layout({".D ", "...", "..."}, {1.0}), std::invalid_argument);
  }
  SECTION("unknown characters rejected") {
    CHECK_THROWS_AS(parse_layout({".DX", "...", "..."}, {1.0}), std::invalid_argument);
  }
  SECTION("ragged rows rejected") {
    CHECK_THROWS_AS(parse_layout({".D", "...", ".."}, {1.0}), std::invalid_argument);
  }
  SECTION("theta count must match dispensers") {
    CHECK_THROWS_AS(parse_layout({".D.", "...", "..."}, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(parse_layout({".DD", "...", "..."}, {1.0}), std::invalid_argument);
  }
  SECTION("start tile must be open and a dispenser must exist") {
    CHECK_THROWS_AS(parse_layout({"#D.", "...", "..."}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(parse_layout({"...", "...", "..."}, {}), std::invalid_argument);
  }
}

TEST_CASE("observation width widens with the noise alphabet", "[gridworld]") {
  CHECK(parse_layout({"ND.", "...", "..."}, {1.0}, 16).observation_width() == 4);
  CHECK(parse_layout({"ND.", "...", "..."}, {1.0}, 256).observation_width() == 8);
}

TEST_CASE("generate_spec", "[gridworld]") {
  SECTION("same seed, same spec") {
    GridGeneratorConfig cfg;
    cfg.side = 10;
    cfg.wall_density = 0.2;
    cfg.thetas = {0.75};
    RandomSource rng1(77), rng2(77);
    const GridSpec a = generate_spec(cfg, rng1);
    const GridSpec b = generate_spec(cfg, rng2);
    for (int i = 0; i < 100; ++i) {
      CHECK(a.at(i).kind == b.at(i).kind);
      CHECK(a.at(i).theta == b.at(i).theta);
    }
  }
  SECTION("all dispensers reachable") {
    GridGeneratorConfig cfg;
    cfg.side = 8;
    cfg.wall_density = 0.3;
    cfg.thetas = {0.75, 0.5};
    RandomSource rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const GridSpec spec = generate_spec(cfg, rng);
      for (int idx : spec.dispenser_indices()) CHECK(tile_reachable(spec, spec.coord_of(idx)));
    }
  }
  SECTION("wall density 1.0 cannot produce a valid spec") {
    GridGeneratorConfig cfg;
    cfg.side = 5;
    cfg.wall_density = 1.0;
    RandomSource rng(3);
    CHECK_THROWS_AS(generate_spec(cfg, rng), std::runtime_error);
  }
  SECTION("explicit layouts pass through unchanged") {
    GridGeneratorConfig cfg;
    cfg.layout = std::vector<std::string>{"..D", "...", "..."};
    cfg.thetas = {0.5};
    RandomSource rng(1);
    const GridSpec spec = generate_spec(cfg, rng);
    CHECK(spec.at(Coord{2, 0}).kind == TileKind::Dispenser);
    CHECK(spec.at(Coord{2, 0}).theta == 0.5);
  }
}
