#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "urlab/expectimax.hpp"
#include "urlab/known_grid.hpp"
#include "urlab/mixture.hpp"
#include "urlab/oracle.hpp"
#include "urlab/planner.hpp"

using namespace urlab;

namespace {

std::unique_ptr<TabularModel> two_arm_bandit() {
  std::vector<PerceptDistribution> arms{bernoulli_arm(0.8, 1.0, 0.0), bernoulli_arm(0.2, 1.0, 0.0)};
  return std::make_unique<TabularModel>(std::move(arms));
}

PlannerConfig bandit_config(int horizon, std::int64_t samples) {
  PlannerConfig cfg;
  cfg.horizon = horizon;
  cfg.samples = samples;
  cfg.alpha = 0.0;
  cfg.beta = 1.0;
  cfg.discount = GeometricDiscount{0.99};
  return cfg;
}

}  // namespace

TEST_CASE("uct_select: unvisited actions first, in fixed order", "[planner]") {
  DecisionNode node(3);
  node.visits = 5;
  node.children[0] = std::make_unique<ChanceNode>();
  node.children[0]->visits = 5;
  node.children[0]->value = 0.9;
  const PlannerConfig cfg = bandit_config(1, 10);
  CHECK(uct_select(node, cfg).index == 1);  // first unvisited slot
}

TEST_CASE("uct_select: equal bonuses favor the higher value", "[planner]") {
  DecisionNode node(2);
  node.visits = 20;
  for (int a = 0; a < 2; ++a) {
    node.children[a] = std::make_unique<ChanceNode>();
    node.children[a]->visits = 10;
  }
  node.children[0]->value = 0.9;  // already normalized under (alpha, beta, m) = (0, 1, 1)
  node.children[1]->value = 0.5;
  CHECK(uct_select(node, bandit_config(1, 10)).index == 0);
}

TEST_CASE("uct_select: the exploration bonus dominates equal values", "[planner]") {
  DecisionNode node(2);
  node.visits = 101;
  for (int a = 0; a < 2; ++a) {
    node.children[a] = std::make_unique<ChanceNode>();
    node.children[a]->value = 0.5;
  }
  node.children[0]->visits = 100;
  node.children[1]->visits = 1;
  CHECK(uct_select(node, bandit_config(1, 10)).index == 1);
}

TEST_CASE("normalize_return maps the m-step range into [0, 1]", "[planner]") {
  PlannerConfig cfg = bandit_config(4, 10);
  cfg.alpha = -10.0;
  cfg.beta = 100.0;
  const double mass = discounted_horizon_mass(cfg.discount, 4);
  CHECK(normalize_return(cfg.alpha * mass, cfg) == 0.0);
  CHECK(normalize_return(cfg.beta * mass, cfg) <= 1.0);

  PlannerConfig undiscounted = bandit_config(3, 10);
  undiscounted.discount = GeometricDiscount{1.0};
  undiscounted.alpha = -2.0;
  undiscounted.beta = 4.0;
  // constant midpoint utility lands exactly on 1/2
  CHECK(normalize_return(3.0 * 1.0, undiscounted) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("search on a known bandit converges to the exact arm values", "[planner]") {
  auto model = two_arm_bandit();
  RandomSource rng(2024);
  const SearchResult r = search(*model, bandit_config(1, 10000),
                                UtilityFunction::extrinsic({0.0, 1.0}), rng);
  CHECK(r.chosen.index == 0);
  CHECK(r.action_values[0] == Catch::Approx(0.8).margin(0.05));
  CHECK(r.action_values[1] == Catch::Approx(0.2).margin(0.05));
  CHECK(r.total_samples == 10000);
  CHECK(r.action_visits[0] + r.action_visits[1] == 10000);  // root visits sum to kappa
}

TEST_CASE("search with constant utilities returns the discounted constant sum", "[planner]") {
  PerceptDistribution constant;
  constant.add(Percept{0, 1, 5.0}, 1.0);
  TabularModel model({constant, constant});
  PlannerConfig cfg = bandit_config(3, 500);
  cfg.alpha = 0.0;
  cfg.beta = 5.0;
  RandomSource rng(7);
  const SearchResult r = search(model, cfg, UtilityFunction::extrinsic({0.0, 5.0}), rng);
  const double expected = 5.0 * discounted_horizon_mass(cfg.discount, 3);
  CHECK(r.action_values[0] == Catch::Approx(expected).margin(1e-9));
  CHECK(r.action_values[1] == Catch::Approx(expected).margin(1e-9));
}

TEST_CASE("search is deterministic given the seed and restores the model", "[planner]") {
  const GridSpec spec = parse_layout({"...", ".#.", "..D"}, {0.75});
  const auto mixture = make_location_mixture(spec, 0.75);
  PlannerConfig cfg = bandit_config(3, 400);
  cfg.alpha = -10.0;
  cfg.beta = 100.0;
  const UtilityFunction utility = UtilityFunction::extrinsic({-10.0, 100.0});

  auto predictions = [&] {
    std::vector<double> out;
    for (int a = 0; a < 5; ++a)
      for (const auto& [e, p] : mixture->percept_distribution(Action{static_cast<std::uint8_t>(a)}))
        out.push_back(p);
    return out;
  };
  const auto before = predictions();

  RandomSource rng1(55), rng2(55);
  const SearchResult r1 = search(*mixture, cfg, utility, rng1);
  CHECK(predictions() == before);  // model restored bit-identically
  const SearchResult r2 = search(*mixture, cfg, utility, rng2);
  CHECK(r1.chosen == r2.chosen);
  CHECK(r1.action_values == r2.action_values);
  CHECK(r1.action_visits == r2.action_visits);
}

TEST_CASE("search rejects a zero sample budget", "[planner]") {
  auto model = two_arm_bandit();
  RandomSource rng(1);
  CHECK_THROWS_AS(search(*model, bandit_config(1, 0), UtilityFunction::extrinsic({0.0, 1.0}), rng),
                  std::invalid_argument);
}

TEST_CASE("search honors a time budget", "[planner]") {
  auto model = two_arm_bandit();
  PlannerConfig cfg = bandit_config(1, 0);
  cfg.time_budget_ms = 20.0;
  RandomSource rng(3);
  const SearchResult r = search(*model, cfg, UtilityFunction::extrinsic({0.0, 1.0}), rng);
  CHECK(r.total_samples >= 16);
  CHECK(r.chosen.index == 0);
}

TEST_CASE("expectimax: horizon zero and the exact bandit", "[planner]") {
  auto model = two_arm_bandit();
  const UtilityFunction utility = UtilityFunction::extrinsic({0.0, 1.0});
  CHECK(expectimax_exact(*model, 0, utility, {0.99}) == std::vector<double>{0.0, 0.0});
  const auto values = expectimax_exact(*model, 1, utility, {0.99});
  CHECK(values[0] == Catch::Approx(0.8));
  CHECK(values[1] == Catch::Approx(0.2));
}

TEST_CASE("expectimax: stepping toward the dispenser beats stepping away", "[planner]") {
  const GridSpec spec = parse_layout({".D.", "...", "..."}, {1.0});
  KnownGridModel model(spec);
  const UtilityFunction utility = UtilityFunction::extrinsic({-10.0, 100.0});
  const auto values = expectimax_exact(model, 2, utility, {0.99});
  CHECK(values[grid_actions::right.index] > values[grid_actions::down.index]);
  CHECK(values[grid_actions::right.index] > values[grid_actions::left.index]);
}

TEST_CASE("expectimax refuses oversized percept supports", "[planner]") {
  const GridSpec spec = parse_layout({"ND.", "...", "..."}, {1.0}, 16);
  KnownGridModel model(spec);  // noise tile at the start: support 16
  const UtilityFunction utility = UtilityFunction::extrinsic({-10.0, 100.0});
  CHECK_THROWS_AS(expectimax_exact(model, 1, utility, {0.99}, 8), std::runtime_error);
}

TEST_CASE("planner converges to expectimax on the standard oracle instances", "[planner]") {
  // smaller budgets and looser tolerances than the acceptance gate, as a
  // fast regression signal (starved suboptimal-arm subtrees bias slowly)
  for (const auto& instance : standard_planner_oracle_instances()) {
    const auto r = run_planner_oracle_instance(instance, 30000, 10, 99);
    INFO(r.name);
    CHECK(r.max_abs_error <= 0.1);
    CHECK(r.argmax_matches >= 8);
  }
}

TEST_CASE("search trace emits one record per simulation", "[planner]") {
  auto model = two_arm_bandit();
  PlannerConfig cfg = bandit_config(2, 50);
  std::ostringstream trace;
  cfg.trace = &trace;
  RandomSource rng(5);
  search(*model, cfg, UtilityFunction::extrinsic({0.0, 1.0}), rng);
  int lines = 0;
  std::string line;
  std::istringstream in(trace.str());
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 50);
}
