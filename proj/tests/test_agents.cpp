#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "urlab/agents.hpp"
#include "urlab/known_grid.hpp"
#include "urlab/oracle.hpp"
#include "urlab/stats.hpp"

using namespace urlab;

namespace {

AgentConfig small_planner(AgentType type, int horizon = 2, std::int64_t samples = 200) {
  AgentConfig cfg;
  cfg.type = type;
  cfg.horizon = horizon;
  cfg.samples = samples;
  cfg.gamma = 0.99;
  return cfg;
}

// Mixture whose two hypotheses are identical, so the posterior never moves.
std::unique_ptr<MixtureModel> frozen_posterior_mixture() {
  auto make_hyp = [] {
    PerceptDistribution d = bernoulli_arm(0.5, 1.0, 0.0);
    return std::make_unique<TabularModel>(std::vector<PerceptDistribution>{d, d});
  };
  std::vector<std::unique_ptr<EnvironmentModel>> hyps;
  hyps.push_back(make_hyp());
  hyps.push_back(make_hyp());
  return std::make_unique<MixtureModel>(std::move(hyps), std::vector<double>{0.5, 0.5});
}

}  // namespace

TEST_CASE("ksa utilities: spec values", "[agents]") {
  CHECK(UtilityFunction::square().evaluate({}, 0.25, 0) == Catch::Approx(-0.25));
  CHECK(UtilityFunction::shannon(std::log(1e6)).evaluate({}, 0.25, 0) ==
        Catch::Approx(std::log(4.0)));
  const auto kl = UtilityFunction::kl_information_gain(0.0, std::log(2.0));
  CHECK(kl.evaluate({}, 0.0, std::log(2.0)) == Catch::Approx(std::log(2.0)));
}

TEST_CASE("ksa bounds", "[agents]") {
  const GridSpec spec = parse_layout({"...", ".#.", "..D"}, {0.75});
  const auto mixture = make_location_mixture(spec, 0.75);

  const RewardBounds square = ksa_bounds(UtilityKind::Square, *mixture);
  CHECK(square.min == -1.0);
  CHECK(square.max == 0.0);

  const RewardBounds kl = ksa_bounds(UtilityKind::KlInformationGain, *mixture);
  CHECK(kl.min == 0.0);
  CHECK(kl.max == Catch::Approx(std::log(9.0)));  // uniform prior over 9 hypotheses

  const RewardBounds shannon = ksa_bounds(UtilityKind::Shannon, *mixture);
  CHECK(shannon.max == Catch::Approx(std::log(1e6)));

  DirichletGridModel dirichlet(10);
  const RewardBounds dkl = ksa_bounds(UtilityKind::KlInformationGain, dirichlet);
  CHECK(dkl.max == Catch::Approx(100.0 * std::log(2.0)));
  CHECK(dkl.min == Catch::Approx(-100.0 * std::log(2.0)));
}

TEST_CASE("aixi act: legal actions and greedy behavior near the dispenser", "[agents]") {
  SECTION("smoke: uniform prior on a 10x10 mixture returns a legal action") {
    std::vector<std::string> rows(10, std::string(10, '.'));
    rows[6][6] = 'D';
    const GridSpec spec = parse_layout(rows, {0.75});
    auto agent = make_agent(make_location_mixture(spec, 0.75),
                            small_planner(AgentType::Aixi, 2, 100), spec.reward_bounds());
    RandomSource rng(1);
    const Action a = agent->act(rng);
    CHECK(a.index < 5);
  }

  SECTION("known model walks onto an adjacent dispenser") {
    const GridSpec spec = parse_layout({".D.", "...", "..."}, {1.0});
    auto agent = make_agent(std::make_unique<KnownGridModel>(spec),
                            small_planner(AgentType::Aimu, 2, 2000), spec.reward_bounds());
    RandomSource rng(2);
    CHECK(agent->act(rng) == grid_actions::right);
  }
}

TEST_CASE("a collapsed mixture plans identically to the true model", "[agents]") {
  const GridSpec spec = parse_layout({".D.", "...", "..."}, {1.0});
  auto mixture = make_location_mixture(spec, 1.0);
  // walking onto the dispenser and collecting 100 collapses the posterior
  const Percept reveal{observe_bits(spec, {1, 0}), 4, 100.0};
  mixture->update(grid_actions::right, reveal);
  CHECK(mixture->weights()[spec.index_of({1, 0})] == 1.0);

  KnownGridModel truth(spec, {1, 0});
  PlannerConfig cfg;
  cfg.horizon = 3;
  cfg.samples = 500;
  cfg.alpha = -10.0;
  cfg.beta = 100.0;
  const UtilityFunction utility = UtilityFunction::extrinsic({-10.0, 100.0});

  RandomSource rng_mixture(77), rng_truth(77);
  const SearchResult via_mixture = search(*mixture, cfg, utility, rng_mixture);
  const SearchResult via_truth = search(truth, cfg, utility, rng_truth);
  CHECK(via_mixture.action_values == via_truth.action_values);
  CHECK(via_mixture.chosen == via_truth.chosen);
}

TEST_CASE("bayesexp mode logic", "[agents]") {
  const GridSpec spec = parse_layout({"...", ".#.", "..D"}, {0.75});

  SECTION("an unreachable threshold reduces BayesExp to AIxi") {
    AgentConfig cfg = small_planner(AgentType::BayesExp, 2, 100);
    cfg.epsilon0 = 1e18;
    auto agent = make_agent(make_location_mixture(spec, 0.75), cfg, spec.reward_bounds());
    RandomSource rng(5);
    GridState state{spec.start()};
    for (int t = 0; t < 4; ++t) {
      const Action a = agent->act(rng);
      CHECK(agent->mode_string() == "exploit");
      const auto [next, e] = step(spec, state, a, rng);
      agent->update(a, e);
      state = next;
    }
  }

  SECTION("a zero threshold explores while information remains") {
    AgentConfig cfg = small_planner(AgentType::BayesExp, 2, 100);
    cfg.epsilon0 = 0.0;
    auto agent = make_agent(make_location_mixture(spec, 0.75), cfg, spec.reward_bounds());
    RandomSource rng(6);
    agent->act(rng);
    CHECK(agent->mode_string() == "explore-burst:2");
  }

  SECTION("burst counters decrement once per cycle and re-evaluate at zero") {
    AgentConfig cfg = small_planner(AgentType::BayesExp, 3, 100);
    cfg.epsilon0 = 1e-6;
    auto agent = make_agent(make_location_mixture(spec, 0.75), cfg, spec.reward_bounds());
    auto* bayesexp = dynamic_cast<BayesExpAgent*>(agent.get());
    REQUIRE(bayesexp);
    RandomSource rng(7);
    GridState state{spec.start()};
    agent->act(rng);
    CHECK(bayesexp->burst_remaining() == 3);
    for (int expected = 2; expected >= 0; --expected) {
      const auto [next, e] = step(spec, state, grid_actions::noop, rng);
      agent->update(grid_actions::noop, e);
      state = next;
      CHECK(bayesexp->burst_remaining() == expected);
      if (expected > 0) agent->act(rng);
    }
  }
}

TEST_CASE("thompson sampling commitment discipline", "[agents]") {
  SECTION("requires an explicit mixture") {
    CHECK_THROWS_AS(make_agent(std::make_unique<DirichletGridModel>(5),
                               small_planner(AgentType::Thompson), {-10.0, 100.0}),
                    std::invalid_argument);
  }

  SECTION("commits for exactly m cycles between re-samples") {
    auto agent = make_agent(frozen_posterior_mixture(), small_planner(AgentType::Thompson, 3, 50),
                            {0.0, 1.0});
    auto* thompson = dynamic_cast<ThompsonAgent*>(agent.get());
    REQUIRE(thompson);
    RandomSource rng(8);
    std::vector<int> resample_times;
    int last = -1;
    for (int t = 0; t < 12; ++t) {
      agent->act(rng);
      if (thompson->commit_remaining() == 3) resample_times.push_back(t);  // fresh commitment
      last = thompson->committed_hypothesis();
      CHECK(last >= 0);
      agent->update(Action{0}, Percept{0, 1, 0.0});
    }
    CHECK(resample_times == std::vector<int>{0, 3, 6, 9});
  }

  SECTION("recommitment frequencies match the (frozen) posterior") {
    auto agent = make_agent(frozen_posterior_mixture(), small_planner(AgentType::Thompson, 1, 20),
                            {0.0, 1.0});
    auto* thompson = dynamic_cast<ThompsonAgent*>(agent.get());
    RandomSource rng(9);
    std::int64_t zeros = 0;
    const int n = 1000;
    for (int t = 0; t < n; ++t) {
      agent->act(rng);  // horizon 1: every cycle recommits
      if (thompson->committed_hypothesis() == 0) ++zeros;
      agent->update(Action{0}, Percept{0, 1, 0.0});
    }
    CHECK(binomial_within_3sigma(zeros, n, 0.5));
  }

  SECTION("a degenerate posterior always commits to the surviving hypothesis") {
    const GridSpec spec = parse_layout({"D..", "...", "..."}, {1.0});
    auto mixture = make_location_mixture(spec, 1.0);
    mixture->update(grid_actions::noop, Percept{observe_bits(spec, {0, 0}), 4, 100.0});
    auto agent = make_agent(std::move(mixture), small_planner(AgentType::Thompson, 2, 50),
                            spec.reward_bounds());
    auto* thompson = dynamic_cast<ThompsonAgent*>(agent.get());
    RandomSource rng(10);
    for (int t = 0; t < 6; ++t) {
      agent->act(rng);
      CHECK(thompson->committed_hypothesis() == 0);
      agent->update(grid_actions::noop, Percept{observe_bits(spec, {0, 0}), 4, 100.0});
    }
  }
}

TEST_CASE("mdl agent selection", "[agents]") {
  SECTION("truth at index zero commits immediately and permanently") {
    const GridSpec spec = parse_layout({"D..", "...", "..."}, {1.0});
    auto agent = make_agent(make_location_mixture(spec, 1.0),
                            small_planner(AgentType::Mdl, 2, 50), spec.reward_bounds());
    auto* mdl = dynamic_cast<MdlAgent*>(agent.get());
    RandomSource rng(11);
    for (int t = 0; t < 5; ++t) {
      agent->act(rng);
      CHECK(mdl->selected_hypothesis() == 0);
      agent->update(grid_actions::noop, Percept{observe_bits(spec, {0, 0}), 4, 100.0});
    }
  }

  SECTION("selected index is non-decreasing in a deterministic environment") {
    const GridSpec spec = parse_layout({"...", "...", "..D"}, {1.0});
    auto agent = make_agent(make_location_mixture(spec, 1.0),
                            small_planner(AgentType::Mdl, 2, 100), spec.reward_bounds());
    auto* mdl = dynamic_cast<MdlAgent*>(agent.get());
    RandomSource rng(12);
    GridState state{spec.start()};
    int previous = -1;
    for (int t = 0; t < 40; ++t) {
      const Action a = agent->act(rng);
      CHECK(mdl->selected_hypothesis() >= previous);
      previous = mdl->selected_hypothesis();
      const auto [next, e] = step(spec, state, a, rng);
      agent->update(a, e);
      state = next;
    }
  }
}

TEST_CASE("agent update keeps the posterior normalized and reports IG", "[agents]") {
  const GridSpec spec = parse_layout({"...", ".#.", "..D"}, {0.75});
  auto agent = make_agent(make_location_mixture(spec, 0.75),
                          small_planner(AgentType::KsaKl, 2, 100), spec.reward_bounds());
  RandomSource rng(13);
  GridState state{spec.start()};
  for (int t = 0; t < 10; ++t) {
    const Action a = agent->act(rng);
    const auto [next, e] = step(spec, state, a, rng);
    agent->update(a, e);
    state = next;
    const auto* mixture = dynamic_cast<const MixtureModel*>(&agent->model());
    double total = 0.0;
    for (double w : mixture->weights()) total += w;
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(agent->last_information_gain() == mixture->info_gain_of_last_update());
  }
  CHECK(agent->history().size() == 10);
  CHECK(agent->time() == 10);
}
