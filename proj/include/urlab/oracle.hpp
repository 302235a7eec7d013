// Brute-force oracles, independent of the implementation paths they check:
// batch Bayes posterior by direct likelihood products, the expected
// information-gain identity, iterative effective-horizon evaluation, and
// planner-vs-expectimax convergence harnesses.
#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "urlab/expectimax.hpp"
#include "urlab/known_grid.hpp"
#include "urlab/mixture.hpp"
#include "urlab/planner.hpp"

namespace urlab {

// Smallest H with gamma^H <= eps, found by repeated multiplication; the
// independent check for the closed-form effective horizon.
inline int effective_horizon_iterative(GeometricDiscount d, double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("effective_horizon_iterative: bad eps");
  int h = 0;
  double ratio = 1.0;
  while (ratio > eps) {
    ratio *= d.gamma;
    ++h;
  }
  return h;
}

// Posterior weights computed the slow way: w_nu proportional to
// w0_nu * prod_k nu(e_k | ae_<k a_k), each hypothesis replayed from scratch.
inline std::vector<double> batch_posterior(const MixtureModel& prior_mixture,
                                           const std::vector<TimeStep>& sequence) {
  const int k = prior_mixture.size();
  std::vector<double> weights(prior_mixture.weights().begin(), prior_mixture.weights().end());
  for (int i = 0; i < k; ++i) {
    auto hypothesis = prior_mixture.component_model(i);
    double likelihood = 1.0;
    for (const TimeStep& step : sequence) {
      likelihood *= hypothesis->conditional_probability(step.action, step.percept);
      if (likelihood == 0.0) break;
      hypothesis->update(step.action, step.percept);
    }
    weights[i] *= likelihood;
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) throw std::runtime_error("batch_posterior: sequence impossible under every hypothesis");
  for (double& w : weights) w /= total;
  return weights;
}

struct BayesEquivalenceReport {
  std::int64_t sequences_checked = 0;
  double max_abs_error = 0.0;
};

namespace detail {

inline void enumerate_bayes_sequences(MixtureModel& mixture, const MixtureModel& prior,
                                      std::vector<TimeStep>& sequence, int remaining,
                                      BayesEquivalenceReport& report) {
  if (remaining == 0) return;
  for (int a = 0; a < mixture.num_actions(); ++a) {
    const Action action{static_cast<std::uint8_t>(a)};
    const PerceptDistribution dist = mixture.percept_distribution(action);
    for (const auto& [percept, p] : dist.support()) {
      const Checkpoint token = mixture.checkpoint();
      mixture.update(action, percept);
      sequence.push_back({action, percept});

      const std::vector<double> expected = batch_posterior(prior, sequence);
      const auto incremental = mixture.weights();
      for (std::size_t i = 0; i < expected.size(); ++i)
        report.max_abs_error = std::max(report.max_abs_error, std::abs(expected[i] - incremental[i]));
      ++report.sequences_checked;

      enumerate_bayes_sequences(mixture, prior, sequence, remaining - 1, report);
      sequence.pop_back();
      mixture.rollback(token);
    }
  }
}

}  // namespace detail

// Exhaustively compares incremental posteriors against the batch-product
// oracle for every action/percept sequence up to the given length.
inline BayesEquivalenceReport bayes_update_equivalence(const MixtureModel& prior, int max_length) {
  MixtureModel working(prior);
  BayesEquivalenceReport report;
  std::vector<TimeStep> sequence;
  detail::enumerate_bayes_sequences(working, prior, sequence, max_length, report);
  return report;
}

// ---------------------------------------------------------------------------
// Expected information gain identity: E_xi[IG] equals the prior-weighted
// KL divergence sum_nu w_nu KL(nu || xi).

struct IgIdentityReport {
  int instances = 0;
  double max_abs_error = 0.0;
};

inline double expected_information_gain(MixtureModel& mixture, Action a) {
  double total = 0.0;
  for (const auto& [e, p] : mixture.percept_distribution(a)) {
    const Checkpoint token = mixture.checkpoint();
    mixture.update(a, e);
    total += p * mixture.info_gain_of_last_update();
    mixture.rollback(token);
  }
  return total;
}

inline double posterior_weighted_kl(const MixtureModel& mixture, Action a) {
  const PerceptDistribution xi = mixture.percept_distribution(a);
  double total = 0.0;
  for (int i = 0; i < mixture.size(); ++i) {
    const double w = mixture.weights()[i];
    if (w == 0.0) continue;
    double kl = 0.0;
    for (const auto& [e, p_mix] : xi.support()) {
      const double p_nu = mixture.component(i).conditional_probability(a, e);
      if (p_nu > 0.0) kl += p_nu * std::log(p_nu / p_mix);
    }
    total += w * kl;
  }
  return total;
}

// Random mixtures of i.i.d. hypothesis tables with strictly positive
// likelihoods; checks the identity on every instance.
inline IgIdentityReport ig_identity_suite(int instances, std::uint64_t seed) {
  RandomSource rng(seed);
  IgIdentityReport report;
  for (int i = 0; i < instances; ++i) {
    const int hypotheses = 2 + rng.uniform_int(2);  // 2 or 3
    const int percepts = 2 + rng.uniform_int(3);    // 2..4
    std::vector<std::unique_ptr<EnvironmentModel>> components;
    for (int h = 0; h < hypotheses; ++h) {
      PerceptDistribution table;
      std::vector<double> raw(percepts);
      double total = 0.0;
      for (double& v : raw) {
        v = 0.05 + rng.uniform();
        total += v;
      }
      for (int e = 0; e < percepts; ++e)
        table.add(Percept{static_cast<std::uint32_t>(e), 4, 0.0}, raw[e] / total);
      table.canonicalize();
      components.push_back(
          std::make_unique<TabularModel>(std::vector<PerceptDistribution>{table}));
    }
    std::vector<double> prior(hypotheses);
    double total = 0.0;
    for (double& w : prior) {
      w = 0.1 + rng.uniform();
      total += w;
    }
    for (double& w : prior) w /= total;
    MixtureModel mixture(std::move(components), prior);
    const double lhs = expected_information_gain(mixture, Action{0});
    const double rhs = posterior_weighted_kl(mixture, Action{0});
    report.max_abs_error = std::max(report.max_abs_error, std::abs(lhs - rhs));
    ++report.instances;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Planner-vs-expectimax convergence instances

struct PlannerOracleInstance {
  std::string name;
  std::function<std::unique_ptr<EnvironmentModel>()> make_model;
  int horizon = 1;
  RewardBounds bounds;
};

struct PlannerOracleResult {
  std::string name;
  std::vector<double> oracle_values;       // normalized
  std::vector<double> mean_search_values;  // normalized, averaged over searches
  double max_abs_error = 0.0;              // root-value error: optimal action's estimate
  int argmax_matches = 0;
  int searches = 0;
};

inline std::vector<PlannerOracleInstance> standard_planner_oracle_instances() {
  std::vector<PlannerOracleInstance> out;
  out.push_back({"bandit-2arm-m1",
                 [] {
                   std::vector<PerceptDistribution> arms{bernoulli_arm(0.8, 1.0, 0.0),
                                                         bernoulli_arm(0.2, 1.0, 0.0)};
                   return std::make_unique<TabularModel>(std::move(arms));
                 },
                 1,
                 {0.0, 1.0}});
  out.push_back({"bandit-2arm-m2",
                 [] {
                   std::vector<PerceptDistribution> arms{bernoulli_arm(0.8, 1.0, 0.0),
                                                         bernoulli_arm(0.2, 1.0, 0.0)};
                   return std::make_unique<TabularModel>(std::move(arms));
                 },
                 2,
                 {0.0, 1.0}});
  out.push_back({"bandit-3arm-m1",
                 [] {
                   std::vector<PerceptDistribution> arms{bernoulli_arm(0.9, 1.0, 0.0),
                                                         bernoulli_arm(0.5, 1.0, 0.0),
                                                         bernoulli_arm(0.1, 1.0, 0.0)};
                   return std::make_unique<TabularModel>(std::move(arms));
                 },
                 1,
                 {0.0, 1.0}});
  out.push_back({"grid-3x3-theta1-m2",
                 [] {
                   // dispenser adjacent to the start so the argmax is unique
                   const GridSpec spec = parse_layout({".D.", "...", "..."}, {1.0});
                   return std::make_unique<KnownGridModel>(spec);
                 },
                 2,
                 {kRewardBump, kRewardDispenser}});
  out.push_back({"grid-3x3-wall-m3",
                 [] {
                   const GridSpec spec = parse_layout({"...", "#D.", "..."}, {0.75});
                   return std::make_unique<KnownGridModel>(spec);
                 },
                 3,
                 {kRewardBump, kRewardDispenser}});
  out.push_back({"mixture-coin-m2",
                 [] {
                   std::vector<std::unique_ptr<EnvironmentModel>> hyps;
                   std::vector<PerceptDistribution> heads{bernoulli_arm(0.9, 1.0, 0.0),
                                                          bernoulli_arm(0.5, 1.0, 0.0)};
                   hyps.push_back(std::make_unique<TabularModel>(heads));
                   std::vector<PerceptDistribution> tails{bernoulli_arm(0.1, 1.0, 0.0),
                                                          bernoulli_arm(0.5, 1.0, 0.0)};
                   hyps.push_back(std::make_unique<TabularModel>(tails));
                   return std::make_unique<MixtureModel>(std::move(hyps),
                                                         std::vector<double>{0.5, 0.5});
                 },
                 2,
                 {0.0, 1.0}});
  return out;
}

// Runs `searches` independent planner searches against the exact expectimax
// values (both reported in normalized units). The value comparison targets
// the root value, i.e. the optimal action's estimate: UCB deliberately
// starves clearly suboptimal arms, so their estimates converge only
// logarithmically and are reported informationally.
inline PlannerOracleResult run_planner_oracle_instance(const PlannerOracleInstance& instance,
                                                       std::int64_t samples, int searches,
                                                       std::uint64_t seed) {
  PlannerConfig cfg;
  cfg.horizon = instance.horizon;
  cfg.samples = samples;
  cfg.alpha = instance.bounds.min;
  cfg.beta = instance.bounds.max;
  cfg.discount = GeometricDiscount{0.99};
  const UtilityFunction utility = UtilityFunction::extrinsic(instance.bounds);

  PlannerOracleResult result;
  result.name = instance.name;
  result.searches = searches;

  auto oracle_model = instance.make_model();
  const std::vector<double> oracle_raw =
      expectimax_exact(*oracle_model, instance.horizon, utility, cfg.discount);
  int oracle_argmax = 0;
  for (std::size_t a = 0; a < oracle_raw.size(); ++a) {
    result.oracle_values.push_back(normalize_return(oracle_raw[a], cfg));
    if (oracle_raw[a] > oracle_raw[oracle_argmax]) oracle_argmax = static_cast<int>(a);
  }

  std::vector<double> sums(oracle_raw.size(), 0.0);
  for (int s = 0; s < searches; ++s) {
    auto model = instance.make_model();
    RandomSource rng(splitmix64(seed) + static_cast<std::uint64_t>(s));
    const SearchResult r = search(*model, cfg, utility, rng);
    if (r.chosen.index == oracle_argmax) ++result.argmax_matches;
    for (std::size_t a = 0; a < sums.size(); ++a) sums[a] += normalize_return(r.action_values[a], cfg);
  }
  for (std::size_t a = 0; a < sums.size(); ++a)
    result.mean_search_values.push_back(sums[a] / searches);
  result.max_abs_error =
      std::abs(result.mean_search_values[oracle_argmax] - result.oracle_values[oracle_argmax]);
  return result;
}

}  // namespace urlab
