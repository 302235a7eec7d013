// History-based Monte-Carlo tree search (rhoUCT). The tree alternates
// decision nodes (one chance child per action) and chance nodes (one
// decision child per sampled percept). Each simulation checkpoints the
// environment model, descends with UCB action selection, samples percepts
// from the model while updating it in-simulation, expands one node, finishes
// the horizon with a uniform-random rollout, backs up discounted utility
// sums, and rolls the model back.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "urlab/core.hpp"
#include "urlab/model.hpp"
#include "urlab/random.hpp"

namespace urlab {

struct PlannerConfig {
  int horizon = 6;                            // m
  std::int64_t samples = 600;                 // kappa; ignored when a time budget is set
  std::optional<double> time_budget_ms;       // exactly one of samples / time budget active
  double exploration_c = 1.4142135623730951;  // C in Eq.-8-style UCB, sqrt(2)
  double alpha = 0.0;                         // utility lower bound
  double beta = 1.0;                          // utility upper bound
  GeometricDiscount discount{0.99};
  std::ostream* trace = nullptr;              // per-simulation line records when set

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("PlannerConfig: horizon must be >= 1");
    if (!time_budget_ms && samples < 1)
      throw std::invalid_argument("PlannerConfig: sample budget must be >= 1");
    if (time_budget_ms && *time_budget_ms <= 0.0)
      throw std::invalid_argument("PlannerConfig: time budget must be positive");
    if (!(beta > alpha)) throw std::invalid_argument("PlannerConfig: beta must exceed alpha");
    if (!(exploration_c > 0.0)) throw std::invalid_argument("PlannerConfig: C must be positive");
  }
};

struct ChanceNode;

struct DecisionNode {
  std::vector<std::unique_ptr<ChanceNode>> children;  // one slot per action; null until tried
  std::int64_t visits = 0;
  double value = 0.0;  // mean discounted remaining return, utility units

  explicit DecisionNode(int num_actions) : children(num_actions) {}
};

struct ChanceNode {
  std::unordered_map<Percept, std::unique_ptr<DecisionNode>, PerceptHash> children;
  std::int64_t visits = 0;
  double value = 0.0;
};

// Maps an accumulated m-step discounted utility sum into [0, 1] by
// subtracting the attainable minimum and dividing by m(beta - alpha).
inline double normalize_return(double m_step_sum, const PlannerConfig& cfg) {
  const double min_sum = cfg.alpha * discounted_horizon_mass(cfg.discount, cfg.horizon);
  return (m_step_sum - min_sum) / (cfg.horizon * (cfg.beta - cfg.alpha));
}

// UCB action selection: unvisited actions first in fixed action order, then
// argmax of normalized value plus C sqrt(ln T(parent) / T(child)).
inline Action uct_select(const DecisionNode& node, const PlannerConfig& cfg) {
  const int num_actions = static_cast<int>(node.children.size());
  for (int a = 0; a < num_actions; ++a)
    if (!node.children[a] || node.children[a]->visits == 0)
      return Action{static_cast<std::uint8_t>(a)};
  int best = 0;
  double best_score = -kInfinity;
  const double log_parent = std::log(static_cast<double>(node.visits));
  for (int a = 0; a < num_actions; ++a) {
    const ChanceNode& child = *node.children[a];
    const double score = normalize_return(child.value, cfg) +
                         cfg.exploration_c * std::sqrt(log_parent / static_cast<double>(child.visits));
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return Action{static_cast<std::uint8_t>(best)};
}

struct SearchResult {
  Action chosen;
  std::vector<double> action_values;        // root Q estimates, utility units
  std::vector<std::int64_t> action_visits;  // per-action sample counts
  std::int64_t total_samples = 0;
  double root_value = -kInfinity;           // best visited action value
};

namespace detail {

class RhoUctSimulator {
 public:
  RhoUctSimulator(EnvironmentModel& model, const PlannerConfig& cfg, const UtilityFunction& utility,
                  RandomSource& rng)
      : model_(model), cfg_(cfg), utility_(utility), rng_(rng) {}

  double run(DecisionNode& root) {
    if (cfg_.trace) {
      path_.clear();
      percepts_.clear();
    }
    const Checkpoint token = model_.checkpoint();
    const double value = simulate_decision(root, 0);
    model_.rollback(token);
    return value;
  }

  const std::vector<int>& path() const { return path_; }
  const std::vector<Percept>& percepts() const { return percepts_; }

 private:
  double simulate_decision(DecisionNode& node, int depth) {
    if (depth == cfg_.horizon) return 0.0;
    double value;
    if (node.visits == 0 && depth > 0) {
      value = rollout(depth);
    } else {
      const Action a = uct_select(node, cfg_);
      auto& slot = node.children[a.index];
      if (!slot) slot = std::make_unique<ChanceNode>();
      value = simulate_chance(*slot, a, depth);
    }
    ++node.visits;
    node.value += (value - node.value) / static_cast<double>(node.visits);
    return value;
  }

  double simulate_chance(ChanceNode& node, Action a, int depth) {
    const auto [e, utility] = step_model(a);
    auto& child = node.children[e];
    if (!child) child = std::make_unique<DecisionNode>(model_.num_actions());
    const double value = utility + cfg_.discount.gamma * simulate_decision(*child, depth + 1);
    ++node.visits;
    node.value += (value - node.value) / static_cast<double>(node.visits);
    return value;
  }

  // Uniform-random playout of the remaining horizon.
  double rollout(int depth) {
    double sum = 0.0;
    double w = 1.0;
    for (int k = depth; k < cfg_.horizon; ++k) {
      const Action a{static_cast<std::uint8_t>(rng_.uniform_int(model_.num_actions()))};
      sum += w * step_model(a).second;
      w *= cfg_.discount.gamma;
    }
    return sum;
  }

  // Samples a percept, advances the model, and evaluates the clamped
  // per-step utility.
  std::pair<Percept, double> step_model(Action a) {
    const Percept e = model_.sample(a, rng_);
    const double p =
        utility_.needs_predictive_probability() ? model_.conditional_probability(a, e) : 0.0;
    model_.update(a, e);
    const double ig =
        utility_.needs_information_gain() ? model_.info_gain_of_last_update() : 0.0;
    if (cfg_.trace) {
      path_.push_back(a.index);
      percepts_.push_back(e);
    }
    return {e, utility_.evaluate(e, p, ig)};
  }

  EnvironmentModel& model_;
  const PlannerConfig& cfg_;
  const UtilityFunction& utility_;
  RandomSource& rng_;
  std::vector<int> path_;
  std::vector<Percept> percepts_;
};

inline void write_trace_line(std::ostream& out, std::int64_t sim, const RhoUctSimulator& simulator,
                             double value) {
  out << "{\"sim\":" << sim << ",\"path\":[";
  const auto& path = simulator.path();
  for (std::size_t i = 0; i < path.size(); ++i) out << (i ? "," : "") << path[i];
  out << "],\"percepts\":[";
  const auto& percepts = simulator.percepts();
  for (std::size_t i = 0; i < percepts.size(); ++i) {
    out << (i ? "," : "") << "[" << percepts[i].observation << "," << percepts[i].reward << "]";
  }
  out << "],\"return\":" << value << "}\n";
}

}  // namespace detail

inline SearchResult search(EnvironmentModel& model, const PlannerConfig& cfg,
                           const UtilityFunction& utility, RandomSource& rng) {
  cfg.validate();
  const int num_actions = model.num_actions();
  DecisionNode root(num_actions);
  detail::RhoUctSimulator simulator(model, cfg, utility, rng);

  std::int64_t simulations = 0;
  if (cfg.time_budget_ms) {
    const auto start = std::chrono::steady_clock::now();
    const auto budget = std::chrono::duration<double, std::milli>(*cfg.time_budget_ms);
    bool expired = false;
    while (!expired) {
      for (int burst = 0; burst < 16; ++burst) {
        const double value = simulator.run(root);
        if (cfg.trace) detail::write_trace_line(*cfg.trace, simulations, simulator, value);
        ++simulations;
      }
      expired = std::chrono::steady_clock::now() - start >= budget;
    }
  } else {
    for (; simulations < cfg.samples; ++simulations) {
      const double value = simulator.run(root);
      if (cfg.trace) detail::write_trace_line(*cfg.trace, simulations, simulator, value);
    }
  }

  SearchResult result;
  result.total_samples = simulations;
  result.action_values.assign(num_actions, std::numeric_limits<double>::quiet_NaN());
  result.action_visits.assign(num_actions, 0);
  std::vector<int> best_actions;
  for (int a = 0; a < num_actions; ++a) {
    const ChanceNode* child = root.children[a].get();
    if (!child || child->visits == 0) continue;
    result.action_values[a] = child->value;
    result.action_visits[a] = child->visits;
    if (child->value > result.root_value) {
      result.root_value = child->value;
      best_actions.assign(1, a);
    } else if (child->value == result.root_value) {
      best_actions.push_back(a);
    }
  }
  if (best_actions.empty()) throw std::logic_error("search: no action was sampled");
  // ties are broken uniformly at random; the resulting policy is stochastic
  const int pick = best_actions.size() == 1 ? 0 : rng.uniform_int(static_cast<int>(best_actions.size()));
  result.chosen = Action{static_cast<std::uint8_t>(best_actions[pick])};
  return result;
}

}  // namespace urlab
