// The agent zoo. Every agent is the same Bayesian interaction loop — act,
// receive percept, update model — differing in which model it plans with
// and which utility drives the planner: AIxi/AImu and the knowledge-seeking
// agents plan directly over their model, BayesExp interleaves
// information-seeking bursts, Thompson sampling commits to a posterior
// sample for one horizon, and the MDL agent commits to the simplest
// unfalsified hypothesis.
#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "urlab/core.hpp"
#include "urlab/dirichlet.hpp"
#include "urlab/mixture.hpp"
#include "urlab/model.hpp"
#include "urlab/planner.hpp"

namespace urlab {

enum class AgentType { Aixi, Aimu, KsaSquare, KsaShannon, KsaKl, BayesExp, Thompson, Mdl };

inline const char* to_string(AgentType t) {
  switch (t) {
    case AgentType::Aixi: return "aixi";
    case AgentType::Aimu: return "aimu";
    case AgentType::KsaSquare: return "ksa-square";
    case AgentType::KsaShannon: return "ksa-shannon";
    case AgentType::KsaKl: return "ksa-kl";
    case AgentType::BayesExp: return "bayesexp";
    case AgentType::Thompson: return "thompson";
    case AgentType::Mdl: return "mdl";
  }
  return "?";
}

inline std::optional<AgentType> parse_agent_type(const std::string& s) {
  for (AgentType t : {AgentType::Aixi, AgentType::Aimu, AgentType::KsaSquare, AgentType::KsaShannon,
                      AgentType::KsaKl, AgentType::BayesExp, AgentType::Thompson, AgentType::Mdl})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

inline bool is_knowledge_seeking(AgentType t) {
  return t == AgentType::KsaSquare || t == AgentType::KsaShannon || t == AgentType::KsaKl;
}

// Exploration schedule eps_t = eps0 * t^(-decay); decay 0 gives a constant
// schedule.
struct ExplorationSchedule {
  double epsilon0 = 0.05;
  double decay_exponent = 0.0;

  double at(std::int64_t t) const {
    if (t < 1) t = 1;
    if (decay_exponent == 0.0) return epsilon0;
    return epsilon0 * std::pow(static_cast<double>(t), -decay_exponent);
  }
};

struct AgentConfig {
  AgentType type = AgentType::Aixi;
  int horizon = 6;                  // m; also the effective-horizon surrogate
  std::int64_t samples = 600;       // kappa
  std::optional<double> time_budget_ms;
  double ucb_c = 1.4142135623730951;
  double gamma = 0.99;
  double epsilon0 = 0.05;
  double epsilon_decay = 0.0;
  double lambda = 0.0;
  double shannon_beta_cap = std::log(1e6);
  std::ostream* search_trace = nullptr;
};

// Utility bounds for knowledge-seeking agents. Square utilities live in
// [-1, 0]; the Shannon utility has no principled upper bound, so a
// configured cap is used; KL over a discrete mixture is bounded by the prior
// entropy, while the Dirichlet model's differential entropies get a
// symmetric +-N^2 ln 2 cap.
inline RewardBounds ksa_bounds(UtilityKind kind, const EnvironmentModel& model,
                               double shannon_beta_cap = std::log(1e6)) {
  switch (kind) {
    case UtilityKind::Square:
      return {-1.0, 0.0};
    case UtilityKind::Shannon:
      return {0.0, shannon_beta_cap};
    case UtilityKind::KlInformationGain: {
      if (const auto* dirichlet = dynamic_cast<const DirichletGridModel*>(&model)) {
        const double cap = std::log(2.0) * dirichlet->side() * dirichlet->side();
        return {-cap, cap};
      }
      if (const auto* mixture = dynamic_cast<const MixtureModel*>(&model)) {
        const double ent = entropy(mixture->weights());
        return {0.0, std::max(ent, 1e-6)};
      }
      return {0.0, 1.0};
    }
    default:
      throw std::invalid_argument("ksa_bounds: not a knowledge-seeking utility");
  }
}

class Agent {
 public:
  Agent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg, RewardBounds env_bounds)
      : model_(std::move(model)), cfg_(cfg), env_bounds_(env_bounds) {
    if (!model_) throw std::invalid_argument("Agent: null model");
  }
  virtual ~Agent() = default;

  virtual Action act(RandomSource& rng) = 0;

  // Algorithm-1 bookkeeping: condition the model on the realized percept,
  // refresh information-gain state, advance time and mode counters.
  void update(Action a, const Percept& e) {
    model_->update(a, e);
    last_info_gain_ = model_->info_gain_of_last_update();
    history_.append(a, e);
    ++time_;
    after_update();
  }

  const EnvironmentModel& model() const { return *model_; }
  EnvironmentModel& model() { return *model_; }
  const History& history() const { return history_; }
  std::int64_t time() const { return time_; }
  double last_information_gain() const { return last_info_gain_; }
  const AgentConfig& config() const { return cfg_; }
  const SearchResult& last_search() const { return last_search_; }

  virtual std::string mode_string() const { return "exploit"; }

 protected:
  virtual void after_update() {}

  PlannerConfig planner_config(const UtilityFunction& utility) const {
    PlannerConfig pc;
    pc.horizon = cfg_.horizon;
    pc.samples = cfg_.samples;
    pc.time_budget_ms = cfg_.time_budget_ms;
    pc.exploration_c = cfg_.ucb_c;
    pc.alpha = utility.alpha();
    pc.beta = utility.beta();
    pc.discount = GeometricDiscount{cfg_.gamma};
    pc.trace = cfg_.search_trace;
    return pc;
  }

  std::unique_ptr<EnvironmentModel> model_;
  AgentConfig cfg_;
  RewardBounds env_bounds_;
  History history_;
  SearchResult last_search_;
  std::int64_t time_ = 0;
  double last_info_gain_ = 0.0;
};

// AIxi / AImu and the knowledge-seeking agents: plain planner search over
// the model with the configured utility. The model decides the flavor
// (mixture -> AIxi, ground truth -> AImu); KSA variants differ only in the
// utility function.
class BayesAgent : public Agent {
 public:
  BayesAgent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg, RewardBounds env_bounds,
             UtilityFunction utility)
      : Agent(std::move(model), cfg, env_bounds), utility_(utility) {}

  Action act(RandomSource& rng) override {
    last_search_ = search(*model_, planner_config(utility_), utility_, rng);
    return last_search_.chosen;
  }

  const UtilityFunction& utility() const { return utility_; }

 private:
  UtilityFunction utility_;
};

// BayesExp: acts as AIxi, but when the estimated information-seeking value
// exceeds eps_t it explores with the KL-KSA policy for one horizon.
class BayesExpAgent : public Agent {
 public:
  BayesExpAgent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg, RewardBounds env_bounds)
      : Agent(std::move(model), cfg, env_bounds),
        reward_utility_(UtilityFunction::extrinsic(env_bounds)),
        ig_utility_(make_ig_utility(*model_)),
        schedule_{cfg.epsilon0, cfg.epsilon_decay} {}

  Action act(RandomSource& rng) override {
    if (burst_remaining_ > 0) {
      last_search_ = search(*model_, planner_config(ig_utility_), ig_utility_, rng);
      return last_search_.chosen;
    }
    SearchResult ig_search = search(*model_, planner_config(ig_utility_), ig_utility_, rng);
    if (ig_search.root_value > schedule_.at(time_ + 1)) {
      burst_remaining_ = cfg_.horizon;  // explore for one (surrogate) effective horizon
      last_search_ = std::move(ig_search);
      return last_search_.chosen;
    }
    last_search_ = search(*model_, planner_config(reward_utility_), reward_utility_, rng);
    return last_search_.chosen;
  }

  std::string mode_string() const override {
    return burst_remaining_ > 0 ? "explore-burst:" + std::to_string(burst_remaining_) : "exploit";
  }

  int burst_remaining() const { return burst_remaining_; }

 protected:
  void after_update() override {
    if (burst_remaining_ > 0) --burst_remaining_;
  }

 private:
  static UtilityFunction make_ig_utility(const EnvironmentModel& model) {
    const RewardBounds b = ksa_bounds(UtilityKind::KlInformationGain, model);
    return UtilityFunction::kl_information_gain(b.min, b.max);
  }

  UtilityFunction reward_utility_;
  UtilityFunction ig_utility_;
  ExplorationSchedule schedule_;
  int burst_remaining_ = 0;
};

// Thompson sampling: commit to a posterior-sampled hypothesis, follow its
// optimal policy for one horizon, re-sample. The full mixture still gets
// every update.
class ThompsonAgent : public Agent {
 public:
  ThompsonAgent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg, RewardBounds env_bounds)
      : Agent(std::move(model), cfg, env_bounds),
        reward_utility_(UtilityFunction::extrinsic(env_bounds)) {
    mixture_ = dynamic_cast<MixtureModel*>(model_.get());
    if (!mixture_)
      throw std::invalid_argument("ThompsonAgent: requires an explicit mixture model");
  }

  Action act(RandomSource& rng) override {
    if (commit_remaining_ <= 0) {
      committed_ = mixture_->posterior_sample(rng);
      commit_remaining_ = cfg_.horizon;
    }
    const auto rho = mixture_->component_model(committed_);
    last_search_ = search(*rho, planner_config(reward_utility_), reward_utility_, rng);
    return last_search_.chosen;
  }

  std::string mode_string() const override {
    return "committed:" + std::to_string(committed_) + ":" + std::to_string(commit_remaining_);
  }

  int committed_hypothesis() const { return committed_; }
  int commit_remaining() const { return commit_remaining_; }

 protected:
  void after_update() override {
    if (commit_remaining_ > 0) --commit_remaining_;
  }

 private:
  MixtureModel* mixture_ = nullptr;
  UtilityFunction reward_utility_;
  int committed_ = -1;
  int commit_remaining_ = 0;
};

// MDL agent: plans with the simplest probable unfalsified hypothesis,
// re-selected every cycle (the selection only changes when evidence does).
class MdlAgent : public Agent {
 public:
  MdlAgent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg, RewardBounds env_bounds)
      : Agent(std::move(model), cfg, env_bounds),
        reward_utility_(UtilityFunction::extrinsic(env_bounds)) {
    mixture_ = dynamic_cast<MixtureModel*>(model_.get());
    if (!mixture_) throw std::invalid_argument("MdlAgent: requires an explicit mixture model");
  }

  Action act(RandomSource& rng) override {
    selected_ = mixture_->mdl_select(cfg_.lambda);
    const auto sigma = mixture_->component_model(selected_);
    last_search_ = search(*sigma, planner_config(reward_utility_), reward_utility_, rng);
    return last_search_.chosen;
  }

  std::string mode_string() const override { return "committed:" + std::to_string(selected_) + ":1"; }

  int selected_hypothesis() const { return selected_; }

 private:
  MixtureModel* mixture_ = nullptr;
  UtilityFunction reward_utility_;
  int selected_ = -1;
};

inline std::unique_ptr<Agent> make_agent(std::unique_ptr<EnvironmentModel> model, AgentConfig cfg,
                                         RewardBounds env_bounds) {
  switch (cfg.type) {
    case AgentType::Aixi:
    case AgentType::Aimu:
      return std::make_unique<BayesAgent>(std::move(model), cfg, env_bounds,
                                          UtilityFunction::extrinsic(env_bounds));
    case AgentType::KsaSquare:
      return std::make_unique<BayesAgent>(std::move(model), cfg, env_bounds,
                                          UtilityFunction::square());
    case AgentType::KsaShannon:
      return std::make_unique<BayesAgent>(std::move(model), cfg, env_bounds,
                                          UtilityFunction::shannon(cfg.shannon_beta_cap));
    case AgentType::KsaKl: {
      const RewardBounds b = ksa_bounds(UtilityKind::KlInformationGain, *model);
      return std::make_unique<BayesAgent>(std::move(model), cfg, env_bounds,
                                          UtilityFunction::kl_information_gain(b.min, b.max));
    }
    case AgentType::BayesExp:
      return std::make_unique<BayesExpAgent>(std::move(model), cfg, env_bounds);
    case AgentType::Thompson:
      return std::make_unique<ThompsonAgent>(std::move(model), cfg, env_bounds);
    case AgentType::Mdl:
      return std::make_unique<MdlAgent>(std::move(model), cfg, env_bounds);
  }
  throw std::invalid_argument("make_agent: unknown agent type");
}

}  // namespace urlab
