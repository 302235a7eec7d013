// The environment-model contract: a conditional predictive distribution over
// percepts with Bayesian update, sampling, and checkpoint/rollback so tree
// search can simulate futures and restore belief state bit-identically.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "urlab/core.hpp"
#include "urlab/distribution.hpp"
#include "urlab/random.hpp"

namespace urlab {

struct Checkpoint {
  std::uint64_t id = 0;
};

// LIFO checkpoint bookkeeping shared by model implementations. Rolling back
// to a token discards any checkpoints nested inside it; a token that is not
// on the stack (stale, foreign, or already consumed) is an error.
template <typename Snapshot>
class CheckpointStack {
 public:
  Checkpoint push(Snapshot snapshot) {
    const Checkpoint token{next_id_++};
    stack_.emplace_back(token.id, std::move(snapshot));
    return token;
  }

  Snapshot pop_to(Checkpoint token) {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (it->first == token.id) {
        Snapshot snapshot = std::move(it->second);
        stack_.erase(std::prev(it.base()), stack_.end());
        return snapshot;
      }
    }
    throw std::logic_error("rollback: unknown or already-consumed checkpoint token");
  }

  bool empty() const { return stack_.empty(); }
  std::size_t depth() const { return stack_.size(); }

 private:
  std::vector<std::pair<std::uint64_t, Snapshot>> stack_;
  std::uint64_t next_id_ = 1;
};

class EnvironmentModel {
 public:
  virtual ~EnvironmentModel() = default;

  virtual int num_actions() const = 0;

  // nu(e | internal history state, a).
  virtual double conditional_probability(Action a, const Percept& e) const = 0;

  // The full finite percept support for an action; sums to 1 within 1e-9.
  virtual PerceptDistribution percept_distribution(Action a) const = 0;

  virtual Percept sample(Action a, RandomSource& rng) const = 0;

  // Conditions the model on an observed (action, percept) pair.
  virtual void update(Action a, const Percept& e) = 0;

  // Entropy-difference information gain produced by the most recent update.
  virtual double info_gain_of_last_update() const = 0;

  virtual Checkpoint checkpoint() = 0;
  virtual void rollback(Checkpoint token) = 0;

  // Deep copy, so agents can be duplicated across simulation runs.
  virtual std::unique_ptr<EnvironmentModel> clone() const = 0;
};

// ---------------------------------------------------------------------------
// A known i.i.d. environment given by fixed per-action percept tables.
// Useful as a bandit testbed and as a mixture-component hypothesis.
class TabularModel final : public EnvironmentModel {
 public:
  explicit TabularModel(std::vector<PerceptDistribution> tables) : tables_(std::move(tables)) {
    if (tables_.empty()) throw std::invalid_argument("TabularModel: no actions");
    for (auto& t : tables_) t.canonicalize();
  }

  int num_actions() const override { return static_cast<int>(tables_.size()); }

  double conditional_probability(Action a, const Percept& e) const override {
    return table(a).probability_of(e);
  }

  PerceptDistribution percept_distribution(Action a) const override { return table(a); }

  Percept sample(Action a, RandomSource& rng) const override { return table(a).sample(rng); }

  void update(Action a, const Percept& e) override {
    if (conditional_probability(a, e) == 0.0)
      throw impossible_percept_error("TabularModel: percept outside support");
    updated_ = true;
  }

  double info_gain_of_last_update() const override {
    if (!updated_) throw std::logic_error("info_gain_of_last_update: no update has occurred");
    return 0.0;  // nothing is learned from a known environment
  }

  Checkpoint checkpoint() override { return checkpoints_.push(updated_); }
  void rollback(Checkpoint token) override { updated_ = checkpoints_.pop_to(token); }

  std::unique_ptr<EnvironmentModel> clone() const override {
    return std::make_unique<TabularModel>(*this);
  }

 private:
  const PerceptDistribution& table(Action a) const {
    if (a.index >= tables_.size()) throw std::domain_error("TabularModel: action out of range");
    return tables_[a.index];
  }

  std::vector<PerceptDistribution> tables_;
  bool updated_ = false;
  CheckpointStack<bool> checkpoints_;
};

// Two-outcome bandit arm helper: payout reward with probability p, else the
// alternative reward.
inline PerceptDistribution bernoulli_arm(double p, double payout_reward, double other_reward,
                                         std::uint8_t obs_width = 1) {
  PerceptDistribution d;
  if (p > 0.0) d.add(Percept{0, obs_width, payout_reward}, p);
  if (p < 1.0) d.add(Percept{0, obs_width, other_reward}, 1.0 - p);
  d.canonicalize();
  return d;
}

}  // namespace urlab
