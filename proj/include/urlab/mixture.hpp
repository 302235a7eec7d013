// Bayesian mixture over a finite hypothesis class: xi(e) = sum_nu w_nu nu(e),
// with sequential likelihood-ratio weight updates, posterior sampling,
// MDL-style selection, and per-hypothesis log-likelihood bookkeeping.
//
// Components falsified by a zero-likelihood percept keep weight exactly 0
// forever and are frozen (no further internal updates); selection operations
// never return them.
#pragma once

#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "urlab/known_grid.hpp"
#include "urlab/model.hpp"

namespace urlab {

class MixtureModel final : public EnvironmentModel {
 public:
  MixtureModel(std::vector<std::unique_ptr<EnvironmentModel>> components, std::vector<double> prior,
               std::vector<int> complexities = {})
      : components_(std::move(components)),
        weights_(std::move(prior)),
        log_likelihoods_(components_.size(), 0.0),
        complexities_(std::move(complexities)) {
    if (components_.empty()) throw std::invalid_argument("MixtureModel: empty hypothesis class");
    if (weights_.size() != components_.size())
      throw std::invalid_argument("MixtureModel: prior size mismatch");
    if (complexities_.empty()) {
      complexities_.resize(components_.size());
      std::iota(complexities_.begin(), complexities_.end(), 0);
    }
    if (complexities_.size() != components_.size())
      throw std::invalid_argument("MixtureModel: complexity list size mismatch");
    double total = 0.0;
    for (double w : weights_) {
      if (w <= 0.0) throw std::invalid_argument("MixtureModel: prior weights must be positive");
      total += w;
    }
    for (double& w : weights_) w /= total;
  }

  MixtureModel(const MixtureModel& other)
      : weights_(other.weights_),
        log_likelihoods_(other.log_likelihoods_),
        complexities_(other.complexities_),
        last_info_gain_(other.last_info_gain_),
        updated_(other.updated_),
        checkpoints_(other.checkpoints_) {
    components_.reserve(other.components_.size());
    for (const auto& c : other.components_) components_.push_back(c->clone());
  }

  int num_actions() const override { return components_.front()->num_actions(); }

  int size() const { return static_cast<int>(components_.size()); }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> log_likelihoods() const { return log_likelihoods_; }
  const std::vector<int>& complexities() const { return complexities_; }
  const EnvironmentModel& component(int i) const { return *components_.at(i); }

  // A deep copy of hypothesis nu_i, synced to the mixture's current history
  // state; the planning model for Thompson sampling and MDL.
  std::unique_ptr<EnvironmentModel> component_model(int i) const { return components_.at(i)->clone(); }

  double conditional_probability(Action a, const Percept& e) const override {
    double xi = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i)
      if (weights_[i] > 0.0) xi += weights_[i] * components_[i]->conditional_probability(a, e);
    return xi;
  }

  PerceptDistribution percept_distribution(Action a) const override {
    PerceptDistribution dist;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (weights_[i] == 0.0) continue;
      for (const auto& [e, p] : components_[i]->percept_distribution(a))
        dist.add(e, weights_[i] * p);
    }
    dist.canonicalize();
    return dist;
  }

  Percept sample(Action a, RandomSource& rng) const override {
    // A collapsed posterior delegates directly, so planning against a
    // point-mass mixture consumes the same random stream as planning
    // against the hypothesis itself.
    int alive = -1;
    bool single = true;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] > 0.0) {
        if (alive >= 0) {
          single = false;
          break;
        }
        alive = static_cast<int>(i);
      }
    }
    const int i = single ? alive : rng.weighted_index(weights_);
    return components_[i]->sample(a, rng);
  }

  void update(Action a, const Percept& e) override {
    const std::size_t k = components_.size();
    likelihood_scratch_.resize(k);
    double xi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      likelihood_scratch_[i] =
          weights_[i] > 0.0 ? components_[i]->conditional_probability(a, e) : 0.0;
      xi += weights_[i] * likelihood_scratch_[i];
    }
    if (xi <= 0.0) throw impossible_percept_error("MixtureModel: xi(e) = 0 for observed percept");

    const double entropy_before = entropy(weights_);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (weights_[i] == 0.0) continue;
      const double lik = likelihood_scratch_[i];
      weights_[i] *= lik / xi;
      log_likelihoods_[i] += std::log(lik);  // -inf on falsification
      if (lik > 0.0) components_[i]->update(a, e);
      total += weights_[i];
    }
    for (double& w : weights_) w /= total;
    last_info_gain_ = entropy_before - entropy(weights_);
    updated_ = true;
  }

  double info_gain_of_last_update() const override {
    if (!updated_) throw std::logic_error("info_gain_of_last_update: no update has occurred");
    return last_info_gain_;
  }

  Checkpoint checkpoint() override {
    Snapshot s{weights_, log_likelihoods_, last_info_gain_, updated_, {}};
    s.component_tokens.reserve(components_.size());
    for (auto& c : components_) s.component_tokens.push_back(c->checkpoint());
    return checkpoints_.push(std::move(s));
  }

  void rollback(Checkpoint token) override {
    Snapshot s = checkpoints_.pop_to(token);
    weights_ = std::move(s.weights);
    log_likelihoods_ = std::move(s.log_likelihoods);
    last_info_gain_ = s.last_info_gain;
    updated_ = s.updated;
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i]->rollback(s.component_tokens[i]);
  }

  std::unique_ptr<EnvironmentModel> clone() const override {
    return std::make_unique<MixtureModel>(*this);
  }

  // Hypothesis index drawn from the posterior (Thompson sampling).
  int posterior_sample(RandomSource& rng) const { return rng.weighted_index(weights_); }

  // argmin over unfalsified hypotheses of complexity(nu) - lambda * loglik(nu);
  // ties broken by lower complexity, then lower index.
  int mdl_select(double lambda) const {
    int best = -1;
    double best_score = kInfinity;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (weights_[i] == 0.0) continue;
      const double score = complexities_[i] - lambda * log_likelihoods_[i];
      if (best < 0 || score < best_score ||
          (score == best_score && complexities_[i] < complexities_[best])) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    if (best < 0) throw std::runtime_error("mdl_select: every hypothesis has been falsified");
    return best;
  }

 private:
  struct Snapshot {
    std::vector<double> weights;
    std::vector<double> log_likelihoods;
    double last_info_gain;
    bool updated;
    std::vector<Checkpoint> component_tokens;
  };

  std::vector<std::unique_ptr<EnvironmentModel>> components_;
  std::vector<double> weights_;
  std::vector<double> log_likelihoods_;
  std::vector<int> complexities_;
  double last_info_gain_ = 0.0;
  bool updated_ = false;
  CheckpointStack<Snapshot> checkpoints_;
  mutable std::vector<double> likelihood_scratch_;
};

// ---------------------------------------------------------------------------
// M_loc: the mixture over dispenser locations. One hypothesis per tile of an
// N x N layout (|M| = N^2, including placements under walls, which are inert
// and can never be falsified); layout and dynamics are shared and known,
// only the dispenser location differs. Complexity of a hypothesis is its
// row-major tile index.

inline GridSpec location_hypothesis_spec(const GridSpec& base, int tile_index, double theta) {
  std::vector<Tile> tiles = base.tiles();
  for (Tile& t : tiles)
    if (t.kind == TileKind::Dispenser) t = Tile{TileKind::Empty, 0.0, 0};
  Tile& target = tiles[tile_index];
  if (target.kind == TileKind::Empty) target = Tile{TileKind::Dispenser, theta, 0};
  return GridSpec(base.side(), std::move(tiles));
}

inline std::unique_ptr<MixtureModel> make_location_mixture(const GridSpec& base, double theta,
                                                           Coord pos = {0, 0}) {
  const int n = base.side() * base.side();
  std::vector<std::unique_ptr<EnvironmentModel>> components;
  components.reserve(n);
  for (int i = 0; i < n; ++i)
    components.push_back(std::make_unique<KnownGridModel>(location_hypothesis_spec(base, i, theta), pos));
  std::vector<double> prior(n, 1.0 / n);
  std::vector<int> complexities(n);
  std::iota(complexities.begin(), complexities.end(), 0);
  return std::make_unique<MixtureModel>(std::move(components), std::move(prior), std::move(complexities));
}

}  // namespace urlab
