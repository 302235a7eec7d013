// A gridworld with fully known layout and dynamics, wrapped as an
// environment model: the informed model for AImu, the component hypotheses
// of the dispenser-location mixture, and the planning model for committed
// Thompson/MDL hypotheses.
#pragma once

#include <memory>

#include "urlab/gridworld.hpp"
#include "urlab/model.hpp"

namespace urlab {

class KnownGridModel final : public EnvironmentModel {
 public:
  explicit KnownGridModel(GridSpec spec, Coord pos = {0, 0})
      : spec_(std::make_shared<const GridSpec>(std::move(spec))), pos_(pos) {}
  KnownGridModel(std::shared_ptr<const GridSpec> spec, Coord pos = {0, 0})
      : spec_(std::move(spec)), pos_(pos) {}

  int num_actions() const override { return spec_->num_actions(); }

  double conditional_probability(Action a, const Percept& e) const override {
    if (e.observation_width != spec_->observation_width()) return 0.0;
    const Coord dest = neighbor(pos_, a);
    const bool bump = a.index != grid_actions::noop.index && spec_->blocked(dest);
    const Coord rpos = bump ? pos_ : dest;
    const Tile& tile = spec_->at(rpos);

    double p_obs;
    if (tile.kind == TileKind::Noise) {
      p_obs = e.observation < static_cast<std::uint32_t>(tile.noise_alphabet)
                  ? 1.0 / tile.noise_alphabet
                  : 0.0;
    } else {
      p_obs = e.observation == observe_bits(*spec_, rpos) ? 1.0 : 0.0;
    }
    if (p_obs == 0.0) return 0.0;

    if (bump) return e.reward == kRewardBump ? p_obs : 0.0;
    if (tile.kind == TileKind::Dispenser) {
      if (e.reward == kRewardDispenser) return tile.theta * p_obs;
      if (e.reward == kRewardEmpty) return (1.0 - tile.theta) * p_obs;
      return 0.0;
    }
    return e.reward == kRewardEmpty ? p_obs : 0.0;
  }

  PerceptDistribution percept_distribution(Action a) const override {
    return exact_percept_distribution(*spec_, GridState{pos_}, a);
  }

  Percept sample(Action a, RandomSource& rng) const override {
    return step(*spec_, GridState{pos_}, a, rng).second;
  }

  void update(Action a, const Percept& e) override {
    if (conditional_probability(a, e) == 0.0)
      throw impossible_percept_error("KnownGridModel: percept impossible under known dynamics");
    if (e.reward != kRewardBump && a.index != grid_actions::noop.index) pos_ = neighbor(pos_, a);
    updated_ = true;
  }

  double info_gain_of_last_update() const override {
    if (!updated_) throw std::logic_error("info_gain_of_last_update: no update has occurred");
    return 0.0;
  }

  Checkpoint checkpoint() override { return checkpoints_.push({pos_, updated_}); }

  void rollback(Checkpoint token) override {
    const auto s = checkpoints_.pop_to(token);
    pos_ = s.pos;
    updated_ = s.updated;
  }

  std::unique_ptr<EnvironmentModel> clone() const override {
    return std::make_unique<KnownGridModel>(*this);
  }

  const GridSpec& spec() const { return *spec_; }
  Coord position() const { return pos_; }

 private:
  struct Snapshot {
    Coord pos;
    bool updated;
  };

  std::shared_ptr<const GridSpec> spec_;  // immutable, shared across clones
  Coord pos_;
  bool updated_ = false;
  CheckpointStack<Snapshot> checkpoints_;
};

}  // namespace urlab
