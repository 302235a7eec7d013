// The factorized Dirichlet gridworld model: per-tile wall beliefs with a
// Haldane Beta(0,0) prior (predictive 0.5 until the first observation, then
// a point mass) and per-tile Laplace Beta(1,1) payout estimators. Updates
// touch a constant number of tiles; checkpointing uses an undo log.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "urlab/gridworld.hpp"
#include "urlab/model.hpp"

namespace urlab {

enum class WallBelief : std::uint8_t { Unknown, KnownOpen, KnownWall };

namespace detail {

// lgamma/digamma at integer arguments, via growing thread-local tables.
// Beta counts are integers, so these cover every entropy evaluation exactly.
inline double lgamma_int(int k) {
  thread_local std::vector<double> table{0.0, 0.0};  // lgamma(1) = lgamma(2)... index 0 unused
  while (static_cast<int>(table.size()) <= k)
    table.push_back(table.back() + std::log(static_cast<double>(table.size() - 1)));
  return table[k];
}

inline double digamma_int(int k) {
  constexpr double kEulerMascheroni = 0.57721566490153286060651209;
  thread_local std::vector<double> table{0.0, -kEulerMascheroni};
  while (static_cast<int>(table.size()) <= k)
    table.push_back(table.back() + 1.0 / (static_cast<double>(table.size()) - 1.0));
  return table[k];
}

// Differential entropy of Beta(a, b) for integer a, b >= 1.
inline double beta_entropy(int a, int b) {
  const double lbeta = lgamma_int(a) + lgamma_int(b) - lgamma_int(a + b);
  return lbeta - (a - 1) * digamma_int(a) - (b - 1) * digamma_int(b) +
         (a + b - 2) * digamma_int(a + b);
}

}  // namespace detail

class DirichletGridModel final : public EnvironmentModel {
 public:
  struct TileEstimator {
    WallBelief wall = WallBelief::Unknown;
    std::int32_t payouts = 0;  // observed 100-reward draws while on the tile
    std::int32_t visits = 0;   // observed payout/no-payout draws while on the tile
  };

  struct TileBeliefRecord {
    int x, y;
    WallBelief wall;
    std::int32_t payouts, visits;
    double payout_mean;
  };

  explicit DirichletGridModel(int side, int observation_width = 4)
      : side_(side),
        obs_width_(static_cast<std::uint8_t>(observation_width)),
        cells_(static_cast<std::size_t>(side) * side) {
    if (side < 2) throw std::invalid_argument("DirichletGridModel: side must be >= 2");
    if (observation_width < 4) throw std::invalid_argument("DirichletGridModel: observation width < 4");
    cells_[0].wall = WallBelief::KnownOpen;  // the agent starts on an open tile
  }

  int num_actions() const override { return grid_actions::count; }
  int side() const { return side_; }
  Coord position() const { return pos_; }

  // P(tile is a wall) under current beliefs; off-grid is a known wall.
  double wall_probability(Coord c) const {
    if (c.x < 0 || c.x >= side_ || c.y < 0 || c.y >= side_) return 1.0;
    switch (cell(c).wall) {
      case WallBelief::KnownWall: return 1.0;
      case WallBelief::KnownOpen: return 0.0;
      default: return 0.5;
    }
  }

  // Posterior-mean payout probability of a tile, (s + 1) / (n + 2).
  double payout_mean(Coord c) const {
    const TileEstimator& t = cell(c);
    return (t.payouts + 1.0) / (t.visits + 2.0);
  }

  double conditional_probability(Action a, const Percept& e) const override {
    if (e.observation_width != obs_width_) return 0.0;
    const bool moving = a.index != grid_actions::noop.index;
    const Coord dest = neighbor(pos_, a);
    const double p_block = moving ? wall_probability(dest) : 0.0;
    const double p_extra = std::pow(0.5, obs_width_ - 4);  // unmodeled high bits

    if (e.reward == kRewardBump) {
      if (p_block == 0.0) return 0.0;
      double p = p_block * p_extra;
      for (int d = 0; d < 4 && p > 0.0; ++d) {
        const bool bit = (e.observation >> d) & 1u;
        // the attempted direction is conditioned on the bump itself
        p *= d == a.index ? (bit ? 1.0 : 0.0) : bit_probability(pos_, d, bit);
      }
      return p;
    }
    if (e.reward != kRewardEmpty && e.reward != kRewardDispenser) return 0.0;
    if (p_block == 1.0) return 0.0;
    const Coord rpos = moving ? dest : pos_;
    double p = (1.0 - p_block) * p_extra;
    for (int d = 0; d < 4 && p > 0.0; ++d)
      p *= bit_probability(rpos, d, (e.observation >> d) & 1u);
    const double theta = payout_mean(rpos);
    p *= e.reward == kRewardDispenser ? theta : 1.0 - theta;
    return p;
  }

  PerceptDistribution percept_distribution(Action a) const override {
    PerceptDistribution dist;
    const bool moving = a.index != grid_actions::noop.index;
    const Coord dest = neighbor(pos_, a);
    const double p_block = moving ? wall_probability(dest) : 0.0;
    if (p_block > 0.0)
      enumerate_observations(pos_, static_cast<int>(a.index), [&](std::uint32_t obs, double p_obs) {
        dist.add(Percept{obs, obs_width_, kRewardBump}, p_block * p_obs);
      });
    if (p_block < 1.0) {
      const Coord rpos = moving ? dest : pos_;
      const double theta = payout_mean(rpos);
      enumerate_observations(rpos, -1, [&](std::uint32_t obs, double p_obs) {
        dist.add(Percept{obs, obs_width_, kRewardEmpty}, (1.0 - p_block) * p_obs * (1.0 - theta));
        dist.add(Percept{obs, obs_width_, kRewardDispenser}, (1.0 - p_block) * p_obs * theta);
      });
    }
    dist.canonicalize();
    return dist;
  }

  Percept sample(Action a, RandomSource& rng) const override {
    const bool moving = a.index != grid_actions::noop.index;
    const Coord dest = neighbor(pos_, a);
    const double p_block = moving ? wall_probability(dest) : 0.0;
    if (p_block > 0.0 && rng.bernoulli(p_block)) {
      std::uint32_t obs = sample_observation(pos_, rng);
      obs |= 1u << a.index;  // bumped, so the attempted direction reads wall
      return Percept{obs, obs_width_, kRewardBump};
    }
    const Coord rpos = moving ? dest : pos_;
    const std::uint32_t obs = sample_observation(rpos, rng);
    const double reward = rng.bernoulli(payout_mean(rpos)) ? kRewardDispenser : kRewardEmpty;
    return Percept{obs, obs_width_, reward};
  }

  void update(Action a, const Percept& e) override {
    const bool recording = !checkpoints_.empty();
    Frame frame;
    if (recording) {
      frame.pos_before = pos_;
      frame.info_gain_before = last_info_gain_;
      frame.updated_before = updated_;
    }
    double gain = 0.0;
    const Coord dest = neighbor(pos_, a);
    if (e.reward == kRewardBump) {
      gain += set_wall(dest, WallBelief::KnownWall, recording ? &frame : nullptr);
      gain += learn_observation(pos_, e.observation, recording ? &frame : nullptr);
    } else {
      const Coord rpos = a.index == grid_actions::noop.index ? pos_ : dest;
      gain += set_wall(rpos, WallBelief::KnownOpen, recording ? &frame : nullptr);
      gain += learn_observation(rpos, e.observation, recording ? &frame : nullptr);
      TileEstimator& t = mutable_cell(rpos, recording ? &frame : nullptr);
      const double h_before = detail::beta_entropy(t.payouts + 1, t.visits - t.payouts + 1);
      if (e.reward == kRewardDispenser) ++t.payouts;
      ++t.visits;
      gain += h_before - detail::beta_entropy(t.payouts + 1, t.visits - t.payouts + 1);
      pos_ = rpos;
    }
    last_info_gain_ = gain;
    updated_ = true;
    if (recording) frames_.push_back(std::move(frame));
  }

  double info_gain_of_last_update() const override {
    if (!updated_) throw std::logic_error("info_gain_of_last_update: no update has occurred");
    return last_info_gain_;
  }

  Checkpoint checkpoint() override { return checkpoints_.push(frames_.size()); }

  void rollback(Checkpoint token) override {
    const std::size_t marker = checkpoints_.pop_to(token);
    while (frames_.size() > marker) {
      const Frame& f = frames_.back();
      for (auto it = f.cells.rbegin(); it != f.cells.rend(); ++it) cells_[it->index] = it->before;
      pos_ = f.pos_before;
      last_info_gain_ = f.info_gain_before;
      updated_ = f.updated_before;
      frames_.pop_back();
    }
    if (checkpoints_.empty()) frames_.clear();
  }

  std::unique_ptr<EnvironmentModel> clone() const override {
    return std::make_unique<DirichletGridModel>(*this);
  }

  std::vector<TileBeliefRecord> belief_snapshot() const {
    std::vector<TileBeliefRecord> out;
    out.reserve(cells_.size());
    for (int i = 0; i < side_ * side_; ++i) {
      const TileEstimator& t = cells_[i];
      out.push_back({i % side_, i / side_, t.wall, t.payouts, t.visits,
                     (t.payouts + 1.0) / (t.visits + 2.0)});
    }
    return out;
  }

 private:
  struct CellUndo {
    int index;
    TileEstimator before;
  };
  struct Frame {
    std::vector<CellUndo> cells;
    Coord pos_before;
    double info_gain_before = 0.0;
    bool updated_before = false;
  };

  const TileEstimator& cell(Coord c) const { return cells_[c.y * side_ + c.x]; }

  TileEstimator& mutable_cell(Coord c, Frame* frame) {
    const int index = c.y * side_ + c.x;
    if (frame) frame->cells.push_back({index, cells_[index]});
    return cells_[index];
  }

  double bit_probability(Coord c, int direction, bool bit) const {
    const double wp = wall_probability(neighbor(c, Action{static_cast<std::uint8_t>(direction)}));
    return bit ? wp : 1.0 - wp;
  }

  // Entropy released by pinning an unknown wall belief; contradictory
  // evidence on an already-known tile is ignored (beliefs never revert).
  double set_wall(Coord c, WallBelief value, Frame* frame) {
    if (c.x < 0 || c.x >= side_ || c.y < 0 || c.y >= side_) return 0.0;
    TileEstimator& t = cells_[c.y * side_ + c.x];
    if (t.wall != WallBelief::Unknown) return 0.0;
    if (frame) frame->cells.push_back({c.y * side_ + c.x, t});
    t.wall = value;
    return std::log(2.0);
  }

  double learn_observation(Coord c, std::uint32_t obs, Frame* frame) {
    double gain = 0.0;
    for (int d = 0; d < 4; ++d) {
      const Coord nb = neighbor(c, Action{static_cast<std::uint8_t>(d)});
      gain += set_wall(nb, (obs >> d) & 1u ? WallBelief::KnownWall : WallBelief::KnownOpen, frame);
    }
    return gain;
  }

  template <typename Fn>
  void enumerate_observations(Coord c, int forced_direction, Fn&& fn) const {
    const int extra = obs_width_ - 4;
    std::vector<std::pair<std::uint32_t, double>> partial{{0u, 1.0}};
    auto expand_bit = [&](int bit_index, double p_one) {
      if (p_one == 0.0 || p_one == 1.0) {
        for (auto& [obs, p] : partial)
          if (p_one == 1.0) obs |= 1u << bit_index;
        return;
      }
      std::vector<std::pair<std::uint32_t, double>> next;
      next.reserve(partial.size() * 2);
      for (const auto& [obs, p] : partial) {
        next.emplace_back(obs, p * (1.0 - p_one));
        next.emplace_back(obs | (1u << bit_index), p * p_one);
      }
      partial = std::move(next);
    };
    for (int d = 0; d < 4; ++d)
      expand_bit(d, d == forced_direction ? 1.0 : bit_probability(c, d, true));
    for (int k = 0; k < extra; ++k) expand_bit(4 + k, 0.5);
    for (const auto& [obs, p] : partial) fn(obs, p);
  }

  std::uint32_t sample_observation(Coord c, RandomSource& rng) const {
    std::uint32_t obs = 0;
    for (int d = 0; d < 4; ++d)
      if (rng.bernoulli(bit_probability(c, d, true))) obs |= 1u << d;
    for (int k = 4; k < obs_width_; ++k)
      if (rng.bernoulli(0.5)) obs |= 1u << k;
    return obs;
  }

  int side_;
  std::uint8_t obs_width_;
  std::vector<TileEstimator> cells_;
  Coord pos_{0, 0};
  double last_info_gain_ = 0.0;
  bool updated_ = false;
  std::vector<Frame> frames_;  // undo log, recorded only under open checkpoints
  CheckpointStack<std::size_t> checkpoints_;
};

}  // namespace urlab
