// The partially observable gridworld: an N x N grid of empty, wall,
// stochastic reward-dispenser, and noise tiles. The agent observes a 4-bit
// wall-adjacency vector (order left, right, up, down, LSB first; off-grid
// counts as wall) and collects r = -1 on empty tiles, r = -10 for bumping
// into walls, and r = 100 with probability theta on a dispenser.
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "urlab/core.hpp"
#include "urlab/distribution.hpp"
#include "urlab/random.hpp"

namespace urlab {

enum class TileKind : std::uint8_t { Empty, Wall, Dispenser, Noise };

struct Tile {
  TileKind kind = TileKind::Empty;
  double theta = 0.0;       // Dispenser payout probability
  int noise_alphabet = 0;   // Noise alphabet size
};

struct Coord {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Coord, Coord) = default;
};

// Gridworld action indices: {left, right, up, down, no-op}.
namespace grid_actions {
inline constexpr Action left{0};
inline constexpr Action right{1};
inline constexpr Action up{2};
inline constexpr Action down{3};
inline constexpr Action noop{4};
inline constexpr int count = 5;
}  // namespace grid_actions

inline constexpr double kRewardEmpty = -1.0;
inline constexpr double kRewardBump = -10.0;
inline constexpr double kRewardDispenser = 100.0;
inline constexpr int kDefaultNoiseAlphabet = 16;

namespace detail {
inline int bits_for_alphabet(int alphabet) {
  int bits = 1;
  while ((1 << bits) < alphabet) ++bits;
  return bits;
}
}  // namespace detail

class GridSpec {
 public:
  GridSpec(int side, std::vector<Tile> tiles) : side_(side), tiles_(std::move(tiles)) {
    if (side < 2) throw std::invalid_argument("GridSpec: side length must be >= 2");
    if (tiles_.size() != static_cast<std::size_t>(side) * side)
      throw std::invalid_argument("GridSpec: tile count does not match side length");
  }

  int side() const { return side_; }
  Coord start() const { return {0, 0}; }

  bool in_bounds(Coord c) const { return c.x >= 0 && c.x < side_ && c.y >= 0 && c.y < side_; }
  int index_of(Coord c) const { return c.y * side_ + c.x; }
  Coord coord_of(int index) const { return {index % side_, index / side_}; }

  const Tile& at(Coord c) const { return tiles_[index_of(c)]; }
  const Tile& at(int index) const { return tiles_[index]; }
  const std::vector<Tile>& tiles() const { return tiles_; }

  // Off-grid is treated identically to a wall.
  bool blocked(Coord c) const { return !in_bounds(c) || at(c).kind == TileKind::Wall; }

  RewardBounds reward_bounds() const { return {kRewardBump, kRewardDispenser}; }

  int num_actions() const { return grid_actions::count; }

  // Declared width of the observation bit vector: 4 wall bits, widened when
  // a noise tile's alphabet needs more.
  int observation_width() const {
    int width = 4;
    for (const Tile& t : tiles_)
      if (t.kind == TileKind::Noise) width = std::max(width, detail::bits_for_alphabet(t.noise_alphabet));
    return width;
  }

  std::vector<int> dispenser_indices() const {
    std::vector<int> out;
    for (int i = 0; i < side_ * side_; ++i)
      if (tiles_[i].kind == TileKind::Dispenser) out.push_back(i);
    return out;
  }

  // Environment-spec invariants: open start, at least one dispenser, sane
  // tile parameters. Component hypotheses inside mixtures are exempt.
  void validate() const {
    if (at(start()).kind == TileKind::Wall) throw std::invalid_argument("GridSpec: start tile is a wall");
    if (dispenser_indices().empty()) throw std::invalid_argument("GridSpec: no dispenser tile");
    for (const Tile& t : tiles_) {
      if (t.kind == TileKind::Dispenser && !(t.theta > 0.0 && t.theta <= 1.0))
        throw std::invalid_argument("GridSpec: dispenser theta must be in (0, 1]");
      if (t.kind == TileKind::Noise && t.noise_alphabet < 2)
        throw std::invalid_argument("GridSpec: noise alphabet must be >= 2");
    }
  }

 private:
  int side_;
  std::vector<Tile> tiles_;  // row-major, index = y * side + x
};

struct GridState {
  Coord pos;
};

inline Coord neighbor(Coord c, Action a) {
  switch (a.index) {
    case 0: return {c.x - 1, c.y};
    case 1: return {c.x + 1, c.y};
    case 2: return {c.x, c.y - 1};
    case 3: return {c.x, c.y + 1};
    default: return c;
  }
}

// Wall-adjacency bits of a position, order (left, right, up, down) LSB first.
inline std::uint32_t observe_bits(const GridSpec& spec, Coord pos) {
  if (spec.blocked(pos)) throw std::domain_error("observe_bits: position inside a wall");
  std::uint32_t bits = 0;
  for (int d = 0; d < 4; ++d)
    if (spec.blocked(neighbor(pos, Action{static_cast<std::uint8_t>(d)}))) bits |= 1u << d;
  return bits;
}

// One interaction cycle against the true environment. Movement into a wall
// or off-grid leaves the position unchanged and costs -10; the percept is
// attached to the resulting position.
inline std::pair<GridState, Percept> step(const GridSpec& spec, GridState state, Action a, RandomSource& rng) {
  const auto width = static_cast<std::uint8_t>(spec.observation_width());
  const Coord dest = neighbor(state.pos, a);
  if (a.index != grid_actions::noop.index && spec.blocked(dest)) {
    Percept e{observe_bits(spec, state.pos), width, kRewardBump};
    const Tile& here = spec.at(state.pos);
    if (here.kind == TileKind::Noise)
      e.observation = static_cast<std::uint32_t>(rng.uniform_int(here.noise_alphabet));
    return {state, e};
  }
  const Coord pos = (a.index == grid_actions::noop.index) ? state.pos : dest;
  const Tile& tile = spec.at(pos);
  Percept e{observe_bits(spec, pos), width, kRewardEmpty};
  if (tile.kind == TileKind::Noise)
    e.observation = static_cast<std::uint32_t>(rng.uniform_int(tile.noise_alphabet));
  if (tile.kind == TileKind::Dispenser && rng.bernoulli(tile.theta)) e.reward = kRewardDispenser;
  return {GridState{pos}, e};
}

// The exact finite-support distribution step() samples from.
inline PerceptDistribution exact_percept_distribution(const GridSpec& spec, GridState state, Action a) {
  const auto width = static_cast<std::uint8_t>(spec.observation_width());
  PerceptDistribution dist;
  const Coord dest = neighbor(state.pos, a);
  const bool bump = a.index != grid_actions::noop.index && spec.blocked(dest);
  const Coord pos = bump ? state.pos : dest;
  const Tile& tile = spec.at(pos);

  std::vector<std::pair<std::uint32_t, double>> observations;
  if (tile.kind == TileKind::Noise) {
    const double p = 1.0 / tile.noise_alphabet;
    for (int v = 0; v < tile.noise_alphabet; ++v) observations.emplace_back(static_cast<std::uint32_t>(v), p);
  } else {
    observations.emplace_back(observe_bits(spec, pos), 1.0);
  }

  std::vector<std::pair<double, double>> rewards;
  if (bump) {
    rewards.emplace_back(kRewardBump, 1.0);
  } else if (tile.kind == TileKind::Dispenser) {
    if (tile.theta < 1.0) rewards.emplace_back(kRewardEmpty, 1.0 - tile.theta);
    rewards.emplace_back(kRewardDispenser, tile.theta);
  } else {
    rewards.emplace_back(kRewardEmpty, 1.0);
  }

  for (const auto& [obs, po] : observations)
    for (const auto& [r, pr] : rewards) dist.add(Percept{obs, width, r}, po * pr);
  dist.canonicalize();
  return dist;
}

// Number of non-wall tiles reachable from the start by cardinal moves.
inline int reachable_count(const GridSpec& spec) {
  std::vector<char> seen(static_cast<std::size_t>(spec.side()) * spec.side(), 0);
  std::vector<Coord> stack{spec.start()};
  if (spec.blocked(spec.start())) return 0;
  seen[spec.index_of(spec.start())] = 1;
  int count = 0;
  while (!stack.empty()) {
    const Coord c = stack.back();
    stack.pop_back();
    ++count;
    for (int d = 0; d < 4; ++d) {
      const Coord n = neighbor(c, Action{static_cast<std::uint8_t>(d)});
      if (!spec.blocked(n) && !seen[spec.index_of(n)]) {
        seen[spec.index_of(n)] = 1;
        stack.push_back(n);
      }
    }
  }
  return count;
}

inline bool tile_reachable(const GridSpec& spec, Coord target) {
  if (spec.blocked(target)) return false;
  std::vector<char> seen(static_cast<std::size_t>(spec.side()) * spec.side(), 0);
  std::vector<Coord> stack{spec.start()};
  if (spec.blocked(spec.start())) return false;
  seen[spec.index_of(spec.start())] = 1;
  while (!stack.empty()) {
    const Coord c = stack.back();
    stack.pop_back();
    if (c == target) return true;
    for (int d = 0; d < 4; ++d) {
      const Coord n = neighbor(c, Action{static_cast<std::uint8_t>(d)});
      if (!spec.blocked(n) && !seen[spec.index_of(n)]) {
        seen[spec.index_of(n)] = 1;
        stack.push_back(n);
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Layout text format: one row per line, '.' empty, '#' wall, 'D' dispenser
// (thetas supplied separately in row-major dispenser order), 'N' noise.
// Parsed bit-exactly; trailing whitespace is rejected.

inline GridSpec parse_layout(const std::vector<std::string>& rows, const std::vector<double>& thetas,
                             int noise_alphabet = kDefaultNoiseAlphabet) {
  if (rows.empty()) throw std::invalid_argument("layout: no rows");
  const int side = static_cast<int>(rows.size());
  std::vector<Tile> tiles(static_cast<std::size_t>(side) * side);
  std::size_t dispensers = 0;
  for (int y = 0; y < side; ++y) {
    const std::string& row = rows[y];
    if (static_cast<int>(row.size()) != side)
      throw std::invalid_argument("layout: row " + std::to_string(y) + " has length " +
                                  std::to_string(row.size()) + ", expected " + std::to_string(side));
    for (int x = 0; x < side; ++x) {
      Tile& t = tiles[static_cast<std::size_t>(y) * side + x];
      switch (row[x]) {
        case '.': t.kind = TileKind::Empty; break;
        case '#': t.kind = TileKind::Wall; break;
        case 'D':
          t.kind = TileKind::Dispenser;
          if (dispensers >= thetas.size())
            throw std::invalid_argument("layout: more dispensers than theta values");
          t.theta = thetas[dispensers++];
          break;
        case 'N':
          t.kind = TileKind::Noise;
          t.noise_alphabet = noise_alphabet;
          break;
        default:
          if (std::isspace(static_cast<unsigned char>(row[x])))
            throw std::invalid_argument("layout: whitespace in row " + std::to_string(y));
          throw std::invalid_argument(std::string("layout: unknown tile character '") + row[x] + "'");
      }
    }
  }
  if (dispensers != thetas.size()) throw std::invalid_argument("layout: unused theta values");
  GridSpec spec(side, std::move(tiles));
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Random layout generation

struct GridGeneratorConfig {
  int side = 10;
  double wall_density = 0.0;
  std::vector<double> thetas = {0.75};  // one dispenser per entry
  int noise_tiles = 0;
  int noise_alphabet = kDefaultNoiseAlphabet;
  std::optional<std::vector<std::string>> layout;  // explicit layout passes through
  int max_retries = 100;
};

// Generates a valid spec with an open start and every dispenser reachable;
// explicit layouts pass through unchanged.
inline GridSpec generate_spec(const GridGeneratorConfig& cfg, RandomSource& rng) {
  if (cfg.layout) return parse_layout(*cfg.layout, cfg.thetas, cfg.noise_alphabet);
  if (cfg.thetas.empty()) throw std::invalid_argument("generate_spec: at least one dispenser theta required");
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const int side = cfg.side;
    std::vector<Tile> tiles(static_cast<std::size_t>(side) * side);
    for (Tile& t : tiles)
      if (rng.bernoulli(cfg.wall_density)) t.kind = TileKind::Wall;
    std::vector<int> open;
    for (int i = 1; i < side * side; ++i)
      if (tiles[i].kind == TileKind::Empty) open.push_back(i);
    if (tiles[0].kind == TileKind::Wall ||
        open.size() < cfg.thetas.size() + static_cast<std::size_t>(cfg.noise_tiles))
      continue;
    for (double theta : cfg.thetas) {
      const int slot = rng.uniform_int(static_cast<int>(open.size()));
      tiles[open[slot]] = Tile{TileKind::Dispenser, theta, 0};
      open.erase(open.begin() + slot);
    }
    for (int k = 0; k < cfg.noise_tiles; ++k) {
      const int slot = rng.uniform_int(static_cast<int>(open.size()));
      tiles[open[slot]] = Tile{TileKind::Noise, 0.0, cfg.noise_alphabet};
      open.erase(open.begin() + slot);
    }
    GridSpec spec(side, std::move(tiles));
    bool ok = true;
    for (int idx : spec.dispenser_indices())
      if (!tile_reachable(spec, spec.coord_of(idx))) ok = false;
    if (!ok) continue;
    spec.validate();
    return spec;
  }
  throw std::runtime_error("generate_spec: no valid layout within retry budget");
}

}  // namespace urlab
