// Foundational types: actions, percepts, histories, geometric discounting,
// utility functions, and the information-theoretic helpers shared by
// environment models and agents.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace urlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised when a model is asked to condition on a percept it assigns zero
// probability; signals model misspecification to the caller.
struct impossible_percept_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Actions and percepts

struct Action {
  std::uint8_t index = 0;
  friend constexpr bool operator==(Action, Action) = default;
};

// An (observation, reward) pair. Observations are fixed-width bit vectors,
// stored LSB-first; the width is declared by the environment (4 for plain
// gridworlds, wider when a noise tile uses a larger alphabet).
struct Percept {
  std::uint32_t observation = 0;
  std::uint8_t observation_width = 0;
  double reward = 0.0;
  friend constexpr bool operator==(const Percept&, const Percept&) = default;
};

struct PerceptHash {
  std::size_t operator()(const Percept& e) const {
    std::uint64_t h = (static_cast<std::uint64_t>(e.observation) << 8) ^ e.observation_width;
    std::uint64_t r;
    static_assert(sizeof(r) == sizeof(e.reward));
    std::memcpy(&r, &e.reward, sizeof(r));
    h ^= r + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct TimeStep {
  Action action;
  Percept percept;
};

// Append-only record of completed interaction cycles.
class History {
 public:
  void append(Action a, const Percept& e) { steps_.push_back({a, e}); }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const TimeStep& at(std::size_t t) const { return steps_.at(t); }
  const TimeStep& back() const { return steps_.back(); }
  auto begin() const { return steps_.begin(); }
  auto end() const { return steps_.end(); }

 private:
  std::vector<TimeStep> steps_;
};

// ---------------------------------------------------------------------------
// Discounting

struct GeometricDiscount {
  double gamma = 0.99;
};

// Sum of the first m discount factors, sum_{k<m} gamma^k.
inline double discounted_horizon_mass(GeometricDiscount d, int m) {
  if (m <= 0) return 0.0;
  if (d.gamma == 1.0) return static_cast<double>(m);
  return (1.0 - std::pow(d.gamma, m)) / (1.0 - d.gamma);
}

// Smallest H with gamma^H <= eps: the horizon capturing a (1 - eps)
// fraction of realizable discounted return. Closed form ceil(ln eps/ln gamma)
// with a boundary adjustment so the minimality condition holds exactly.
inline int effective_horizon(GeometricDiscount d, double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("effective_horizon: eps must be in (0, 1]");
  if (!(d.gamma > 0.0) || d.gamma >= 1.0) throw std::domain_error("effective_horizon: gamma must be in (0, 1)");
  if (eps == 1.0) return 0;
  int h = static_cast<int>(std::ceil(std::log(eps) / std::log(d.gamma)));
  h = std::max(h, 0);
  while (std::pow(d.gamma, h) > eps) ++h;
  while (h > 0 && std::pow(d.gamma, h - 1) <= eps) --h;
  return h;
}

inline double discounted_return(std::span<const double> rewards, GeometricDiscount d) {
  double sum = 0.0;
  double w = 1.0;
  for (double r : rewards) {
    sum += w * r;
    w *= d.gamma;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Discrete distributions

namespace detail {

// Validates non-negativity and near-unit mass, returns the normalizing total.
// Mass deviating from 1 by more than 1e-6 is an error; smaller deviations
// are renormalized by the caller dividing through.
inline double checked_mass(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::domain_error(std::string(what) + ": negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::domain_error(std::string(what) + ": mass deviates from 1 beyond tolerance");
  return total;
}

}  // namespace detail

// Shannon entropy in nats, with 0 ln 0 := 0.
inline double entropy(std::span<const double> p) {
  const double total = detail::checked_mass(p, "entropy");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) {
      const double q = v / total;
      h -= q * std::log(q);
    }
  }
  return std::max(h, 0.0);
}

// KL divergence KL(p || q) in nats. Returns +infinity when q gives zero mass
// to an outcome p supports (absolute-continuity violation).
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: support size mismatch");
  const double tp = detail::checked_mass(p, "kl_divergence");
  const double tq = detail::checked_mass(q, "kl_divergence");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i] / tp;
    if (pi == 0.0) continue;
    const double qi = q[i] / tq;
    if (qi == 0.0) return kInfinity;
    kl += pi * std::log(pi / qi);
  }
  return std::max(kl, 0.0);
}

// ---------------------------------------------------------------------------
// Utility functions

enum class UtilityKind { ExtrinsicReward, Square, Shannon, KlInformationGain };

struct RewardBounds {
  double min = 0.0;
  double max = 1.0;
};

// A per-cycle utility u(ae_{1:t}) with declared bounds [alpha, beta]. The
// caller supplies whatever inputs the kind needs (the model's predictive
// probability of the realized percept, the information gain of the update);
// every emitted value is clamped into [alpha, beta].
class UtilityFunction {
 public:
  static UtilityFunction extrinsic(RewardBounds env_bounds) {
    return UtilityFunction(UtilityKind::ExtrinsicReward, env_bounds.min, env_bounds.max);
  }
  static UtilityFunction square() { return UtilityFunction(UtilityKind::Square, -1.0, 0.0); }
  static UtilityFunction shannon(double beta_cap) {
    return UtilityFunction(UtilityKind::Shannon, 0.0, beta_cap);
  }
  static UtilityFunction kl_information_gain(double alpha, double beta) {
    return UtilityFunction(UtilityKind::KlInformationGain, alpha, beta);
  }

  UtilityKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  bool needs_predictive_probability() const {
    return kind_ == UtilityKind::Square || kind_ == UtilityKind::Shannon;
  }
  bool needs_information_gain() const { return kind_ == UtilityKind::KlInformationGain; }

  double evaluate(const Percept& e, double predictive_probability, double information_gain) const {
    double u = 0.0;
    switch (kind_) {
      case UtilityKind::ExtrinsicReward:
        u = e.reward;
        break;
      case UtilityKind::Square:
        u = -predictive_probability;
        break;
      case UtilityKind::Shannon:
        // xi(e) = 0 has no finite -ln; clamp straight to the cap.
        u = predictive_probability <= 0.0 ? beta_ : -std::log(predictive_probability);
        break;
      case UtilityKind::KlInformationGain:
        u = information_gain;
        break;
    }
    return std::clamp(u, alpha_, beta_);
  }

 private:
  UtilityFunction(UtilityKind kind, double alpha, double beta) : kind_(kind), alpha_(alpha), beta_(beta) {
    if (!(beta > alpha)) throw std::invalid_argument("UtilityFunction: beta must exceed alpha");
  }

  UtilityKind kind_;
  double alpha_;
  double beta_;
};

// ---------------------------------------------------------------------------
// History probability (Eq.-1 style telescoping product; test oracle)

struct UniformRandomPolicy {
  int num_actions = 1;
  double action_probability(const History&, Action) const { return 1.0 / num_actions; }
};

// Probability the (policy, model) pair assigns to a full history:
// prod_k pi(a_k | ae_<k) nu(e_k | ae_<k a_k). The model is replayed through
// a checkpoint so its state is restored on exit.
template <typename Policy, typename Model>
double history_probability(const Policy& policy, Model& model, const History& history) {
  const auto token = model.checkpoint();
  History prefix;
  double prob = 1.0;
  for (const TimeStep& step : history) {
    prob *= policy.action_probability(prefix, step.action);
    prob *= model.conditional_probability(step.action, step.percept);
    if (prob == 0.0) break;
    model.update(step.action, step.percept);
    prefix.append(step.action, step.percept);
  }
  model.rollback(token);
  return prob;
}

}  // namespace urlab
