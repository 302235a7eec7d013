// Exact finite-horizon expectimax over an environment model: alternating
// max over actions and expectation over the model's percept support,
// enumerated through checkpoints. Exponential in the horizon; intended as a
// planning oracle for small instances.
#pragma once

#include <stdexcept>
#include <vector>

#include "urlab/core.hpp"
#include "urlab/model.hpp"

namespace urlab {

namespace detail {

class ExpectimaxEvaluator {
 public:
  ExpectimaxEvaluator(EnvironmentModel& model, const UtilityFunction& utility,
                      GeometricDiscount discount, int horizon, std::size_t support_cap)
      : model_(model), utility_(utility), discount_(discount), horizon_(horizon),
        support_cap_(support_cap) {}

  double q_value(Action a, int depth) {
    const PerceptDistribution dist = model_.percept_distribution(a);
    if (dist.size() > support_cap_)
      throw std::runtime_error("expectimax_exact: percept support exceeds cap");
    double q = 0.0;
    for (const auto& [e, p] : dist.support()) {
      const Checkpoint token = model_.checkpoint();
      model_.update(a, e);
      const double ig = utility_.needs_information_gain() ? model_.info_gain_of_last_update() : 0.0;
      const double u = utility_.evaluate(e, p, ig);
      q += p * (u + discount_.gamma * best_value(depth + 1));
      model_.rollback(token);
    }
    return q;
  }

 private:
  double best_value(int depth) {
    if (depth == horizon_) return 0.0;
    double best = -kInfinity;
    for (int a = 0; a < model_.num_actions(); ++a)
      best = std::max(best, q_value(Action{static_cast<std::uint8_t>(a)}, depth));
    return best;
  }

  EnvironmentModel& model_;
  const UtilityFunction& utility_;
  GeometricDiscount discount_;
  int horizon_;
  std::size_t support_cap_;
};

}  // namespace detail

// Exact per-action values of the truncated expectimax expression. The model
// is restored to its entry state on return.
inline std::vector<double> expectimax_exact(EnvironmentModel& model, int horizon,
                                            const UtilityFunction& utility,
                                            GeometricDiscount discount,
                                            std::size_t support_cap = 64) {
  if (horizon < 0) throw std::invalid_argument("expectimax_exact: negative horizon");
  std::vector<double> values(model.num_actions(), 0.0);
  if (horizon == 0) return values;
  detail::ExpectimaxEvaluator eval(model, utility, discount, horizon, support_cap);
  for (int a = 0; a < model.num_actions(); ++a)
    values[a] = eval.q_value(Action{static_cast<std::uint8_t>(a)}, 0);
  return values;
}

}  // namespace urlab
