// Finite-support distribution over percepts.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "urlab/core.hpp"
#include "urlab/random.hpp"

namespace urlab {

class PerceptDistribution {
 public:
  using Entry = std::pair<Percept, double>;

  void add(const Percept& e, double p) {
    if (p < 0.0) throw std::domain_error("PerceptDistribution: negative probability");
    if (p == 0.0) return;
    for (Entry& entry : support_)
      if (entry.first == e) {
        entry.second += p;
        return;
      }
    support_.emplace_back(e, p);
  }

  const std::vector<Entry>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  auto begin() const { return support_.begin(); }
  auto end() const { return support_.end(); }

  double probability_of(const Percept& e) const {
    for (const Entry& entry : support_)
      if (entry.first == e) return entry.second;
    return 0.0;
  }

  double total_mass() const {
    double total = 0.0;
    for (const Entry& entry : support_) total += entry.second;
    return total;
  }

  // Sorts the support into a canonical order so downstream enumeration is
  // deterministic regardless of construction order.
  void canonicalize() {
    std::sort(support_.begin(), support_.end(), [](const Entry& a, const Entry& b) {
      if (a.first.observation != b.first.observation) return a.first.observation < b.first.observation;
      return a.first.reward < b.first.reward;
    });
  }

  Percept sample(RandomSource& rng) const {
    if (support_.empty()) throw std::logic_error("PerceptDistribution: empty support");
    double u = rng.uniform() * total_mass();
    for (const Entry& entry : support_) {
      u -= entry.second;
      if (u < 0.0) return entry.first;
    }
    return support_.back().first;
  }

 private:
  std::vector<Entry> support_;
};

}  // namespace urlab
