#pragma once

// Shared helpers for the test binaries: small random instances and a direct
// window-counting objective that shares no code with the library evaluator.

#include <algorithm>
#include <vector>

#include "carseq/core.hpp"
#include "carseq/rng.hpp"

namespace carseq::testing {

struct SmallShape {
  int max_cars = 9;
  int max_classes = 4;
  int max_options = 3;
};

/// Random valid instance with distinct nonzero class vectors where possible.
inline Instance random_instance(Rng& rng, SmallShape shape = {}, bool random_weights = false) {
  for (;;) {
    const int O = rng.between(1, shape.max_options);
    const int K = rng.between(1, std::min(shape.max_classes, (1 << O)));
    const int D = rng.between(std::max(2, K), shape.max_cars);
    std::vector<std::vector<int>> rows;
    int guard = 0;
    while (static_cast<int>(rows.size()) < K && guard++ < 200) {
      std::vector<int> row(static_cast<std::size_t>(O));
      for (int& b : row) b = rng.bernoulli(0.5) ? 1 : 0;
      if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    }
    if (static_cast<int>(rows.size()) < K) continue;
    // Spread D cars over K classes, each class at least one car.
    std::vector<int> demand(static_cast<std::size_t>(K), 1);
    for (int c = K; c < D; ++c) ++demand[rng.below(static_cast<std::uint64_t>(K))];
    std::vector<int> p(static_cast<std::size_t>(O)), q(static_cast<std::size_t>(O));
    for (int j = 0; j < O; ++j) {
      q[static_cast<std::size_t>(j)] = rng.between(1, std::min(D, 5));
      p[static_cast<std::size_t>(j)] = rng.between(1, q[static_cast<std::size_t>(j)]);
    }
    Instance inst = make_instance("random", demand, rows, p, q);
    if (random_weights) {
      for (double& a : inst.over_weight) a = static_cast<double>(rng.between(0, 3));
      for (double& b : inst.under_weight) b = static_cast<double>(rng.between(0, 2));
    }
    return inst;
  }
}

inline Sequence random_sequence(const Instance& inst, Rng& rng) {
  Sequence s = sorted_sequence(inst);
  rng.shuffle(s.classes.begin(), s.classes.end());
  return s;
}

/// Objective by counting each window's cars one position at a time.
inline double direct_objective(const Instance& inst, const Sequence& seq) {
  double total = 0.0;
  for (int j = 0; j < inst.num_options; ++j) {
    const int p = inst.capacity[static_cast<std::size_t>(j)];
    const int q = inst.window[static_cast<std::size_t>(j)];
    for (int t = p - 1; t < inst.num_cars; ++t) {
      int usage = 0;
      for (int s = std::max(0, t - q + 1); s <= t; ++s) {
        if (inst.needs(seq[static_cast<std::size_t>(s)], j)) ++usage;
      }
      if (usage > p) total += inst.over(j, t) * (usage - p);
      if (usage < p) total += inst.under(j, t) * (p - usage);
    }
  }
  return total;
}

/// The 4-car instance: one option with p = 1, q = 2, classes A (needs it) and B, two cars each.
inline Instance e4() { return make_instance("E4", {2, 2}, {{1}, {0}}, {1}, {2}); }

}  // namespace carseq::testing
