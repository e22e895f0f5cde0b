#pragma once

// Lagrangian relaxation of the one-car-per-position constraint, solved by a
// budgeted branch-and-bound over multi-assignments, with subgradient updates,
// repair to a sequence, and ant colony optimisation (LRACO).

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "carseq/budget.hpp"
#include "carseq/core.hpp"
#include "carseq/rng.hpp"
#include "carseq/solve_result.hpp"

namespace carseq {

/// x[t][i] = 1 when class i occupies position t. Every class keeps its demand,
/// but a position may hold no class or several.
struct RelaxedSolution {
  int num_cars = 0;
  int num_classes = 0;
  std::vector<std::uint8_t> x;  // D x K, position-major
  /// LLR(lambda): the relaxed optimum when certified, otherwise the search's
  /// lower bound on it. A valid dual bound either way.
  double value = 0.0;
  /// Relaxed objective of x itself.
  double found = 0.0;
  bool certified = false;
  std::uint64_t nodes = 0;

  bool at(int t, ClassId i) const { return x[static_cast<std::size_t>(t) * num_classes + i] != 0; }
  int load(int t) const;
};

/// Relaxed objective: window penalties of x plus sum_t lambda_t (sum_i x_it - 1).
double relaxed_objective(const Instance& inst, std::span<const double> lambda, const RelaxedSolution& x);

/// Builds a multi-assignment from a sequence (one class per position).
RelaxedSolution as_relaxed(const Instance& inst, const Sequence& seq);

/// Minimises the relaxed objective by depth-first search over x in
/// position-major order, within `node_budget` nodes.
RelaxedSolution solve_relaxed(const Instance& inst, std::span<const double> lambda,
                              std::uint64_t node_budget = 100'000);
RelaxedSolution solve_relaxed(const Instance& inst, std::span<const double> lambda,
                              std::uint64_t node_budget, Budget& budget);

/// Moves excess classes to empty positions: the lowest position holding two or
/// more classes gives up its highest class index to the nearest empty
/// position (the left one on ties), until every position holds one class.
Sequence repair(const Instance& inst, const RelaxedSolution& x);

struct LagrangianState {
  std::vector<double> lambda;
  double gamma = 2.0;
  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  int iteration = 0;
  double gap = std::numeric_limits<double>::infinity();
  int stall = 0;  // iterations since best_lower last improved enough
};

/// lambda_t += gamma (UB* - llr) / ||x|| (sum_i x_it - 1), where
/// ||x|| = sum_t (sum_i x_it - 1)^2. Does nothing when ||x|| = 0.
void update_multipliers(LagrangianState& state, const RelaxedSolution& x, double llr);

struct AcoParams {
  double evaporation = 0.1;  // rho
  double tau_min = 0.01;
  double tau_init = 1.0;
  int ants = 10;
  /// Added to each (position, class) pair of the best sequence before the final run.
  double bias_deposit = 1.0;
};

/// tau[t][i], position-major.
struct Pheromone {
  int num_cars = 0;
  int num_classes = 0;
  std::vector<double> tau;

  Pheromone() = default;
  Pheromone(int cars, int classes, double init)
      : num_cars(cars), num_classes(classes), tau(static_cast<std::size_t>(cars) * classes, init) {}
  double& at(int t, ClassId i) { return tau[static_cast<std::size_t>(t) * num_classes + i]; }
  double at(int t, ClassId i) const { return tau[static_cast<std::size_t>(t) * num_classes + i]; }
};

/// Ants build sequences position by position, choosing among classes with
/// cars left in proportion to tau. After each iteration tau evaporates and
/// the iteration best and overall best deposit 1 / (1 + objective). Returns
/// the best sequence seen, never worse than `seed`. Stops early at objective 0.
Sequence aco_improve(const Instance& inst, Pheromone& tau, const Sequence& seed, int iterations, Rng& rng,
                     const AcoParams& params = {});
Sequence aco_improve(const Instance& inst, Pheromone& tau, const Sequence& seed, int iterations, Rng& rng,
                     const AcoParams& params, Budget& budget);

struct LracoConfig {
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  ClockMode clock = ClockMode::Work;
  std::uint64_t node_budget = 100'000;  // per relaxed solve
  double gamma_init = 2.0;
  double gamma_floor = 0.01;
  int stall_iterations = 20;
  double improve_threshold = 1e-4;  // relative rise of LB* that counts as progress
  double gap_target = 0.01;
  int max_iterations = 1000;
  /// Share of the time limit reserved for the final ACO run.
  double final_share = 0.2;
  /// The final ACO run also stops at the time limit; by default it uses all remaining time.
  int final_iterations = std::numeric_limits<int>::max();
  AcoParams aco;
};

SolveResult lraco(const Instance& inst, const LracoConfig& cfg = {});

}  // namespace carseq
