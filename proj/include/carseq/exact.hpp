#pragma once

// Exact optimisation over class-per-position assignments: a depth-first
// branch-and-bound, a brute-force enumeration oracle, and the lazy
// window-activation loop built on top of the branch-and-bound.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "carseq/budget.hpp"
#include "carseq/core.hpp"
#include "carseq/solve_result.hpp"

namespace carseq {

/// Part of an instance left open for optimisation. Positions outside
/// `free_positions` keep the class in `fixed`; the free positions receive the
/// multiset `free_counts` (copies per class).
struct Subproblem {
  const Instance* instance = nullptr;
  Sequence fixed;                    // D entries; values at free positions are ignored
  std::vector<int> free_positions;   // strictly increasing
  std::vector<int> free_counts;      // K entries, summing to free_positions.size()
  std::optional<WindowMask> active;  // counted windows; all when absent

  /// Throws InvalidInput when the fields disagree with each other or the instance.
  void validate() const;
};

/// Every position free.
Subproblem whole_problem(const Instance& inst);

/// `positions` freed from `current`; the freed classes form the free multiset.
Subproblem free_positions(const Instance& inst, const Sequence& current, std::vector<int> positions);

/// Objective of a full sequence restricted to the subproblem's active windows.
double subproblem_objective(const Subproblem& sub, const Sequence& seq);

struct ExactResult {
  Sequence best;  // full-length sequence, fixed positions untouched
  double objective = std::numeric_limits<double>::infinity();
  double bound = 0.0;
  bool proven = false;
  std::uint64_t nodes = 0;
  double wall_seconds = 0.0;
  std::vector<TracePoint> trace;  // incumbent improvements
};

/// Enumerates distinct arrangements of the free multiset in lexicographic
/// order. Throws Refusal above `cap` arrangements.
ExactResult brute_force(const Subproblem& sub, std::uint64_t cap = 10'000'000);

/// Number of distinct arrangements of the free multiset, saturating at UINT64_MAX.
std::uint64_t arrangement_count(const std::vector<int>& counts);

struct BnbOptions {
  double time_limit = std::numeric_limits<double>::infinity();
  std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
  /// Stop once (incumbent - bound) / incumbent falls to this value.
  double gap_tolerance = 0.0;
  /// Full sequence agreeing with `fixed` outside the free positions.
  std::optional<Sequence> warm_start;
  ClockMode clock = ClockMode::Work;
};

ExactResult branch_and_bound(const Subproblem& sub, const BnbOptions& options = {});
/// Runs under a child of `parent`, so the caller's allowance also applies.
ExactResult branch_and_bound(const Subproblem& sub, Budget& parent, const BnbOptions& options = {});

struct LazyOptions {
  double time_limit = std::numeric_limits<double>::infinity();
  ClockMode clock = ClockMode::Work;
  /// Rounds of master solves, for inspection in tests.
  int max_rounds = std::numeric_limits<int>::max();
};

struct LazyResult : ExactResult {
  int rounds = 0;
  std::size_t active_windows = 0;
};

/// Master problems count only the activated windows, starting from none; every
/// window the master's solution violates under the full objective is activated
/// before the next round. The objective reported is always a full evaluation.
LazyResult solve_lazy(const Instance& inst, const LazyOptions& options = {});
LazyResult solve_lazy(const Instance& inst, Budget& parent, const LazyOptions& options = {});

/// branch_and_bound on the whole instance as a SolveResult.
SolveResult solve_exact(const Instance& inst, double time_limit, ClockMode clock = ClockMode::Work);
SolveResult solve_lazy_result(const Instance& inst, double time_limit, ClockMode clock = ClockMode::Work);

}  // namespace carseq
