#pragma once

// Large neighbourhood search over windows of positions, each re-optimised
// exactly by branch-and-bound with the rest of the sequence held fixed.

#include <cstdint>
#include <limits>
#include <optional>

#include "carseq/budget.hpp"
#include "carseq/core.hpp"
#include "carseq/rng.hpp"
#include "carseq/solve_result.hpp"

namespace carseq {

enum class InitMode {
  Classic,   // relaxed solve at zero multipliers, repair, short ACO polish
  Adaptive,  // budgeted branch-and-bound incumbent
};

struct InitialSolution {
  Sequence sequence;
  double bound = 0.0;      // valid lower bound on the optimum
  bool certified = false;  // bound came from a proof rather than the default 0
};

InitialSolution initial_sequence(const Instance& inst, InitMode mode, Budget& budget, Rng& rng);

struct LnsConfig {
  /// Free positions per window; 0 selects the adaptive variant.
  int window = 10;
  /// Positions the window start advances by; 0 means max(1, window / 2).
  int shift = 0;
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  ClockMode clock = ClockMode::Work;
  double sub_gap = 0.005;
  std::uint64_t sub_nodes = 50'000;
  int adaptive_start = 30;
  int adaptive_increment = 1;
  double improvement_threshold = 0.005;
  /// Share of the time limit given to the initial sequence.
  double init_share = 0.1;
  int max_passes = std::numeric_limits<int>::max();
  /// Starting sequence; skips the initialiser when set.
  std::optional<Sequence> start;
};

/// Window size for the LCM variant: min(lcm of the q values, D, cap).
int lcm_window(const Instance& inst, int cap = 40);

/// Adaptive growth rule: w + increment (at most D) when the gap improved by
/// less than the threshold, otherwise w.
int next_window_size(int w, double gap_improvement, const LnsConfig& cfg, int num_cars);

/// Passes of consecutive windows starting at 0, shift, 2 shift, ... (truncated at D).
SolveResult lns(const Instance& inst, const LnsConfig& cfg);

/// Each iteration draws a fresh permutation and frees its consecutive chunks,
/// advancing by max(1, w / 2); w grows when the gap stalls.
SolveResult adaptive_lns(const Instance& inst, const LnsConfig& cfg);

SolveResult solve_lns10(const Instance& inst, double time_limit, std::uint64_t seed,
                        ClockMode clock = ClockMode::Work);
SolveResult solve_lns_lcm(const Instance& inst, double time_limit, std::uint64_t seed,
                          ClockMode clock = ClockMode::Work);
SolveResult solve_adaptive(const Instance& inst, double time_limit, std::uint64_t seed,
                           ClockMode clock = ClockMode::Work);

}  // namespace carseq
