#pragma once

// Timed, seeded runs of the six algorithms over instance sets, gaps against
// the best certified bounds, and pairwise labels for algorithm selection.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carseq/algoselect.hpp"
#include "carseq/budget.hpp"
#include "carseq/core.hpp"
#include "carseq/formats.hpp"
#include "carseq/solve_result.hpp"

namespace carseq {

/// Best certified lower bound per instance, with the run that supplied it.
class BoundLedger {
 public:
  struct Entry {
    double bound = 0.0;
    Algorithm algorithm = Algorithm::Exact;
    std::string run_id;
  };

  /// Ignores uncertified bounds and bounds not above the current entry.
  /// Returns true when the entry changed.
  bool offer(const std::string& instance, double bound, bool certified, Algorithm algorithm, std::string run_id);

  std::optional<Entry> entry(const std::string& instance) const;
  /// The recorded bound, or 0 when none was offered.
  double bound(const std::string& instance) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Entry> entries_;
};

/// Runs one algorithm with its default configuration.
SolveResult run_algorithm(const Instance& inst, Algorithm alg, double time_limit, std::uint64_t seed,
                          ClockMode clock = ClockMode::Work);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  double time_limit = 60.0;
  int seeds = 1;  // runs per (instance, algorithm)
  std::uint64_t base_seed = 0;
  ClockMode clock = ClockMode::Work;
  int jobs = 1;
  std::string config_digest;
};

/// Seed for run `index` of (instance, algorithm), derived from the base seed.
std::uint64_t run_seed(std::uint64_t base_seed, const std::string& instance, Algorithm alg, int index);

std::string run_id(const std::string& instance, Algorithm alg, std::uint64_t seed);

/// One record per (instance, algorithm, seed) in canonical order: instance
/// name, then algorithm order, then seed index. A run that throws becomes a
/// failed record. Gaps are computed against `ledger` after all runs; pass one
/// in to carry bounds across experiments.
std::vector<ResultRecord> run_experiment(const std::vector<Instance>& instances, const ExperimentConfig& cfg,
                                         BoundLedger* ledger = nullptr);

/// Recomputes every gap against the ledger built from the records themselves.
void apply_ledger(std::vector<ResultRecord>& records, BoundLedger& ledger);

inline constexpr double kTieTolerance = 0.005;

/// Label for gaps (a, b): Tie when |a - b| < tolerance, otherwise the smaller gap wins.
Label compare_gaps(double gap_a, double gap_b, double tolerance = kTieTolerance);

struct PairLabel {
  std::string instance_name;
  double gap_a = 0.0;  // mean over successful runs
  double gap_b = 0.0;
  Label label = Label::Tie;
};

/// Per instance with both algorithms present; others are skipped and named in `warnings`.
std::vector<PairLabel> label_pairs(const std::vector<ResultRecord>& records, Algorithm a, Algorithm b,
                                   double tolerance = kTieTolerance, std::vector<std::string>* warnings = nullptr);

}  // namespace carseq
