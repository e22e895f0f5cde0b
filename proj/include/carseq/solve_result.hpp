#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carseq/core.hpp"

namespace carseq {

enum class Algorithm { Exact, Lazy, Lraco, Lns10, LnsLcm, Adaptive };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Exact, Algorithm::Lazy,
                                               Algorithm::Lraco, Algorithm::Lns10,
                                               Algorithm::LnsLcm, Algorithm::Adaptive};

/// Canonical upper-case name ("EXACT", "LAZY", ...).
std::string_view algorithm_name(Algorithm alg);

/// Accepts canonical names plus the aliases MIP, LR-ACO, 10-LNS, LCM-LNS,
/// ADAPTIVE-LNS (case-insensitive).
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct TracePoint {
  double seconds = 0.0;
  double objective = 0.0;
  double bound = 0.0;
};

struct SolveResult {
  Algorithm algorithm = Algorithm::Exact;
  Sequence best;
  double objective = 0.0;
  double lower_bound = 0.0;
  bool bound_certified = false;
  double gap = 0.0;
  double seconds = 0.0;
  /// Accepted-objective trace; objectives are non-increasing.
  std::vector<TracePoint> trace;
  /// Adaptive LNS only: window size used in each iteration.
  std::vector<int> window_sizes;
};

}  // namespace carseq
