#pragma once

#include <chrono>
#include <cstdint>
#include <limits>

namespace carseq {

/// How solver time limits are measured.
///
/// Work mode counts deterministic work units (search nodes, window
/// evaluations, ant steps) and converts them to seconds at a fixed rate, so a
/// run with the same seed and limit does the same work on every machine and
/// under any load. Wall mode uses the steady clock. In work mode a safety cap
/// on the thread's CPU time (3x the limit plus 1 s) still applies; if it fires
/// the run is no longer reproducible.
enum class ClockMode { Work, Wall };

/// Cooperative cancellation token with a time allowance.
///
/// Budgets nest: charging a child also charges every ancestor, and a child
/// expires as soon as any ancestor does.
class Budget {
 public:
  /// Work units per effort-second. Calibrated so one effort-second is roughly
  /// one wall-second of single-threaded search on a current desktop core.
  static constexpr double kWorkUnitsPerSecond = 1.5e9;

  explicit Budget(double seconds = std::numeric_limits<double>::infinity(),
                  ClockMode mode = ClockMode::Work);

  /// Child budget limited to `seconds` (or what remains of the parent, whichever is less).
  Budget(double seconds, Budget& parent);

  Budget(const Budget&) = delete;
  Budget& operator=(const Budget&) = delete;

  void charge(std::uint64_t units) noexcept {
    for (Budget* b = this; b != nullptr; b = b->parent_) b->used_ += units;
  }

  bool expired() noexcept;

  ClockMode mode() const noexcept { return mode_; }
  double elapsed_seconds() const noexcept;
  double limit_seconds() const noexcept { return seconds_; }
  double remaining_seconds() const noexcept;
  std::uint64_t work_used() const noexcept { return used_; }

  /// True if the CPU-time safety cap (work mode) ended the run.
  bool hit_safety_cap() const noexcept { return hit_safety_cap_; }

 private:
  double seconds_;
  ClockMode mode_;
  Budget* parent_ = nullptr;
  std::uint64_t used_ = 0;
  std::uint64_t work_limit_ = std::numeric_limits<std::uint64_t>::max();
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point deadline_;
  bool has_deadline_ = false;
  double cpu_start_ = 0.0;
  double cpu_cap_ = std::numeric_limits<double>::infinity();
  bool hit_safety_cap_ = false;
};

}  // namespace carseq
