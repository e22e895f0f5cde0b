#include "carseq/budget.hpp"

#include <time.h>

#include <algorithm>
#include <cmath>

namespace carseq {

namespace {

constexpr double kCapFactor = 3.0;
constexpr double kCapSlack = 1.0;

// CPU time of the calling thread; unlike the wall clock it does not run on
// while other runs hold the core.
double thread_cpu_seconds() noexcept {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

std::uint64_t to_work(double seconds) {
  const double units = seconds * Budget::kWorkUnitsPerSecond;
  if (!std::isfinite(units) || units >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::max(0.0, units));
}

}  // namespace

Budget::Budget(double seconds, ClockMode mode)
    : seconds_(std::max(0.0, seconds)), mode_(mode), start_(std::chrono::steady_clock::now()) {
  if (mode_ == ClockMode::Work) {
    work_limit_ = to_work(seconds_);
    cpu_cap_ = seconds_ * kCapFactor + kCapSlack;
    if (std::isfinite(cpu_cap_)) cpu_start_ = thread_cpu_seconds();
  } else if (std::isfinite(seconds_)) {
    has_deadline_ = true;
    deadline_ = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(seconds_));
  }
}

Budget::Budget(double seconds, Budget& parent)
    : Budget(std::min(std::max(0.0, seconds), parent.remaining_seconds()), parent.mode_) {
  parent_ = &parent;
}

bool Budget::expired() noexcept {
  if (used_ >= work_limit_) return true;
  if (has_deadline_ && std::chrono::steady_clock::now() >= deadline_) return true;
  if (std::isfinite(cpu_cap_) && thread_cpu_seconds() - cpu_start_ >= cpu_cap_) {
    hit_safety_cap_ = true;
    return true;
  }
  return parent_ != nullptr && parent_->expired();
}

double Budget::elapsed_seconds() const noexcept {
  if (mode_ == ClockMode::Work) return static_cast<double>(used_) / kWorkUnitsPerSecond;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

double Budget::remaining_seconds() const noexcept {
  return std::max(0.0, seconds_ - elapsed_seconds());
}

}  // namespace carseq
