#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and an AVX2 variant; the dispatching entry points pick one
// at runtime. Setting CARSEQ_SIMD=scalar forces the reference path.

#include <cstdint>
#include <span>
#include <string_view>

namespace carseq::kernels {

struct PenaltySums {
  double over = 0.0;
  double under = 0.0;
};

/// Sliding-window over/under counts for one option.
///
/// `prefix` has D+1 entries, prefix[t] = number of option cars in positions
/// [0, t). For every window end t in [t_begin, t_end) the window covers
/// [max(0, t - window + 1), t]; writes over_count[t] = max(0, usage - capacity)
/// and under_count[t] = max(0, capacity - usage) and returns the weighted sums.
PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count);

/// tau[i] = max(floor, tau[i] * keep).
void evaporate(std::span<double> tau, double keep, double floor);

double squared_distance(std::span<const double> a, std::span<const double> b);

enum class Isa { Scalar, Avx2 };

/// The variant the dispatching entry points use in this process.
Isa active_isa();
std::string_view isa_name(Isa isa);

namespace scalar {
PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count);
void evaporate(std::span<double> tau, double keep, double floor);
double squared_distance(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

namespace avx2 {
/// True when the CPU supports AVX2 and FMA and the variant was compiled in.
bool available();
PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count);
void evaporate(std::span<double> tau, double keep, double floor);
double squared_distance(std::span<const double> a, std::span<const double> b);
}  // namespace avx2

}  // namespace carseq::kernels
