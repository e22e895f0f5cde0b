#include <cstdlib>
#include <string_view>

#include "carseq/kernels.hpp"

namespace carseq::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("CARSEQ_SIMD")) {
    if (std::string_view(env) == "scalar") return Isa::Scalar;
  }
  return avx2::available() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count) {
  if (active_isa() == Isa::Avx2) {
    return avx2::window_penalties(prefix, capacity, window, t_begin, t_end, over_weight,
                                  under_weight, over_count, under_count);
  }
  return scalar::window_penalties(prefix, capacity, window, t_begin, t_end, over_weight,
                                  under_weight, over_count, under_count);
}

void evaporate(std::span<double> tau, double keep, double floor) {
  if (active_isa() == Isa::Avx2) return avx2::evaporate(tau, keep, floor);
  scalar::evaporate(tau, keep, floor);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (active_isa() == Isa::Avx2) return avx2::squared_distance(a, b);
  return scalar::squared_distance(a, b);
}

}  // namespace carseq::kernels
