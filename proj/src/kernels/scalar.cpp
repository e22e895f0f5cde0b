#include <algorithm>

#include "carseq/kernels.hpp"

namespace carseq::kernels::scalar {

PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count) {
  PenaltySums sums;
  for (int t = t_begin; t < t_end; ++t) {
    const int start = std::max(0, t - window + 1);
    const std::int32_t usage = prefix[t + 1] - prefix[start];
    const std::int32_t over = std::max(0, usage - capacity);
    const std::int32_t under = std::max(0, capacity - usage);
    over_count[t] = over;
    under_count[t] = under;
    sums.over += over_weight[t] * over;
    sums.under += under_weight[t] * under;
  }
  return sums;
}

void evaporate(std::span<double> tau, double keep, double floor) {
  for (double& v : tau) v = std::max(floor, v * keep);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace carseq::kernels::scalar
