#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "carseq/core.hpp"

namespace carseq {

/// The fourteen static instance features.
struct FeatureVector {
  double num_cars = 0;
  double num_options = 0;
  double num_classes = 0;
  double usage_min = 0;
  double usage_ave = 0;
  double usage_max = 0;
  double usage_std = 0;
  double ave_ops = 0;  // mean over classes of (options in class) / O
  double pq_min = 0;
  double pq_ave = 0;
  double pq_max = 0;
  double pq_std = 0;
  std::uint64_t lcm_q = 1;
  double classpop_std = 0;

  static constexpr std::size_t kCount = 14;

  /// Feature values in column order (see feature_names()).
  std::array<double, kCount> values() const;
  static FeatureVector from_values(const std::array<double, kCount>& v);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Column names in the order of FeatureVector::values().
const std::array<std::string_view, FeatureVector::kCount>& feature_names();

/// Minimum sequence length that can host `cars` option cars under a p/q rule:
/// q * ((cars - 1) div p) + ((cars - 1) mod p) + 1, and 0 for no cars.
std::int64_t min_accommodating_length(int capacity, int window, std::int64_t cars);

/// Cars of all classes that need `option`.
std::int64_t option_demand(const Instance& inst, int option);

/// min_accommodating_length(p, q, T) / D for the option's demand T.
double option_utilisation(const Instance& inst, int option);

FeatureVector extract_features(const Instance& inst);

}  // namespace carseq
