#include "carseq/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace carseq {

namespace {

struct Stats {
  double min = 0, mean = 0, max = 0, std = 0;
};

// Population statistics (divide by n).
Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

}  // namespace

std::array<double, FeatureVector::kCount> FeatureVector::values() const {
  return {num_cars, num_options, num_classes, usage_min, usage_ave, usage_max, usage_std,
          ave_ops,  pq_min,      pq_ave,      pq_max,    pq_std,    static_cast<double>(lcm_q),
          classpop_std};
}

FeatureVector FeatureVector::from_values(const std::array<double, kCount>& v) {
  FeatureVector f;
  f.num_cars = v[0];
  f.num_options = v[1];
  f.num_classes = v[2];
  f.usage_min = v[3];
  f.usage_ave = v[4];
  f.usage_max = v[5];
  f.usage_std = v[6];
  f.ave_ops = v[7];
  f.pq_min = v[8];
  f.pq_ave = v[9];
  f.pq_max = v[10];
  f.pq_std = v[11];
  f.lcm_q = static_cast<std::uint64_t>(std::llround(v[12]));
  f.classpop_std = v[13];
  return f;
}

const std::array<std::string_view, FeatureVector::kCount>& feature_names() {
  static const std::array<std::string_view, FeatureVector::kCount> names = {
      "num_cars", "num_options", "num_classes", "usage_min", "usage_ave",
      "usage_max", "usage_std", "ave_ops", "pq_min", "pq_ave",
      "pq_max", "pq_std", "lcm_q", "classpop_std"};
  return names;
}

std::int64_t min_accommodating_length(int capacity, int window, std::int64_t cars) {
  if (cars <= 0) return 0;
  return static_cast<std::int64_t>(window) * ((cars - 1) / capacity) + ((cars - 1) % capacity) + 1;
}

std::int64_t option_demand(const Instance& inst, int option) {
  std::int64_t total = 0;
  for (ClassId i = 0; i < inst.num_classes; ++i) {
    if (inst.needs(i, option)) total += inst.demand[static_cast<std::size_t>(i)];
  }
  return total;
}

double option_utilisation(const Instance& inst, int option) {
  const auto j = static_cast<std::size_t>(option);
  const auto mu = min_accommodating_length(inst.capacity[j], inst.window[j], option_demand(inst, option));
  return static_cast<double>(mu) / static_cast<double>(inst.num_cars);
}

FeatureVector extract_features(const Instance& inst) {
  FeatureVector f;
  f.num_cars = inst.num_cars;
  f.num_options = inst.num_options;
  f.num_classes = inst.num_classes;

  std::vector<double> usage;
  std::vector<double> pq;
  std::uint64_t lcm = 1;
  for (int j = 0; j < inst.num_options; ++j) {
    usage.push_back(option_utilisation(inst, j));
    const auto idx = static_cast<std::size_t>(j);
    pq.push_back(static_cast<double>(inst.capacity[idx]) / inst.window[idx]);
    lcm = std::lcm(lcm, static_cast<std::uint64_t>(inst.window[idx]));
  }
  const Stats u = stats(usage);
  f.usage_min = u.min;
  f.usage_ave = u.mean;
  f.usage_max = u.max;
  f.usage_std = u.std;
  const Stats r = stats(pq);
  f.pq_min = r.min;
  f.pq_ave = r.mean;
  f.pq_max = r.max;
  f.pq_std = r.std;
  f.lcm_q = lcm;

  double ops = 0.0;
  std::vector<double> pops;
  for (ClassId i = 0; i < inst.num_classes; ++i) {
    ops += static_cast<double>(inst.options_of(i)) / inst.num_options;
    pops.push_back(inst.demand[static_cast<std::size_t>(i)]);
  }
  f.ave_ops = ops / inst.num_classes;
  f.classpop_std = stats(pops).std;
  return f;
}

}  // namespace carseq
