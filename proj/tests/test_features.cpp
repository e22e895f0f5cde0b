#include "doctest.h"

#include <cmath>
#include <numeric>

#include "carseq/features.hpp"
#include "support.hpp"

using namespace carseq;
using carseq::testing::random_instance;

namespace {

// Lays option cars out greedily, each at the earliest position the p/q rule
// allows, and returns the index of the last one plus one.
std::int64_t literal_min_length(int p, int q, int cars) {
  if (cars == 0) return 0;
  std::vector<int> placed;
  int t = 0;
  while (static_cast<int>(placed.size()) < cars) {
    int in_window = 0;
    for (int s : placed) {
      if (s > t - q) ++in_window;
    }
    if (in_window < p) placed.push_back(t);
    ++t;
  }
  return placed.back() + 1;
}

}  // namespace

TEST_CASE("minimum accommodating length matches a literal layout") {
  for (int q = 1; q <= 8; ++q) {
    for (int p = 1; p <= q; ++p) {
      for (int t = 0; t <= 40; ++t) {
        INFO("p=" << p << " q=" << q << " t=" << t);
        REQUIRE(min_accommodating_length(p, q, t) == literal_min_length(p, q, t));
      }
    }
  }
}

TEST_CASE("utilisation divides by the number of cars") {
  // Option 0 is needed by 3 of 10 cars under 1/2: length 2*2+0+1 = 5.
  const Instance inst = make_instance("u", {3, 7}, {{1}, {0}}, {1}, {2});
  CHECK(option_demand(inst, 0) == 3);
  CHECK(option_utilisation(inst, 0) == doctest::Approx(0.5));
}

TEST_CASE("features of a small instance by hand") {
  const Instance inst = make_instance("h", {2, 1, 3}, {{1, 0}, {1, 1}, {0, 0}}, {1, 2}, {2, 3});
  const FeatureVector f = extract_features(inst);
  CHECK(f.num_cars == 6);
  CHECK(f.num_options == 2);
  CHECK(f.num_classes == 3);
  // Option 0: 3 cars, 1/2 -> 5/6. Option 1: 1 car -> 1/6.
  CHECK(f.usage_min == doctest::Approx(1.0 / 6));
  CHECK(f.usage_max == doctest::Approx(5.0 / 6));
  CHECK(f.usage_ave == doctest::Approx(0.5));
  CHECK(f.usage_std == doctest::Approx(1.0 / 3));
  CHECK(f.ave_ops == doctest::Approx((0.5 + 1.0 + 0.0) / 3));
  CHECK(f.pq_min == doctest::Approx(0.5));
  CHECK(f.pq_max == doctest::Approx(2.0 / 3));
  CHECK(f.lcm_q == 6);
  CHECK(f.classpop_std == doctest::Approx(std::sqrt(2.0 / 3)));
}

TEST_CASE("feature invariants on random instances") {
  Rng rng(44);
  for (int n = 0; n < 300; ++n) {
    const Instance inst = random_instance(rng, {20, 6, 4});
    const FeatureVector f = extract_features(inst);
    CHECK(f.usage_min <= f.usage_ave + 1e-12);
    CHECK(f.usage_ave <= f.usage_max + 1e-12);
    CHECK(f.pq_min <= f.pq_ave + 1e-12);
    CHECK(f.pq_ave <= f.pq_max + 1e-12);
    CHECK(f.pq_min > 0.0);
    CHECK(f.pq_max <= 1.0);
    for (int q : inst.window) CHECK(f.lcm_q % static_cast<std::uint64_t>(q) == 0);
    CHECK(FeatureVector::from_values(f.values()) == f);
  }
}

TEST_CASE("feature names line up with values") {
  CHECK(feature_names().size() == FeatureVector::kCount);
  CHECK(feature_names()[4] == "usage_ave");
  CHECK(feature_names()[12] == "lcm_q");
}

TEST_CASE("features of E4") {
  const FeatureVector f = extract_features(make_instance("E4", {2, 2}, {{1}, {0}}, {1}, {2}));
  CHECK(f.num_cars == 4);
  CHECK(f.num_options == 1);
  CHECK(f.num_classes == 2);
  CHECK(f.usage_min == 0.75);
  CHECK(f.usage_max == 0.75);
  CHECK(f.usage_std == 0.0);
  CHECK(f.ave_ops == 0.5);
  CHECK(f.pq_ave == 0.5);
  CHECK(f.lcm_q == 2);
  CHECK(f.classpop_std == 0.0);
}
