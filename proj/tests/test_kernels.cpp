#include "doctest.h"

#include <algorithm>
#include <vector>

#include "carseq/kernels.hpp"
#include "carseq/rng.hpp"

using namespace carseq;

namespace {

struct PenaltyCase {
  std::vector<std::int32_t> prefix;
  std::vector<double> a, b;
  int p = 1, q = 1, lo = 0, hi = 0;
};

PenaltyCase random_case(Rng& rng) {
  PenaltyCase c;
  const int D = rng.between(1, 70);
  c.prefix.assign(static_cast<std::size_t>(D) + 1, 0);
  for (int t = 0; t < D; ++t) c.prefix[static_cast<std::size_t>(t) + 1] = c.prefix[static_cast<std::size_t>(t)] + (rng.bernoulli(0.4) ? 1 : 0);
  c.q = rng.between(1, std::min(D, 9));
  c.p = rng.between(1, c.q);
  c.lo = rng.between(0, D - 1);
  c.hi = rng.between(c.lo, D);
  // Small integers keep the sums exact whatever the summation order.
  for (int t = 0; t < D; ++t) {
    c.a.push_back(static_cast<double>(rng.between(0, 4)));
    c.b.push_back(static_cast<double>(rng.between(0, 2)));
  }
  return c;
}

}  // namespace

TEST_CASE("scalar window penalties by hand") {
  // Cars at positions 0 and 1, p = 1, q = 2.
  const std::vector<std::int32_t> prefix = {0, 1, 2, 2};
  const std::vector<double> a = {1, 1, 1}, b = {1, 1, 1};
  std::vector<std::int32_t> y(3), z(3);
  const auto s = kernels::scalar::window_penalties(prefix, 1, 2, 0, 3, a, b, y, z);
  CHECK(y == std::vector<std::int32_t>{0, 1, 0});
  CHECK(z == std::vector<std::int32_t>{0, 0, 0});
  CHECK(s.over == 1.0);
  CHECK(s.under == 0.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::avx2::available()) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
    return;
  }
  Rng rng(12);
  for (int n = 0; n < 2000; ++n) {
    const PenaltyCase c = random_case(rng);
    const std::size_t D = c.a.size();
    std::vector<std::int32_t> y1(D, -1), z1(D, -1), y2(D, -1), z2(D, -1);
    const auto s1 = kernels::scalar::window_penalties(c.prefix, c.p, c.q, c.lo, c.hi, c.a, c.b, y1, z1);
    const auto s2 = kernels::avx2::window_penalties(c.prefix, c.p, c.q, c.lo, c.hi, c.a, c.b, y2, z2);
    REQUIRE(y1 == y2);
    REQUIRE(z1 == z2);
    CHECK(s1.over == s2.over);
    CHECK(s1.under == s2.under);
  }
  for (int n = 0; n < 200; ++n) {
    const std::size_t len = rng.below(40);
    std::vector<double> t1(len), u(len), v(len);
    for (std::size_t i = 0; i < len; ++i) {
      t1[i] = rng.uniform() * 3.0;
      u[i] = rng.uniform();
      v[i] = rng.uniform();
    }
    std::vector<double> t2 = t1;
    kernels::scalar::evaporate(t1, 0.9, 0.5);
    kernels::avx2::evaporate(t2, 0.9, 0.5);
    CHECK(t1 == t2);
    CHECK(kernels::avx2::squared_distance(u, v) ==
          doctest::Approx(kernels::scalar::squared_distance(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("dispatch names the active variant") {
  const auto isa = kernels::active_isa();
  CHECK((kernels::isa_name(isa) == "scalar" || kernels::isa_name(isa) == "avx2"));
  const std::vector<double> a = {1, 2}, b = {4, 6};
  CHECK(kernels::squared_distance(a, b) == 25.0);
}
