#include "doctest.h"

#include <cmath>
#include <numeric>

#include "carseq/exact.hpp"
#include "carseq/lraco.hpp"
#include "support.hpp"

using namespace carseq;
using carseq::testing::e4;
using carseq::testing::random_instance;
using carseq::testing::random_sequence;

namespace {

std::vector<double> random_lambda(const Instance& inst, Rng& rng, double scale) {
  std::vector<double> l(static_cast<std::size_t>(inst.num_cars));
  for (double& v : l) v = (rng.uniform() * 2.0 - 1.0) * scale;
  return l;
}

bool counts_match(const Instance& inst, const RelaxedSolution& x) {
  for (ClassId i = 0; i < inst.num_classes; ++i) {
    int n = 0;
    for (int t = 0; t < inst.num_cars; ++t) n += x.at(t, i) ? 1 : 0;
    if (n != inst.demand[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

RelaxedSolution random_multi(const Instance& inst, Rng& rng) {
  RelaxedSolution x;
  x.num_cars = inst.num_cars;
  x.num_classes = inst.num_classes;
  x.x.assign(static_cast<std::size_t>(inst.num_cars) * inst.num_classes, 0);
  for (ClassId i = 0; i < inst.num_classes; ++i) {
    std::vector<int> pos(static_cast<std::size_t>(inst.num_cars));
    std::iota(pos.begin(), pos.end(), 0);
    rng.shuffle(pos.begin(), pos.end());
    for (int k = 0; k < inst.demand[static_cast<std::size_t>(i)]; ++k) {
      x.x[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)]) * inst.num_classes + i] = 1;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("relaxed solve with zero multipliers reaches zero on E4") {
  const Instance inst = e4();
  const std::vector<double> lambda(4, 0.0);
  const RelaxedSolution x = solve_relaxed(inst, lambda);
  CHECK(x.certified);
  CHECK(x.value <= 0.0);
  CHECK(x.found == doctest::Approx(relaxed_objective(inst, lambda, x)));
}

TEST_CASE("certified relaxed values never exceed the optimum") {
  Rng rng(100);
  for (int n = 0; n < 200; ++n) {
    const Instance inst = random_instance(rng, {}, n % 3 == 0);
    const double opt = brute_force(whole_problem(inst)).objective;
    for (double scale : {0.0, 0.5, 3.0}) {
      const auto lambda = random_lambda(inst, rng, scale);
      const RelaxedSolution x = solve_relaxed(inst, lambda);
      CHECK(x.value <= opt + 1e-9);
      CHECK(counts_match(inst, x));
      CHECK(x.found == doctest::Approx(relaxed_objective(inst, lambda, x)));
      if (x.certified) CHECK(x.value == doctest::Approx(x.found));
    }
  }
}

TEST_CASE("certified relaxed optimum matches enumeration of multi-assignments") {
  // Independent oracle: every class picks its positions independently.
  Rng rng(3);
  for (int n = 0; n < 60; ++n) {
    const Instance inst = random_instance(rng, {6, 3, 2}, n % 2 == 0);
    const auto lambda = random_lambda(inst, rng, 2.0);
    const int D = inst.num_cars;
    const int K = inst.num_classes;
    std::vector<std::vector<int>> subsets(static_cast<std::size_t>(K));
    for (ClassId i = 0; i < K; ++i) {
      for (int mask = 0; mask < (1 << D); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) == inst.demand[static_cast<std::size_t>(i)]) {
          subsets[static_cast<std::size_t>(i)].push_back(mask);
        }
      }
    }
    double best = 1e300;
    std::vector<std::size_t> idx(static_cast<std::size_t>(K), 0);
    RelaxedSolution x;
    x.num_cars = D;
    x.num_classes = K;
    for (;;) {
      x.x.assign(static_cast<std::size_t>(D) * K, 0);
      for (ClassId i = 0; i < K; ++i) {
        const int mask = subsets[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        for (int t = 0; t < D; ++t) {
          if (mask >> t & 1) x.x[static_cast<std::size_t>(t) * K + i] = 1;
        }
      }
      best = std::min(best, relaxed_objective(inst, lambda, x));
      int c = 0;
      while (c < K && ++idx[static_cast<std::size_t>(c)] == subsets[static_cast<std::size_t>(c)].size()) {
        idx[static_cast<std::size_t>(c)] = 0;
        ++c;
      }
      if (c == K) break;
    }
    const RelaxedSolution r = solve_relaxed(inst, lambda);
    REQUIRE(r.certified);
    CHECK(r.value == doctest::Approx(best));
  }
}

TEST_CASE("zero node budget gives the root bound, uncertified") {
  Rng rng(4);
  for (int n = 0; n < 50; ++n) {
    const Instance inst = random_instance(rng);
    const auto lambda = random_lambda(inst, rng, 1.0);
    const RelaxedSolution x = solve_relaxed(inst, lambda, 0);
    CHECK_FALSE(x.certified);
    CHECK(x.nodes == 0);
    CHECK(x.value <= solve_relaxed(inst, lambda).value + 1e-9);
    CHECK(counts_match(inst, x));
  }
}

TEST_CASE("repair of a feasible assignment reads it back") {
  Rng rng(6);
  for (int n = 0; n < 50; ++n) {
    const Instance inst = random_instance(rng);
    const Sequence seq = random_sequence(inst, rng);
    CHECK(repair(inst, as_relaxed(inst, seq)) == seq);
  }
}

TEST_CASE("repair moves the excess class to the empty position") {
  // x is binary per (position, class), so the doubled position holds two classes.
  const Instance inst = make_instance("two", {1, 1}, {{1}, {0}}, {1}, {1});
  RelaxedSolution x;
  x.num_cars = 2;
  x.num_classes = 2;
  x.x = {1, 1, 0, 0};
  CHECK(repair(inst, x) == Sequence({0, 1}));
}

TEST_CASE("repair prefers the left empty position on ties") {
  const Instance inst = make_instance("three", {1, 1, 1}, {{1, 0}, {0, 1}, {1, 1}}, {1, 1}, {2, 2});
  RelaxedSolution x;
  x.num_cars = 3;
  x.num_classes = 3;
  // Position 1 holds all three classes; 0 and 2 are empty.
  x.x = {0, 0, 0, 1, 1, 1, 0, 0, 0};
  // Class 2 goes left to 0, then class 1 goes right to 2.
  CHECK(repair(inst, x) == Sequence({2, 0, 1}));
}

TEST_CASE("repair output is always count-valid") {
  Rng rng(12);
  for (int n = 0; n < 1000; ++n) {
    const Instance inst = random_instance(rng, {15, 5, 3});
    const RelaxedSolution x = random_multi(inst, rng);
    CHECK_NOTHROW(check_sequence(inst, repair(inst, x)));
  }
}

TEST_CASE("multiplier update follows the formula") {
  LagrangianState st;
  st.lambda = {0.0, 0.0};
  st.gamma = 2.0;
  st.best_upper = 4.0;
  RelaxedSolution x;
  x.num_cars = 2;
  x.num_classes = 2;
  x.x = {1, 1, 0, 0};  // position 0 holds 2, position 1 holds 0
  // ||x|| = 1 + 1 = 2; step = 2 * (4 - 0) / 2 = 4
  update_multipliers(st, x, 0.0);
  CHECK(st.lambda[0] == doctest::Approx(4.0));
  CHECK(st.lambda[1] == doctest::Approx(-4.0));
}

TEST_CASE("single violated position moves by gamma times the gap") {
  LagrangianState st;
  st.lambda = {0.0};
  st.gamma = 2.0;
  st.best_upper = 4.0;
  RelaxedSolution x;
  x.num_cars = 1;
  x.num_classes = 2;
  x.x = {1, 1};
  update_multipliers(st, x, 0.0);
  CHECK(st.lambda[0] == doctest::Approx(8.0));
}

TEST_CASE("feasible assignment leaves the multipliers alone") {
  LagrangianState st;
  st.lambda = {1.5, -0.5};
  st.best_upper = 3.0;
  RelaxedSolution x;
  x.num_cars = 2;
  x.num_classes = 2;
  x.x = {1, 0, 0, 1};
  update_multipliers(st, x, 1.0);
  CHECK(st.lambda == std::vector<double>{1.5, -0.5});
}

TEST_CASE("aco with zero iterations returns the seed") {
  const Instance inst = e4();
  Pheromone tau(4, 2, 1.0);
  Rng rng(1);
  const Sequence seed({0, 0, 1, 1});
  CHECK(aco_improve(inst, tau, seed, 0, rng) == seed);
}

TEST_CASE("aco reaches the E4 optimum") {
  const Instance inst = e4();
  Pheromone tau(4, 2, 1.0);
  Rng rng(42);
  const Sequence out = aco_improve(inst, tau, Sequence({0, 0, 1, 1}), 100, rng);
  CHECK(evaluate(inst, out).total == 0.0);
}

TEST_CASE("aco follows concentrated pheromone") {
  const Instance inst = e4();
  Pheromone tau(4, 2, 1e-9);
  const Sequence target({1, 0, 1, 0});
  for (int t = 0; t < 4; ++t) tau.at(t, target[static_cast<std::size_t>(t)]) = 1e9;
  Rng rng(2);
  AcoParams params;
  params.tau_min = 1e-12;
  const Sequence out = aco_improve(inst, tau, Sequence({0, 0, 1, 1}), 1, rng, params);
  CHECK(out == target);
}

TEST_CASE("pheromone stays above the floor") {
  Rng rng(5);
  const Instance inst = random_instance(rng, {12, 4, 3});
  Pheromone tau(inst.num_cars, inst.num_classes, 1.0);
  aco_improve(inst, tau, sorted_sequence(inst), 50, rng);
  for (double v : tau.tau) CHECK(v >= 0.01);
}

TEST_CASE("lraco bounds never exceed the optimum") {
  Rng rng(77);
  for (int n = 0; n < 60; ++n) {
    const Instance inst = random_instance(rng);
    const double opt = brute_force(whole_problem(inst)).objective;
    LracoConfig cfg;
    cfg.time_limit = 0.05;
    cfg.seed = static_cast<std::uint64_t>(n);
    const SolveResult r = lraco(inst, cfg);
    CHECK(r.objective >= opt);
    if (r.bound_certified) CHECK(r.lower_bound <= opt + 1e-9);
    CHECK(evaluate(inst, r.best).total == r.objective);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].objective <= r.trace[i - 1].objective);
  }
}

TEST_CASE("lraco is deterministic for a seed") {
  Rng rng(8);
  const Instance inst = random_instance(rng, {30, 6, 3});
  LracoConfig cfg;
  cfg.time_limit = 0.1;
  cfg.seed = 9;
  const SolveResult a = lraco(inst, cfg);
  const SolveResult b = lraco(inst, cfg);
  CHECK(a.best == b.best);
  CHECK(a.objective == b.objective);
  CHECK(a.lower_bound == b.lower_bound);
  CHECK(a.seconds == b.seconds);
}

TEST_CASE("halving gamma eight times ends the schedule") {
  double g = 2.0;
  int halvings = 0;
  while (g > 0.01) {
    g /= 2.0;
    ++halvings;
  }
  CHECK(halvings == 8);
}
