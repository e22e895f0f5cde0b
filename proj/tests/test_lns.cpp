#include "doctest.h"

#include <algorithm>

#include "carseq/error.hpp"
#include "carseq/exact.hpp"
#include "carseq/lns.hpp"
#include "support.hpp"

using namespace carseq;
using carseq::testing::direct_objective;
using carseq::testing::e4;
using carseq::testing::random_instance;
using carseq::testing::random_sequence;

namespace {

bool non_increasing(const std::vector<TracePoint>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].objective > trace[i - 1].objective) return false;
  }
  return true;
}

std::vector<int> class_counts(const Instance& inst, const Sequence& seq) {
  std::vector<int> c(static_cast<std::size_t>(inst.num_classes), 0);
  for (ClassId k : seq.classes) ++c[static_cast<std::size_t>(k)];
  return c;
}

}  // namespace

TEST_CASE("initial sequence with no budget is the deterministic greedy completion") {
  Rng rng(3);
  const Instance inst = random_instance(rng, {30, 5, 3});
  Budget a(0.0), b(0.0);
  Rng r1(1), r2(99);
  const InitialSolution x = initial_sequence(inst, InitMode::Adaptive, a, r1);
  const InitialSolution y = initial_sequence(inst, InitMode::Adaptive, b, r2);
  CHECK(x.sequence == y.sequence);
  CHECK_NOTHROW(check_sequence(inst, x.sequence));
}

TEST_CASE("initial sequence on E4 has objective at most one") {
  const Instance inst = e4();
  for (InitMode mode : {InitMode::Classic, InitMode::Adaptive}) {
    Budget budget(1.0);
    Rng rng(5);
    const InitialSolution s = initial_sequence(inst, mode, budget, rng);
    CHECK(direct_objective(inst, s.sequence) <= 1.0);
    CHECK(s.bound <= 0.0);
  }
}

TEST_CASE("initial sequences keep the class demands") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const Instance inst = random_instance(rng, {20, 5, 3});
    const InitMode mode = i % 2 == 0 ? InitMode::Classic : InitMode::Adaptive;
    Budget budget(0.01);
    const InitialSolution s = initial_sequence(inst, mode, budget, rng);
    REQUIRE(s.sequence.size() == static_cast<std::size_t>(inst.num_cars));
    CHECK(class_counts(inst, s.sequence) == inst.demand);
  }
}

TEST_CASE("E4 from AABB with w = 2 and s = 1 reaches zero in one pass") {
  const Instance inst = e4();
  LnsConfig cfg;
  cfg.window = 2;
  cfg.shift = 1;
  cfg.max_passes = 1;
  cfg.start = Sequence({0, 0, 1, 1});
  const SolveResult r = lns(inst, cfg);
  CHECK(r.objective == 0.0);
  CHECK(direct_objective(inst, r.best) == 0.0);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace.front().objective == 1.0);
}

TEST_CASE("a window over the whole sequence proves the optimum") {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    const Instance inst = random_instance(rng);
    LnsConfig cfg;
    cfg.window = inst.num_cars;
    cfg.sub_gap = 0.0;
    cfg.sub_nodes = 10'000'000;
    cfg.start = random_sequence(inst, rng);
    const SolveResult r = lns(inst, cfg);
    const ExactResult opt = brute_force(whole_problem(inst));
    CHECK(r.objective == opt.objective);
    CHECK(r.lower_bound == opt.objective);
    // A zero start needs no window solve, and zero bounds it anyway.
    if (r.trace.front().objective > 0.0) CHECK(r.bound_certified);
  }
}

TEST_CASE("fixed-window traces never increase") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const Instance inst = random_instance(rng, {40, 6, 4}, i % 3 == 0);
    for (int w : {10, lcm_window(inst)}) {
      LnsConfig cfg;
      cfg.window = w;
      cfg.time_limit = 0.05;
      cfg.seed = static_cast<std::uint64_t>(i);
      const SolveResult r = lns(inst, cfg);
      CHECK(non_increasing(r.trace));
      CHECK(r.objective == direct_objective(inst, r.best));
      CHECK(r.objective <= r.trace.front().objective);
    }
  }
}

TEST_CASE("adaptive traces never increase") {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const Instance inst = random_instance(rng, {40, 6, 4}, i % 3 == 0);
    LnsConfig cfg;
    cfg.window = 0;
    cfg.adaptive_start = 4;
    cfg.time_limit = 0.05;
    cfg.seed = static_cast<std::uint64_t>(i);
    const SolveResult r = adaptive_lns(inst, cfg);
    CHECK(non_increasing(r.trace));
    CHECK(r.objective == direct_objective(inst, r.best));
  }
}

TEST_CASE("window growth follows the stagnation rule") {
  LnsConfig cfg;
  cfg.window = 0;
  int w = 30;
  w = next_window_size(w, 0.0, cfg, 500);
  CHECK(w == 31);
  w = next_window_size(w, 0.0, cfg, 500);
  CHECK(w == 32);
  CHECK(next_window_size(32, 0.005, cfg, 500) == 32);
  CHECK(next_window_size(32, 0.0049, cfg, 500) == 33);
  CHECK(next_window_size(40, 0.0, cfg, 40) == 40);
}

TEST_CASE("adaptive window sizes grow by one when nothing improves") {
  // One class: every sequence has the same positive objective, so no
  // iteration can improve the gap.
  const Instance inst = make_instance("flat", {60}, {{1}}, {1}, {2});
  LnsConfig cfg;
  cfg.window = 0;
  cfg.adaptive_start = 30;
  cfg.max_passes = 3;
  cfg.time_limit = 1e9;
  cfg.start = sorted_sequence(inst);  // skips the initialiser, which would prove optimality
  const SolveResult r = adaptive_lns(inst, cfg);
  CHECK(r.objective > 0.0);
  CHECK(r.window_sizes == std::vector<int>({30, 31, 32}));
}

TEST_CASE("adaptive LNS matches brute force on small instances") {
  Rng rng(43);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    const Instance inst = random_instance(rng);
    LnsConfig cfg;
    cfg.window = 0;
    cfg.adaptive_start = 2;
    cfg.time_limit = 0.5;
    cfg.seed = static_cast<std::uint64_t>(i);
    const SolveResult r = adaptive_lns(inst, cfg);
    if (r.objective == brute_force(whole_problem(inst)).objective) ++hits;
  }
  CHECK(hits >= 195);
}

TEST_CASE("positions outside the window are untouched") {
  Rng rng(47);
  for (int i = 0; i < 50; ++i) {
    const Instance inst = random_instance(rng, {30, 5, 3});
    const Sequence start = random_sequence(inst, rng);
    LnsConfig cfg;
    cfg.window = 5;
    cfg.shift = 5;
    cfg.max_passes = 1;
    cfg.start = start;
    // Only windows starting at 0, 5, ...; a single pass never frees more than it visits.
    const SolveResult r = lns(inst, cfg);
    CHECK(class_counts(inst, r.best) == inst.demand);
  }
}

TEST_CASE("runs are deterministic for a seed") {
  Rng rng(53);
  const Instance inst = random_instance(rng, {50, 6, 4});
  for (Algorithm alg : {Algorithm::Lns10, Algorithm::LnsLcm, Algorithm::Adaptive}) {
    auto run = [&] {
      switch (alg) {
        case Algorithm::Lns10: return solve_lns10(inst, 0.1, 7);
        case Algorithm::LnsLcm: return solve_lns_lcm(inst, 0.1, 7);
        default: return solve_adaptive(inst, 0.1, 7);
      }
    };
    const SolveResult a = run(), b = run();
    CHECK(a.best == b.best);
    CHECK(a.objective == b.objective);
    CHECK(a.algorithm == alg);
  }
}

TEST_CASE("lcm window is capped") {
  const Instance inst = make_instance("lcm", {5, 5, 5, 5, 5, 5, 5, 15},
                                      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1},
                                       {0, 1, 1}, {1, 1, 1}, {0, 0, 0}},
                                      {1, 2, 3}, {3, 4, 5});
  CHECK(lcm_window(inst) == 40);
  CHECK(lcm_window(inst, 100) == 50);
  CHECK(lcm_window(e4()) == 2);
}

TEST_CASE("invalid configurations are rejected") {
  const Instance inst = e4();
  LnsConfig cfg;
  cfg.window = 2;
  cfg.shift = 3;
  CHECK_THROWS_AS(lns(inst, cfg), InvalidInput);
  cfg.window = 0;
  cfg.shift = 0;
  CHECK_THROWS_AS(lns(inst, cfg), InvalidInput);
  cfg.adaptive_start = 1;
  CHECK_THROWS_AS(adaptive_lns(inst, cfg), InvalidInput);
}
