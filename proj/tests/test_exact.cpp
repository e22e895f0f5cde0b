#include "doctest.h"

#include "carseq/error.hpp"
#include "carseq/exact.hpp"
#include "support.hpp"

using namespace carseq;
using carseq::testing::direct_objective;
using carseq::testing::e4;
using carseq::testing::random_instance;
using carseq::testing::random_sequence;

TEST_CASE("brute force on E4 finds the alternating sequence") {
  const Instance inst = e4();
  const ExactResult r = brute_force(whole_problem(inst));
  CHECK(r.proven);
  CHECK(r.objective == 0.0);
  CHECK(r.nodes == 6);
  CHECK(r.best == Sequence({0, 1, 0, 1}));
}

TEST_CASE("brute force with one free position evaluates the single completion") {
  Rng rng(11);
  const Instance inst = random_instance(rng);
  const Sequence seq = random_sequence(inst, rng);
  const ExactResult r = brute_force(free_positions(inst, seq, {2}));
  CHECK(r.nodes == 1);
  CHECK(r.objective == direct_objective(inst, seq));
}

TEST_CASE("brute force with no active windows returns zero") {
  const Instance inst = e4();
  Subproblem sub = whole_problem(inst);
  sub.active = WindowMask(inst.num_options, inst.num_cars);
  const ExactResult r = brute_force(sub);
  CHECK(r.objective == 0.0);
}

TEST_CASE("brute force refuses above the cap") {
  const Instance inst = make_instance("big", {6, 6, 6}, {{1, 0}, {0, 1}, {1, 1}}, {1, 1}, {2, 2});
  CHECK(arrangement_count(inst.demand) == 17'153'136);
  CHECK_THROWS_AS(brute_force(whole_problem(inst)), Refusal);
}

TEST_CASE("arrangement count matches the multinomial") {
  CHECK(arrangement_count({2, 2}) == 6);
  CHECK(arrangement_count({1, 1, 1, 1}) == 24);
  CHECK(arrangement_count({3}) == 1);
  CHECK(arrangement_count({}) == 1);
  CHECK(arrangement_count({30, 30, 30}) > 10'000'000);
}

TEST_CASE("branch and bound equals brute force on random small instances") {
  Rng rng(2024);
  for (int n = 0; n < 300; ++n) {
    const Instance inst = random_instance(rng, {}, n % 3 == 0);
    const ExactResult oracle = brute_force(whole_problem(inst));
    const ExactResult bb = branch_and_bound(whole_problem(inst));
    INFO("instance " << n);
    REQUIRE(bb.proven);
    CHECK(bb.objective == oracle.objective);
    CHECK(bb.bound == bb.objective);
    CHECK(direct_objective(inst, bb.best) == bb.objective);
  }
}

TEST_CASE("branch and bound on random windows equals brute force on the same windows") {
  Rng rng(77);
  for (int n = 0; n < 200; ++n) {
    const Instance inst = random_instance(rng, {12, 4, 3}, n % 2 == 0);
    const Sequence cur = random_sequence(inst, rng);
    std::vector<int> pos;
    for (int t = 0; t < inst.num_cars; ++t) {
      if (rng.bernoulli(0.5)) pos.push_back(t);
    }
    const Subproblem sub = free_positions(inst, cur, pos);
    const ExactResult oracle = brute_force(sub);
    BnbOptions opt;
    opt.warm_start = cur;
    const ExactResult bb = branch_and_bound(sub, opt);
    INFO("instance " << n);
    REQUIRE(bb.proven);
    CHECK(bb.objective == oracle.objective);
    for (int t = 0; t < inst.num_cars; ++t) {
      if (!std::binary_search(sub.free_positions.begin(), sub.free_positions.end(), t)) {
        CHECK(bb.best[static_cast<std::size_t>(t)] == cur[static_cast<std::size_t>(t)]);
      }
    }
  }
}

TEST_CASE("node limit zero gives an unproven admissible root bound") {
  Rng rng(5);
  for (int n = 0; n < 200; ++n) {
    const Instance inst = random_instance(rng, {}, n % 2 == 1);
    const ExactResult oracle = brute_force(whole_problem(inst));
    BnbOptions opt;
    opt.node_limit = 0;
    const ExactResult bb = branch_and_bound(whole_problem(inst), opt);
    CHECK_FALSE(bb.proven);
    CHECK(bb.nodes == 0);
    CHECK(bb.bound <= oracle.objective + 1e-9);
    CHECK(bb.objective >= oracle.objective);
    CHECK(direct_objective(inst, bb.best) == bb.objective);
  }
}

TEST_CASE("bounds stay admissible at every node limit") {
  Rng rng(9);
  for (int n = 0; n < 100; ++n) {
    const Instance inst = random_instance(rng, {10, 4, 3}, true);
    const ExactResult oracle = brute_force(whole_problem(inst));
    for (std::uint64_t limit : {1u, 3u, 10u, 50u}) {
      BnbOptions opt;
      opt.node_limit = limit;
      const ExactResult bb = branch_and_bound(whole_problem(inst), opt);
      CHECK(bb.bound <= oracle.objective + 1e-9);
      CHECK(bb.objective >= oracle.objective - 1e-9);
      CHECK(bb.bound <= bb.objective);
    }
  }
}

TEST_CASE("a single free class gives one leaf") {
  const Instance inst = make_instance("one", {5}, {{1}}, {1}, {2});
  const ExactResult bb = branch_and_bound(whole_problem(inst));
  CHECK(bb.proven);
  CHECK(bb.objective == 4.0);
}

TEST_CASE("incumbent trace is non-increasing") {
  Rng rng(31);
  for (int n = 0; n < 50; ++n) {
    const Instance inst = random_instance(rng, {9, 4, 3});
    const ExactResult bb = branch_and_bound(whole_problem(inst));
    for (std::size_t i = 1; i < bb.trace.size(); ++i) {
      CHECK(bb.trace[i].objective <= bb.trace[i - 1].objective);
      CHECK(bb.trace[i].bound >= bb.trace[i - 1].bound);
    }
  }
}

TEST_CASE("lazy loop on E4 matches the full model") {
  const LazyResult r = solve_lazy(e4());
  CHECK(r.proven);
  CHECK(r.objective == 0.0);
  CHECK(r.objective == branch_and_bound(whole_problem(e4())).objective);
}

TEST_CASE("lazy loop stops after one round when the first master is feasible") {
  // Any arrangement is penalty free: p = q.
  const Instance inst = make_instance("free", {2, 2}, {{1}, {0}}, {2}, {2});
  const LazyResult r = solve_lazy(inst);
  CHECK(r.rounds == 1);
  CHECK(r.objective == 0.0);
  CHECK(r.proven);
}

TEST_CASE("lazy loop equals brute force on random small instances") {
  Rng rng(404);
  for (int n = 0; n < 200; ++n) {
    const Instance inst = random_instance(rng, {}, n % 4 == 0);
    const ExactResult oracle = brute_force(whole_problem(inst));
    const LazyResult r = solve_lazy(inst);
    INFO("instance " << n);
    REQUIRE(r.proven);
    CHECK(r.objective == oracle.objective);
    CHECK(r.bound <= oracle.objective);
  }
}

TEST_CASE("restricted objective never exceeds the full objective") {
  Rng rng(8);
  for (int n = 0; n < 200; ++n) {
    const Instance inst = random_instance(rng, {}, true);
    const Sequence seq = random_sequence(inst, rng);
    WindowMask mask(inst.num_options, inst.num_cars);
    for (int j = 0; j < inst.num_options; ++j) {
      for (int t = 0; t < inst.num_cars; ++t) {
        if (rng.bernoulli(0.4)) mask.activate(j, t);
      }
    }
    CHECK(evaluate_masked(inst, seq, mask) <= evaluate(inst, seq).total);
  }
}

TEST_CASE("subproblem validation rejects inconsistent counts") {
  const Instance inst = e4();
  Subproblem sub = whole_problem(inst);
  sub.free_counts = {3, 1};
  CHECK_THROWS_AS(sub.validate(), InvalidInput);
  sub = whole_problem(inst);
  sub.free_positions = {0, 0, 1, 2};
  CHECK_THROWS_AS(sub.validate(), InvalidInput);
}

TEST_CASE("warm start disagreeing with fixed positions is rejected") {
  const Instance inst = e4();
  const Subproblem sub = free_positions(inst, Sequence({0, 0, 1, 1}), {0, 1});
  BnbOptions opt;
  opt.warm_start = Sequence({1, 0, 0, 1});
  CHECK_THROWS_AS(branch_and_bound(sub, opt), InvalidInput);
}

TEST_CASE("mid-size instances finish and agree with a full evaluation") {
  Rng rng(13);
  for (int n = 0; n < 10; ++n) {
    const Instance inst = random_instance(rng, {40, 6, 4});
    BnbOptions opt;
    opt.time_limit = 0.5;
    const ExactResult bb = branch_and_bound(whole_problem(inst), opt);
    CHECK(bb.objective == direct_objective(inst, bb.best));
    CHECK(bb.bound <= bb.objective);
  }
}
