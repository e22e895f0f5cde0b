#include "carseq/lns.hpp"

#include <algorithm>
#include <numeric>

#include "carseq/error.hpp"
#include "carseq/exact.hpp"
#include "carseq/lraco.hpp"

namespace carseq {

namespace {

constexpr std::uint64_t kInitRelaxedNodes = 10'000;
constexpr int kInitAcoIterations = 20;
// Work units per (option, position) for the full evaluations around one window solve.
constexpr std::uint64_t kWindowEvalCost = 8;

struct Incumbent {
  Sequence seq;
  double objective = 0.0;
  double bound = 0.0;
  bool certified = false;
};

// Re-optimises `positions` of the incumbent. Returns true when the window
// solve was proven optimal.
bool solve_window(const Instance& inst, Incumbent& cur, std::vector<int> positions, const LnsConfig& cfg,
                  Budget& budget, SolveResult& res) {
  const bool whole = static_cast<int>(positions.size()) == inst.num_cars;
  const Subproblem sub = free_positions(inst, cur.seq, std::move(positions));
  BnbOptions opt;
  opt.warm_start = cur.seq;
  opt.gap_tolerance = cfg.sub_gap;
  opt.node_limit = cfg.sub_nodes;
  const ExactResult r = branch_and_bound(sub, budget, opt);
  budget.charge(kWindowEvalCost * static_cast<std::uint64_t>(inst.num_options) * inst.num_cars);
  if (r.objective <= cur.objective) {
    const bool improved = r.objective < cur.objective;
    cur.seq = r.best;
    cur.objective = r.objective;
    if (improved) res.trace.push_back({budget.elapsed_seconds(), cur.objective, cur.bound});
  }
  if (whole) {
    // A window over every position bounds the whole problem.
    cur.bound = std::min(std::max(cur.bound, r.bound), cur.objective);
    cur.certified = true;
  }
  return r.proven;
}

Incumbent start(const Instance& inst, const LnsConfig& cfg, InitMode mode, Budget& budget, Rng& rng) {
  Incumbent cur;
  if (cfg.start) {
    check_sequence(inst, *cfg.start);
    cur.seq = *cfg.start;
  } else {
    Budget init(cfg.time_limit * cfg.init_share, budget);
    InitialSolution s = initial_sequence(inst, mode, init, rng);
    cur.seq = std::move(s.sequence);
    cur.bound = s.bound;
    cur.certified = s.certified;
  }
  cur.objective = evaluate(inst, cur.seq).total;
  cur.bound = std::min(cur.bound, cur.objective);
  return cur;
}

SolveResult finish(Algorithm alg, const Incumbent& cur, Budget& budget, SolveResult res) {
  res.algorithm = alg;
  res.best = cur.seq;
  res.objective = cur.objective;
  res.lower_bound = cur.certified ? std::max(0.0, cur.bound) : 0.0;
  res.bound_certified = cur.certified;
  res.gap = objective_gap(res.objective, res.lower_bound);
  res.seconds = budget.elapsed_seconds();
  return res;
}

void check_config(const LnsConfig& cfg) {
  if (cfg.shift < 0) throw InvalidInput("lns shift must be positive");
  if (cfg.window > 0 && cfg.shift > cfg.window) throw InvalidInput("lns shift must not exceed the window");
  if (cfg.window == 0 && cfg.adaptive_start < 2) throw InvalidInput("adaptive window must start at 2 or more");
  if (cfg.adaptive_increment < 1) throw InvalidInput("adaptive increment must be positive");
  if (!(cfg.time_limit >= 0.0)) throw InvalidInput("time limit must be non-negative");
}

bool optimal(const Incumbent& cur) {
  return cur.objective <= 0.0 || (cur.certified && cur.objective <= cur.bound);
}

}  // namespace

InitialSolution initial_sequence(const Instance& inst, InitMode mode, Budget& budget, Rng& rng) {
  InitialSolution out;
  if (mode == InitMode::Adaptive) {
    const ExactResult r = branch_and_bound(whole_problem(inst), budget);
    out.sequence = r.best;
    out.bound = std::max(0.0, r.bound);
    out.certified = true;
    return out;
  }
  const std::vector<double> lambda(static_cast<std::size_t>(inst.num_cars), 0.0);
  const RelaxedSolution x = solve_relaxed(inst, lambda, kInitRelaxedNodes, budget);
  Pheromone tau(inst.num_cars, inst.num_classes, 1.0);
  out.sequence = aco_improve(inst, tau, repair(inst, x), kInitAcoIterations, rng, AcoParams{}, budget);
  if (x.certified) {
    // With zero multipliers the relaxed optimum bounds the real one.
    out.bound = std::max(0.0, x.value);
    out.certified = true;
  }
  return out;
}

int lcm_window(const Instance& inst, int cap) {
  std::uint64_t l = 1;
  for (int q : inst.window) {
    l = std::lcm(l, static_cast<std::uint64_t>(q));
    if (l > static_cast<std::uint64_t>(inst.num_cars)) break;
  }
  return static_cast<int>(std::min<std::uint64_t>({l, static_cast<std::uint64_t>(inst.num_cars),
                                                   static_cast<std::uint64_t>(cap)}));
}

int next_window_size(int w, double gap_improvement, const LnsConfig& cfg, int num_cars) {
  if (gap_improvement < cfg.improvement_threshold) return std::min(w + cfg.adaptive_increment, num_cars);
  return w;
}

SolveResult lns(const Instance& inst, const LnsConfig& cfg) {
  if (cfg.window <= 0) throw InvalidInput("lns needs a positive window; use adaptive_lns for the adaptive variant");
  check_config(cfg);
  Budget budget(cfg.time_limit, cfg.clock);
  Rng rng(cfg.seed);
  SolveResult res;
  Incumbent cur = start(inst, cfg, InitMode::Classic, budget, rng);
  res.trace.push_back({budget.elapsed_seconds(), cur.objective, cur.bound});

  const int D = inst.num_cars;
  const int w = std::min(cfg.window, D);
  const int shift = cfg.shift > 0 ? cfg.shift : std::max(1, w / 2);
  for (int pass = 0; pass < cfg.max_passes && !budget.expired() && !optimal(cur); ++pass) {
    const Sequence before = cur.seq;
    bool all_proven = true;
    for (int s = 0; s < D && !budget.expired() && !optimal(cur); s += shift) {
      std::vector<int> positions(static_cast<std::size_t>(std::min(s + w, D) - s));
      std::iota(positions.begin(), positions.end(), s);
      all_proven = solve_window(inst, cur, std::move(positions), cfg, budget, res) && all_proven;
      if (s + w >= D) break;  // the last window reached the end
    }
    // A pass that changed nothing with every window proven will repeat itself.
    if (all_proven && cur.seq == before) break;
  }
  return finish(cfg.window == 10 ? Algorithm::Lns10 : Algorithm::LnsLcm, cur, budget, std::move(res));
}

SolveResult adaptive_lns(const Instance& inst, const LnsConfig& cfg) {
  if (cfg.window != 0) throw InvalidInput("adaptive_lns needs window 0");
  check_config(cfg);
  Budget budget(cfg.time_limit, cfg.clock);
  Rng rng(cfg.seed);
  SolveResult res;
  Incumbent cur = start(inst, cfg, InitMode::Adaptive, budget, rng);
  res.trace.push_back({budget.elapsed_seconds(), cur.objective, cur.bound});

  const int D = inst.num_cars;
  int w = std::min(cfg.adaptive_start, D);
  std::vector<int> perm(static_cast<std::size_t>(D));
  for (int it = 0; it < cfg.max_passes && !budget.expired() && !optimal(cur); ++it) {
    res.window_sizes.push_back(w);
    const double gap_before = objective_gap(cur.objective, cur.certified ? cur.bound : 0.0);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    const int step = std::max(1, w / 2);
    for (int s = 0; s < D && !budget.expired() && !optimal(cur); s += step) {
      const int e = std::min(s + w, D);
      std::vector<int> positions(perm.begin() + s, perm.begin() + e);
      solve_window(inst, cur, std::move(positions), cfg, budget, res);
      if (e == D) break;
    }
    const double gap_after = objective_gap(cur.objective, cur.certified ? cur.bound : 0.0);
    w = next_window_size(w, gap_before - gap_after, cfg, D);
  }
  return finish(Algorithm::Adaptive, cur, budget, std::move(res));
}

SolveResult solve_lns10(const Instance& inst, double time_limit, std::uint64_t seed, ClockMode clock) {
  LnsConfig cfg;
  cfg.window = 10;
  cfg.time_limit = time_limit;
  cfg.seed = seed;
  cfg.clock = clock;
  return lns(inst, cfg);
}

SolveResult solve_lns_lcm(const Instance& inst, double time_limit, std::uint64_t seed, ClockMode clock) {
  LnsConfig cfg;
  cfg.window = lcm_window(inst);
  cfg.time_limit = time_limit;
  cfg.seed = seed;
  cfg.clock = clock;
  SolveResult r = lns(inst, cfg);
  r.algorithm = Algorithm::LnsLcm;
  return r;
}

SolveResult solve_adaptive(const Instance& inst, double time_limit, std::uint64_t seed, ClockMode clock) {
  LnsConfig cfg;
  cfg.window = 0;
  cfg.time_limit = time_limit;
  cfg.seed = seed;
  cfg.clock = clock;
  return adaptive_lns(inst, cfg);
}

}  // namespace carseq
