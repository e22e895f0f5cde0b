#include "carseq/lraco.hpp"

#include <algorithm>
#include <cmath>

#include "carseq/error.hpp"
#include "carseq/kernels.hpp"

namespace carseq {

int RelaxedSolution::load(int t) const {
  int n = 0;
  for (ClassId i = 0; i < num_classes; ++i) n += at(t, i) ? 1 : 0;
  return n;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Work units per (position, class or option) step of one ant: sampling plus evaluation.
constexpr std::uint64_t kAntCost = 6;

double tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

void check_lambda(const Instance& inst, std::span<const double> lambda) {
  if (lambda.size() != static_cast<std::size_t>(inst.num_cars)) {
    throw InvalidInput("multiplier vector length differs from the number of cars");
  }
}

// Position-major search over x[t][i]. Decision d = t * K + i.
class RelaxedEngine {
 public:
  RelaxedEngine(const Instance& inst, std::span<const double> lambda)
      : inst_(inst), lambda_(lambda), D_(inst.num_cars), K_(inst.num_classes), O_(inst.num_options) {
    constant_ = 0.0;
    for (double l : lambda_) constant_ -= l;
    // suffix_[s][r]: sum of the r smallest multipliers among positions s..D-1.
    suffix_.assign(static_cast<std::size_t>(D_) + 1, {});
    suffix_[static_cast<std::size_t>(D_)] = {0.0};
    std::vector<double> sorted;
    for (int s = D_ - 1; s >= 0; --s) {
      sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), lambda_[static_cast<std::size_t>(s)]),
                    lambda_[static_cast<std::size_t>(s)]);
      auto& row = suffix_[static_cast<std::size_t>(s)];
      row.resize(sorted.size() + 1);
      row[0] = 0.0;
      for (std::size_t r = 0; r < sorted.size(); ++r) row[r + 1] = row[r] + sorted[r];
    }
    frames_.resize(static_cast<std::size_t>(D_) * K_);
    reset();
  }

  RelaxedSolution run(std::uint64_t node_budget, Budget& budget) {
    RelaxedSolution out;
    out.num_cars = D_;
    out.num_classes = K_;

    // Dive along the preferred children for a first incumbent.
    const int depth = D_ * K_;
    for (int d = 0; d < depth; ++d) {
      open(d);
      apply(d, frames_[static_cast<std::size_t>(d)].vals[0]);
    }
    incumbent_ = decided_ + constant_;
    best_ = x_;
    budget.charge(static_cast<std::uint64_t>(depth) * (O_ + 2));
    reset();

    bool exhausted = false;
    std::uint64_t nodes = 0;
    std::uint64_t next_check = 256;
    int d = 0;
    open(0);
    for (;;) {
      if (nodes >= node_budget) break;
      if (nodes >= next_check) {
        next_check = nodes + 256;
        if (budget.expired()) break;
      }
      Frame& f = frames_[static_cast<std::size_t>(d)];
      const double cut = incumbent_ - tolerance(incumbent_);
      while (f.tried < f.n && f.bounds[f.tried] >= cut) ++f.tried;
      if (f.tried == f.n) {
        if (d == 0) {
          exhausted = true;
          break;
        }
        --d;
        undo(d);
        continue;
      }
      const std::uint8_t v = f.vals[f.tried++];
      ++nodes;
      budget.charge(static_cast<std::uint64_t>(O_) + 2);
      apply(d, v);
      if (d + 1 == depth) {
        const double total = decided_ + constant_;
        if (total < incumbent_ - tolerance(incumbent_)) {
          incumbent_ = total;
          best_ = x_;
        }
        undo(d);
        continue;
      }
      ++d;
      open(d);
    }
    out.x = best_;
    out.found = incumbent_;
    out.certified = exhausted;
    out.nodes = nodes;
    if (exhausted) {
      out.value = incumbent_;
    } else {
      double b = incumbent_;
      for (int i = 0; i <= d; ++i) {
        const Frame& f = frames_[static_cast<std::size_t>(i)];
        for (int k = f.tried; k < f.n; ++k) b = std::min(b, f.bounds[k]);
      }
      out.value = b;
    }
    return out;
  }

 private:
  struct Frame {
    double decided_before = 0.0;
    double lb_before = 0.0;
    double bounds[2] = {0.0, 0.0};
    double adds[2] = {0.0, 0.0};
    double lbs[2] = {0.0, 0.0};
    std::uint8_t vals[2] = {0, 0};
    int n = 0;
    int tried = 0;
  };

  double lam_bound(int s, int r) const {
    const auto& row = suffix_[static_cast<std::size_t>(s)];
    if (r >= static_cast<int>(row.size())) return kInf;
    return row[static_cast<std::size_t>(r)];
  }

  void reset() {
    x_.assign(static_cast<std::size_t>(D_) * K_, 0);
    rem_ = inst_.demand;
    cnt_.assign(static_cast<std::size_t>(D_) * O_, 0);
    pre_.assign(static_cast<std::size_t>(O_) * (D_ + 1), 0);
    decided_ = 0.0;
    lb_sum_ = 0.0;
    for (ClassId i = 0; i < K_; ++i) lb_sum_ += lam_bound(0, rem_[static_cast<std::size_t>(i)]);
  }

  // Penalty of the windows ending at t when position t finally carries
  // cnt_[t] plus `extra` cars of class i.
  double completion_cost(int t, ClassId i, int extra) const {
    double cost = 0.0;
    for (int j = 0; j < O_; ++j) {
      const int p = inst_.capacity[static_cast<std::size_t>(j)];
      if (t < p - 1) continue;
      const int q = inst_.window[static_cast<std::size_t>(j)];
      const int lo = std::max(0, t - q + 1);
      const int here = cnt_[static_cast<std::size_t>(t) * O_ + j] + (extra != 0 && inst_.needs(i, j) ? 1 : 0);
      const int usage = pre_[static_cast<std::size_t>(j) * (D_ + 1) + t] - pre_[static_cast<std::size_t>(j) * (D_ + 1) + lo] + here;
      cost += inst_.over(j, t) * std::max(0, usage - p) + inst_.under(j, t) * std::max(0, p - usage);
    }
    return cost;
  }

  void open(int d) {
    Frame& f = frames_[static_cast<std::size_t>(d)];
    const int t = d / K_;
    const ClassId i = d % K_;
    const int rem = rem_[static_cast<std::size_t>(i)];
    f.decided_before = decided_;
    f.lb_before = lb_sum_;
    f.n = 0;
    f.tried = 0;
    auto add_child = [&](std::uint8_t v) {
      double add = v * lambda_[static_cast<std::size_t>(t)];
      if (i == K_ - 1) add += completion_cost(t, i, v);
      const double lb = lb_sum_ - lam_bound(t, rem) + lam_bound(t + 1, rem - v);
      f.vals[f.n] = v;
      f.adds[f.n] = add;
      f.lbs[f.n] = lb;
      f.bounds[f.n] = decided_ + add + lb + constant_;
      ++f.n;
    };
    if (rem == 0) {
      add_child(0);
    } else if (rem == D_ - t) {
      add_child(1);
    } else {
      // Prefer the value keeping the class on its proportional schedule.
      const double target = static_cast<double>(inst_.demand[static_cast<std::size_t>(i)]) * (t + 1) / D_;
      const int placed = inst_.demand[static_cast<std::size_t>(i)] - rem;
      const std::uint8_t first = placed < target ? 1 : 0;
      add_child(first);
      add_child(static_cast<std::uint8_t>(1 - first));
      if (f.bounds[1] < f.bounds[0]) {
        std::swap(f.vals[0], f.vals[1]);
        std::swap(f.adds[0], f.adds[1]);
        std::swap(f.lbs[0], f.lbs[1]);
        std::swap(f.bounds[0], f.bounds[1]);
      }
    }
  }

  void apply(int d, std::uint8_t v) {
    Frame& f = frames_[static_cast<std::size_t>(d)];
    const int k = v == f.vals[0] ? 0 : 1;
    const int t = d / K_;
    const ClassId i = d % K_;
    chosen_at(d) = v;
    decided_ = f.decided_before + f.adds[k];
    lb_sum_ = f.lbs[k];
    if (v) {
      x_[static_cast<std::size_t>(d)] = 1;
      --rem_[static_cast<std::size_t>(i)];
      for (int j = 0; j < O_; ++j) {
        if (inst_.needs(i, j)) ++cnt_[static_cast<std::size_t>(t) * O_ + j];
      }
    }
    if (i == K_ - 1) {
      for (int j = 0; j < O_; ++j) {
        const std::size_t base = static_cast<std::size_t>(j) * (D_ + 1);
        pre_[base + t + 1] = pre_[base + t] + cnt_[static_cast<std::size_t>(t) * O_ + j];
      }
    }
  }

  void undo(int d) {
    const Frame& f = frames_[static_cast<std::size_t>(d)];
    const int t = d / K_;
    const ClassId i = d % K_;
    if (chosen_at(d)) {
      x_[static_cast<std::size_t>(d)] = 0;
      ++rem_[static_cast<std::size_t>(i)];
      for (int j = 0; j < O_; ++j) {
        if (inst_.needs(i, j)) --cnt_[static_cast<std::size_t>(t) * O_ + j];
      }
    }
    decided_ = f.decided_before;
    lb_sum_ = f.lb_before;
  }

  std::uint8_t& chosen_at(int d) {
    if (chosen_.size() != frames_.size()) chosen_.assign(frames_.size(), 0);
    return chosen_[static_cast<std::size_t>(d)];
  }

  const Instance& inst_;
  std::span<const double> lambda_;
  int D_, K_, O_;
  double constant_ = 0.0;
  std::vector<std::vector<double>> suffix_;
  std::vector<Frame> frames_;
  std::vector<std::uint8_t> chosen_;

  std::vector<std::uint8_t> x_;
  std::vector<int> rem_;
  std::vector<int> cnt_;
  std::vector<int> pre_;
  double decided_ = 0.0;
  double lb_sum_ = 0.0;
  double incumbent_ = kInf;
  std::vector<std::uint8_t> best_;
};

}  // namespace

double relaxed_objective(const Instance& inst, std::span<const double> lambda, const RelaxedSolution& x) {
  check_lambda(inst, lambda);
  const int D = inst.num_cars;
  double total = 0.0;
  std::vector<int> pre(static_cast<std::size_t>(D) + 1);
  for (int j = 0; j < inst.num_options; ++j) {
    pre[0] = 0;
    for (int t = 0; t < D; ++t) {
      int here = 0;
      for (ClassId i = 0; i < inst.num_classes; ++i) here += x.at(t, i) && inst.needs(i, j) ? 1 : 0;
      pre[static_cast<std::size_t>(t) + 1] = pre[static_cast<std::size_t>(t)] + here;
    }
    const int p = inst.capacity[static_cast<std::size_t>(j)];
    const int q = inst.window[static_cast<std::size_t>(j)];
    for (int t = p - 1; t < D; ++t) {
      const int usage = pre[static_cast<std::size_t>(t) + 1] - pre[static_cast<std::size_t>(std::max(0, t - q + 1))];
      total += inst.over(j, t) * std::max(0, usage - p) + inst.under(j, t) * std::max(0, p - usage);
    }
  }
  for (int t = 0; t < D; ++t) total += lambda[static_cast<std::size_t>(t)] * (x.load(t) - 1);
  return total;
}

RelaxedSolution as_relaxed(const Instance& inst, const Sequence& seq) {
  check_sequence(inst, seq);
  RelaxedSolution r;
  r.num_cars = inst.num_cars;
  r.num_classes = inst.num_classes;
  r.x.assign(static_cast<std::size_t>(inst.num_cars) * inst.num_classes, 0);
  for (int t = 0; t < inst.num_cars; ++t) {
    r.x[static_cast<std::size_t>(t) * inst.num_classes + seq[static_cast<std::size_t>(t)]] = 1;
  }
  return r;
}

RelaxedSolution solve_relaxed(const Instance& inst, std::span<const double> lambda, std::uint64_t node_budget,
                              Budget& budget) {
  check_lambda(inst, lambda);
  RelaxedEngine engine(inst, lambda);
  return engine.run(node_budget, budget);
}

RelaxedSolution solve_relaxed(const Instance& inst, std::span<const double> lambda, std::uint64_t node_budget) {
  Budget unlimited;
  return solve_relaxed(inst, lambda, node_budget, unlimited);
}

Sequence repair(const Instance& inst, const RelaxedSolution& x) {
  const int D = inst.num_cars;
  const int K = inst.num_classes;
  std::vector<std::vector<ClassId>> held(static_cast<std::size_t>(D));
  std::vector<int> per_class(static_cast<std::size_t>(K), 0);
  for (int t = 0; t < D; ++t) {
    for (ClassId i = 0; i < K; ++i) {
      if (x.at(t, i)) {
        held[static_cast<std::size_t>(t)].push_back(i);
        ++per_class[static_cast<std::size_t>(i)];
      }
    }
  }
  if (per_class != inst.demand) throw InvalidInput("multi-assignment does not respect class demands");
  for (int t = 0; t < D; ++t) {
    auto& here = held[static_cast<std::size_t>(t)];
    while (here.size() >= 2) {
      // Nearest empty position, scanning outwards with the left side first.
      int target = -1;
      for (int dist = 1; dist < D && target < 0; ++dist) {
        if (t - dist >= 0 && held[static_cast<std::size_t>(t - dist)].empty()) {
          target = t - dist;
        } else if (t + dist < D && held[static_cast<std::size_t>(t + dist)].empty()) {
          target = t + dist;
        }
      }
      held[static_cast<std::size_t>(target)].push_back(here.back());  // classes are ascending; back is highest
      here.pop_back();
    }
  }
  Sequence out(std::vector<ClassId>(static_cast<std::size_t>(D)));
  for (int t = 0; t < D; ++t) out[static_cast<std::size_t>(t)] = held[static_cast<std::size_t>(t)].front();
  return out;
}

void update_multipliers(LagrangianState& state, const RelaxedSolution& x, double llr) {
  double norm = 0.0;
  for (int t = 0; t < x.num_cars; ++t) {
    const double g = x.load(t) - 1;
    norm += g * g;
  }
  if (norm == 0.0) return;
  const double step = state.gamma * (state.best_upper - llr) / norm;
  for (int t = 0; t < x.num_cars; ++t) state.lambda[static_cast<std::size_t>(t)] += step * (x.load(t) - 1);
}

Sequence aco_improve(const Instance& inst, Pheromone& tau, const Sequence& seed, int iterations, Rng& rng,
                     const AcoParams& params, Budget& budget) {
  check_sequence(inst, seed);
  const int D = inst.num_cars;
  const int K = inst.num_classes;
  Sequence best = seed;
  double best_obj = evaluate(inst, seed).total;
  Sequence ant(std::vector<ClassId>(static_cast<std::size_t>(D)));
  Sequence iter_best;
  std::vector<int> rem;
  std::vector<double> weight(static_cast<std::size_t>(K));
  for (int it = 0; it < iterations && best_obj > 0.0; ++it) {
    if (budget.expired()) break;
    double iter_obj = kInf;
    for (int a = 0; a < params.ants; ++a) {
      rem = inst.demand;
      for (int t = 0; t < D; ++t) {
        double total = 0.0;
        for (ClassId i = 0; i < K; ++i) {
          weight[static_cast<std::size_t>(i)] = rem[static_cast<std::size_t>(i)] > 0 ? tau.at(t, i) : 0.0;
          total += weight[static_cast<std::size_t>(i)];
        }
        double pick = rng.uniform() * total;
        ClassId chosen = -1;
        for (ClassId i = 0; i < K; ++i) {
          if (weight[static_cast<std::size_t>(i)] <= 0.0) continue;
          chosen = i;  // last class with cars left absorbs rounding
          if (pick < weight[static_cast<std::size_t>(i)]) break;
          pick -= weight[static_cast<std::size_t>(i)];
        }
        ant[static_cast<std::size_t>(t)] = chosen;
        --rem[static_cast<std::size_t>(chosen)];
      }
      const double obj = evaluate(inst, ant).total;
      budget.charge(kAntCost * static_cast<std::uint64_t>(D) * (K + inst.num_options));
      if (obj < iter_obj) {
        iter_obj = obj;
        iter_best = ant;
      }
    }
    if (iter_obj < best_obj) {
      best_obj = iter_obj;
      best = iter_best;
    }
    kernels::evaporate(tau.tau, 1.0 - params.evaporation, params.tau_min);
    for (int t = 0; t < D; ++t) tau.at(t, iter_best[static_cast<std::size_t>(t)]) += 1.0 / (1.0 + iter_obj);
    for (int t = 0; t < D; ++t) tau.at(t, best[static_cast<std::size_t>(t)]) += 1.0 / (1.0 + best_obj);
  }
  return best;
}

Sequence aco_improve(const Instance& inst, Pheromone& tau, const Sequence& seed, int iterations, Rng& rng,
                     const AcoParams& params) {
  Budget unlimited;
  return aco_improve(inst, tau, seed, iterations, rng, params, unlimited);
}

SolveResult lraco(const Instance& inst, const LracoConfig& cfg) {
  Budget budget(cfg.time_limit, cfg.clock);
  Rng rng(cfg.seed);
  SolveResult res;
  res.algorithm = Algorithm::Lraco;

  LagrangianState st;
  st.lambda.assign(static_cast<std::size_t>(inst.num_cars), 0.0);
  st.gamma = cfg.gamma_init;
  Pheromone tau(inst.num_cars, inst.num_classes, cfg.aco.tau_init);
  Sequence best;
  bool certified_any = false;

  {
    Budget loop(cfg.time_limit * (1.0 - cfg.final_share), budget);
    while (st.gamma > cfg.gamma_floor && st.gap > cfg.gap_target && st.iteration < cfg.max_iterations &&
           !loop.expired()) {
      const RelaxedSolution x = solve_relaxed(inst, st.lambda, cfg.node_budget, loop);
      const Sequence pi = repair(inst, x);
      const double obj = evaluate(inst, pi).total;
      loop.charge(static_cast<std::uint64_t>(inst.num_cars) * inst.num_options);

      // UpdateBest: incumbent, then the step-size schedule on LB*.
      if (obj < st.best_upper) {
        st.best_upper = obj;
        best = pi;
        res.trace.push_back({budget.elapsed_seconds(), obj, std::max(0.0, st.best_lower)});
      }
      // LB* moves only on certified relaxed optima; an uncertified solve still
      // supplies a valid LLR for the subgradient step.
      const double llr = x.value;
      const double needed = st.best_lower + cfg.improve_threshold * std::max(1.0, std::abs(st.best_lower));
      if (x.certified && (!std::isfinite(st.best_lower) || llr > needed)) {
        st.stall = 0;
      } else if (++st.stall >= cfg.stall_iterations) {
        st.gamma /= 2.0;
        st.stall = 0;
      }
      if (x.certified) {
        certified_any = true;
        st.best_lower = std::max(st.best_lower, llr);
      }

      update_multipliers(st, x, llr);
      st.gap = st.best_upper > 0 ? (st.best_upper - st.best_lower) / st.best_upper : 0.0;  // inf while LB* = -inf
      ++st.iteration;
    }
  }
  if (best.size() == 0) {
    // No iteration ran; fall back to one unbudgeted-in-nodes dive.
    Budget none(0.0, budget);
    best = repair(inst, solve_relaxed(inst, st.lambda, 0, none));
    st.best_upper = evaluate(inst, best).total;
    res.trace.push_back({budget.elapsed_seconds(), st.best_upper, 0.0});
  }

  // Final ACO on the converged pheromone, biased towards the best sequence.
  for (int t = 0; t < inst.num_cars; ++t) tau.at(t, best[static_cast<std::size_t>(t)]) += cfg.aco.bias_deposit;
  const Sequence improved = aco_improve(inst, tau, best, cfg.final_iterations, rng, cfg.aco, budget);
  const double improved_obj = evaluate(inst, improved).total;
  if (improved_obj < st.best_upper) {
    st.best_upper = improved_obj;
    best = improved;
    res.trace.push_back({budget.elapsed_seconds(), improved_obj, std::max(0.0, st.best_lower)});
  }

  res.best = best;
  res.objective = st.best_upper;
  res.bound_certified = certified_any;
  res.lower_bound = certified_any ? std::max(0.0, std::min(st.best_lower, st.best_upper)) : 0.0;
  res.gap = objective_gap(res.objective, res.lower_bound);
  res.seconds = budget.elapsed_seconds();
  return res;
}

}  // namespace carseq
