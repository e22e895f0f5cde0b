#include "carseq/exact.hpp"

#include <algorithm>
#include <numeric>

#include "carseq/error.hpp"

namespace carseq {

void Subproblem::validate() const {
  if (instance == nullptr) throw InvalidInput("subproblem has no instance");
  const Instance& inst = *instance;
  const auto D = static_cast<std::size_t>(inst.num_cars);
  if (fixed.size() != D) throw InvalidInput("fixed sequence length differs from the instance");
  if (free_counts.size() != static_cast<std::size_t>(inst.num_classes)) {
    throw InvalidInput("free class counts must have one entry per class");
  }
  std::vector<char> is_free(D, 0);
  for (std::size_t k = 0; k < free_positions.size(); ++k) {
    const int t = free_positions[k];
    if (t < 0 || static_cast<std::size_t>(t) >= D) throw InvalidInput("free position out of range");
    if (k > 0 && free_positions[k - 1] >= t) throw InvalidInput("free positions must be strictly increasing");
    is_free[static_cast<std::size_t>(t)] = 1;
  }
  std::vector<int> used = free_counts;
  int free_total = 0;
  for (int c : free_counts) {
    if (c < 0) throw InvalidInput("negative free class count");
    free_total += c;
  }
  if (free_total != static_cast<int>(free_positions.size())) {
    throw InvalidInput("free class counts do not match the number of free positions");
  }
  for (std::size_t t = 0; t < D; ++t) {
    if (is_free[t]) continue;
    const ClassId c = fixed[t];
    if (c < 0 || c >= inst.num_classes) throw InvalidInput("fixed position holds an invalid class");
    ++used[static_cast<std::size_t>(c)];
  }
  if (used != inst.demand) throw InvalidInput("fixed and free classes do not add up to the demand");
}

Subproblem whole_problem(const Instance& inst) {
  Subproblem sub;
  sub.instance = &inst;
  sub.fixed = Sequence(std::vector<ClassId>(static_cast<std::size_t>(inst.num_cars), 0));
  sub.free_positions.resize(static_cast<std::size_t>(inst.num_cars));
  std::iota(sub.free_positions.begin(), sub.free_positions.end(), 0);
  sub.free_counts = inst.demand;
  return sub;
}

Subproblem free_positions(const Instance& inst, const Sequence& current, std::vector<int> positions) {
  check_sequence(inst, current);
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  Subproblem sub;
  sub.instance = &inst;
  sub.fixed = current;
  sub.free_counts.assign(static_cast<std::size_t>(inst.num_classes), 0);
  for (int t : positions) {
    if (t < 0 || t >= inst.num_cars) throw InvalidInput("free position out of range");
    ++sub.free_counts[static_cast<std::size_t>(current[static_cast<std::size_t>(t)])];
  }
  sub.free_positions = std::move(positions);
  return sub;
}

double subproblem_objective(const Subproblem& sub, const Sequence& seq) {
  if (sub.active && !sub.active->empty_mask()) return evaluate_masked(*sub.instance, seq, *sub.active);
  return evaluate(*sub.instance, seq).total;
}

std::uint64_t arrangement_count(const std::vector<int>& counts) {
  // Multinomial coefficient built as a product of binomials, saturating.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  std::uint64_t placed = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      ++placed;
      // result = result * placed / i, exact because each prefix is a binomial product.
      const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
      const std::uint64_t r = result / g;
      const std::uint64_t d = static_cast<std::uint64_t>(i) / g;
      const std::uint64_t p = placed / d;  // d divides placed * r and gcd(r, d) = 1
      if (r != 0 && p > kMax / r) return kMax;
      result = r * p;
    }
  }
  return result;
}

ExactResult brute_force(const Subproblem& sub, std::uint64_t cap) {
  sub.validate();
  const std::uint64_t count = arrangement_count(sub.free_counts);
  if (count > cap) {
    throw Refusal("brute force needs " + std::to_string(count) + " arrangements, above the cap of " +
                  std::to_string(cap));
  }
  std::vector<ClassId> order;
  for (std::size_t c = 0; c < sub.free_counts.size(); ++c) {
    order.insert(order.end(), static_cast<std::size_t>(sub.free_counts[c]), static_cast<ClassId>(c));
  }
  ExactResult res;
  Sequence seq = sub.fixed;
  do {
    for (std::size_t k = 0; k < order.size(); ++k) seq[static_cast<std::size_t>(sub.free_positions[k])] = order[k];
    const double obj = subproblem_objective(sub, seq);
    ++res.nodes;
    if (obj < res.objective) {
      res.objective = obj;
      res.best = seq;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  res.bound = res.objective;
  res.proven = true;
  return res;
}

namespace {

constexpr std::uint64_t kCheckEvery = 256;
// Work units per tile visited while building bound tables (binary search, sort).
constexpr int kTileCost = 8;

double tolerance(double incumbent) { return 1e-9 * std::max(1.0, std::abs(incumbent)); }

// A counted window whose last free position is decision `k` (the index it is
// filed under). Its usage is fixed_count plus the option cars placed on
// decisions first_free..k.
struct Window {
  int option;
  int first_free;
  int fixed_count;
  double over_w;
  double under_w;
};

struct Child {
  double bound;
  double marginal;
  ClassId cls;
};

struct Frame {
  std::vector<Child> kids;
  std::size_t next = 0;
  double decided = 0.0;
};

class Engine {
 public:
  explicit Engine(const Subproblem& sub)
      : sub_(sub),
        inst_(*sub.instance),
        m_(static_cast<int>(sub.free_positions.size())),
        O_(inst_.num_options),
        K_(inst_.num_classes) {
    build_windows();
    build_tables();
    rep_.resize(static_cast<std::size_t>(K_));
    for (ClassId c = 0; c < K_; ++c) {
      rep_[static_cast<std::size_t>(c)] = c;
      for (ClassId d = 0; d < c; ++d) {
        if (same_vector(c, d)) {
          rep_[static_cast<std::size_t>(c)] = d;
          break;
        }
      }
    }
    freepre_.assign(static_cast<std::size_t>(O_) * (m_ + 1), 0);
    pen0_.assign(static_cast<std::size_t>(O_), 0.0);
    pen1_.assign(static_cast<std::size_t>(O_), 0.0);
  }

  /// Work units spent building windows and bound tables.
  std::uint64_t setup_work() const { return setup_work_; }

  ExactResult run(Budget& budget, const BnbOptions& opt) {
    ExactResult res;
    reset();
    root_bound_ = constant_;
    for (int j = 0; j < O_; ++j) root_bound_ += table(j, 0, remaining_option_[static_cast<std::size_t>(j)]);

    // Initial incumbent: greedy dive, or the warm start if it is better.
    std::vector<ClassId> greedy = greedy_dive();
    incumbent_ = greedy_value_;
    best_ = greedy;
    if (opt.warm_start) {
      std::vector<ClassId> warm(static_cast<std::size_t>(m_));
      for (int k = 0; k < m_; ++k) warm[static_cast<std::size_t>(k)] = (*opt.warm_start)[static_cast<std::size_t>(sub_.free_positions[static_cast<std::size_t>(k)])];
      const double wv = value_of(warm);
      if (wv <= incumbent_) {
        incumbent_ = wv;
        best_ = warm;
      }
    }
    res.trace.push_back({budget.elapsed_seconds(), incumbent_, std::min(root_bound_, incumbent_)});

    bool exhausted = false;
    bool stopped = false;
    std::uint64_t nodes = 0;
    std::uint64_t next_check = kCheckEvery;
    if (m_ == 0) {
      exhausted = true;
    } else {
      frames_.resize(static_cast<std::size_t>(m_));
      expand(0, constant_, budget);
      int k = 0;
      for (;;) {
        if (nodes >= opt.node_limit) {
          stopped = true;
          break;
        }
        if (nodes >= next_check) {
          next_check = nodes + kCheckEvery;
          if (budget.expired()) {
            stopped = true;
            break;
          }
          if (opt.gap_tolerance > 0 && incumbent_ > 0) {
            const double gb = open_bound(k);
            if ((incumbent_ - gb) / incumbent_ <= opt.gap_tolerance) {
              stopped = true;
              break;
            }
          }
        }
        Frame& f = frames_[static_cast<std::size_t>(k)];
        const double cut = incumbent_ - tolerance(incumbent_);
        while (f.next < f.kids.size() && f.kids[f.next].bound >= cut) ++f.next;
        if (f.next == f.kids.size()) {
          if (k == 0) {
            exhausted = true;
            break;
          }
          --k;
          undo(k);
          continue;
        }
        const Child ch = f.kids[f.next++];
        ++nodes;
        assign(k, ch.cls);
        const double decided = f.decided + ch.marginal;
        if (k + 1 == m_) {
          if (decided < incumbent_ - tolerance(incumbent_)) {
            incumbent_ = decided;
            best_ = path_;
            res.trace.push_back({budget.elapsed_seconds(), incumbent_, std::min(root_bound_, incumbent_)});
          }
          undo(k);
          continue;
        }
        ++k;
        expand(k, decided, budget);
      }
      if (stopped) {
        res.bound = std::min(incumbent_, open_bound(k));
      }
    }
    if (exhausted) res.bound = incumbent_;
    res.proven = exhausted;
    res.nodes = nodes;
    res.objective = incumbent_;
    res.best = sub_.fixed;
    for (int k = 0; k < m_; ++k) {
      res.best[static_cast<std::size_t>(sub_.free_positions[static_cast<std::size_t>(k)])] = best_[static_cast<std::size_t>(k)];
    }
    // Report the evaluator's value so callers can compare with other solvers bit for bit.
    res.objective = subproblem_objective(sub_, res.best);
    res.bound = std::min(res.bound, res.objective);
    if (res.proven) res.bound = res.objective;
    res.wall_seconds = budget.elapsed_seconds();
    return res;
  }

 private:
  bool same_vector(ClassId a, ClassId b) const {
    for (int j = 0; j < O_; ++j) {
      if (inst_.needs(a, j) != inst_.needs(b, j)) return false;
    }
    return true;
  }

  void build_windows() {
    const int D = inst_.num_cars;
    std::vector<char> is_free(static_cast<std::size_t>(D), 0);
    for (int t : sub_.free_positions) is_free[static_cast<std::size_t>(t)] = 1;
    // index of the first free position >= t, for t in [0, D]
    std::vector<int> next_free(static_cast<std::size_t>(D) + 1, m_);
    for (int k = m_ - 1; k >= 0; --k) {
      const int t = sub_.free_positions[static_cast<std::size_t>(k)];
      for (int s = t; s >= 0 && next_free[static_cast<std::size_t>(s)] > k; --s) next_free[static_cast<std::size_t>(s)] = k;
    }
    attached_.assign(static_cast<std::size_t>(m_), {});
    attach_of_.assign(static_cast<std::size_t>(O_) * D, -1);
    fixed_in_.assign(static_cast<std::size_t>(O_) * D, 0);
    constant_ = 0.0;
    std::vector<int> fixed_prefix(static_cast<std::size_t>(D) + 1);
    for (int j = 0; j < O_; ++j) {
      fixed_prefix[0] = 0;
      for (int t = 0; t < D; ++t) {
        const bool car = !is_free[static_cast<std::size_t>(t)] && inst_.needs(sub_.fixed[static_cast<std::size_t>(t)], j);
        fixed_prefix[static_cast<std::size_t>(t) + 1] = fixed_prefix[static_cast<std::size_t>(t)] + (car ? 1 : 0);
      }
      const int p = inst_.capacity[static_cast<std::size_t>(j)];
      const int q = inst_.window[static_cast<std::size_t>(j)];
      for (int t = p - 1; t < D; ++t) {
        if (sub_.active && !sub_.active->active(j, t)) continue;
        const double a = inst_.over(j, t);
        const double b = inst_.under(j, t);
        if (a == 0.0 && b == 0.0) continue;
        const int lo = std::max(0, t - q + 1);
        const int fixed = fixed_prefix[static_cast<std::size_t>(t) + 1] - fixed_prefix[static_cast<std::size_t>(lo)];
        const int first = next_free[static_cast<std::size_t>(lo)];
        const int last = next_free[static_cast<std::size_t>(t) + 1] - 1;
        if (first > last) {
          constant_ += a * std::max(0, fixed - p) + b * std::max(0, p - fixed);
          continue;
        }
        attached_[static_cast<std::size_t>(last)].push_back({j, first, fixed, a, b});
        attach_of_[static_cast<std::size_t>(j) * D + t] = last;
        fixed_in_[static_cast<std::size_t>(j) * D + t] = fixed;
      }
    }
    // Window counts sorted by option keep the per-node loop cache friendly.
    for (auto& list : attached_) {
      std::stable_sort(list.begin(), list.end(), [](const Window& x, const Window& y) { return x.option < y.option; });
    }
    option_total_.assign(static_cast<std::size_t>(O_), 0);
    for (ClassId c = 0; c < K_; ++c) {
      for (int j = 0; j < O_; ++j) {
        if (inst_.needs(c, j)) option_total_[static_cast<std::size_t>(j)] += sub_.free_counts[static_cast<std::size_t>(c)];
      }
    }
  }

  // table(j, k, r): lower bound on the over-assignment penalty of option j's
  // windows filed under decisions >= k when r option cars remain to place on
  // those decisions. Uses disjoint windows tiled back from the sequence end:
  // cars outside the tiles cost nothing, each tile absorbs cars up to its
  // capacity for free, and the rest pay the tile's weight per car.
  void build_tables() {
    const int D = inst_.num_cars;
    tables_.assign(static_cast<std::size_t>(O_) * (m_ + 1), {});
    struct Tile {
      double weight;
      int room;  // free positions on decisions >= k
      int slack;
      int base_over;
    };
    std::vector<Tile> tiles;
    for (int j = 0; j < O_; ++j) {
      const int p = inst_.capacity[static_cast<std::size_t>(j)];
      const int q = inst_.window[static_cast<std::size_t>(j)];
      const int total = option_total_[static_cast<std::size_t>(j)];
      for (int k = 0; k <= m_; ++k) {
        tiles.clear();
        int inside = 0;
        for (int t = D - 1; t >= p - 1; t -= q) {
          const int owner = attach_of_[static_cast<std::size_t>(j) * D + t];
          if (owner < k) continue;
          const int lo = std::max(0, t - q + 1);
          const auto first_it = std::lower_bound(sub_.free_positions.begin(), sub_.free_positions.end(), lo);
          const int first = std::max(static_cast<int>(first_it - sub_.free_positions.begin()), k);
          const int room = owner - first + 1;
          if (room <= 0) continue;
          const int fixed = fixed_in_[static_cast<std::size_t>(j) * D + t];
          tiles.push_back({inst_.over(j, t), room, std::max(0, p - fixed), std::max(0, fixed - p)});
          inside += room;
        }
        const int outside = (m_ - k) - inside;
        const int limit = std::min(total, m_ - k);
        setup_work_ += static_cast<std::uint64_t>(kTileCost) * (tiles.size() + (D - p + 1) / q + 1) + limit + 1;
        std::vector<double>& row = tables_[static_cast<std::size_t>(j) * (m_ + 1) + k];
        row.assign(static_cast<std::size_t>(limit) + 1, 0.0);
        double base = 0.0;
        int free_room = outside;
        for (const Tile& tl : tiles) {
          base += tl.weight * tl.base_over;
          free_room += std::min(tl.slack, tl.room);
        }
        std::sort(tiles.begin(), tiles.end(), [](const Tile& x, const Tile& y) { return x.weight < y.weight; });
        std::size_t ti = 0;
        int used_in_tile = 0;
        double cost = base;
        for (int r = 0; r <= limit; ++r) {
          if (r > free_room) {
            // Place car number r on the cheapest tile with paid room left.
            while (ti < tiles.size() && used_in_tile >= tiles[ti].room - std::min(tiles[ti].slack, tiles[ti].room)) {
              ++ti;
              used_in_tile = 0;
            }
            if (ti < tiles.size()) {
              cost += tiles[ti].weight;
              ++used_in_tile;
            }
          }
          row[static_cast<std::size_t>(r)] = cost;
        }
      }
    }
  }

  double table(int j, int k, int r) const {
    const auto& row = tables_[static_cast<std::size_t>(j) * (m_ + 1) + k];
    if (row.empty()) return 0.0;
    return row[static_cast<std::size_t>(std::min<int>(r, static_cast<int>(row.size()) - 1))];
  }

  void reset() {
    remaining_ = sub_.free_counts;
    remaining_option_ = option_total_;
    std::fill(freepre_.begin(), freepre_.end(), 0);
    path_.assign(static_cast<std::size_t>(m_), -1);
  }

  int freepre(int j, int k) const { return freepre_[static_cast<std::size_t>(j) * (m_ + 1) + k]; }

  void assign(int k, ClassId c) {
    path_[static_cast<std::size_t>(k)] = c;
    --remaining_[static_cast<std::size_t>(c)];
    for (int j = 0; j < O_; ++j) {
      const int need = inst_.needs(c, j) ? 1 : 0;
      remaining_option_[static_cast<std::size_t>(j)] -= need;
      freepre_[static_cast<std::size_t>(j) * (m_ + 1) + k + 1] = freepre(j, k) + need;
    }
  }

  void undo(int k) {
    const ClassId c = path_[static_cast<std::size_t>(k)];
    ++remaining_[static_cast<std::size_t>(c)];
    for (int j = 0; j < O_; ++j) {
      if (inst_.needs(c, j)) ++remaining_option_[static_cast<std::size_t>(j)];
    }
    path_[static_cast<std::size_t>(k)] = -1;
  }

  // Penalty of decision k's windows with and without an option car placed there.
  void window_costs(int k) {
    std::fill(pen0_.begin(), pen0_.end(), 0.0);
    std::fill(pen1_.begin(), pen1_.end(), 0.0);
    for (const Window& w : attached_[static_cast<std::size_t>(k)]) {
      const int p = inst_.capacity[static_cast<std::size_t>(w.option)];
      const int u0 = w.fixed_count + freepre(w.option, k) - freepre(w.option, w.first_free);
      const int u1 = u0 + 1;
      pen0_[static_cast<std::size_t>(w.option)] += w.over_w * std::max(0, u0 - p) + w.under_w * std::max(0, p - u0);
      pen1_[static_cast<std::size_t>(w.option)] += w.over_w * std::max(0, u1 - p) + w.under_w * std::max(0, p - u1);
    }
  }

  double marginal(ClassId c) const {
    double m = 0.0;
    for (int j = 0; j < O_; ++j) m += inst_.needs(c, j) ? pen1_[static_cast<std::size_t>(j)] : pen0_[static_cast<std::size_t>(j)];
    return m;
  }

  void expand(int k, double decided, Budget& budget) {
    Frame& f = frames_[static_cast<std::size_t>(k)];
    f.kids.clear();
    f.next = 0;
    f.decided = decided;
    window_costs(k);
    budget.charge(4 * attached_[static_cast<std::size_t>(k)].size() + static_cast<std::uint64_t>(K_) * (O_ + 1) + 1);
    const double cut = incumbent_ - tolerance(incumbent_);
    std::uint64_t seen_reps = 0;  // bitmask fallback below for K > 64
    std::vector<char> seen_large;
    if (K_ > 64) seen_large.assign(static_cast<std::size_t>(K_), 0);
    for (ClassId c = 0; c < K_; ++c) {
      if (remaining_[static_cast<std::size_t>(c)] == 0) continue;
      const ClassId r = rep_[static_cast<std::size_t>(c)];
      if (K_ <= 64) {
        if (seen_reps >> r & 1U) continue;
        seen_reps |= std::uint64_t{1} << r;
      } else {
        if (seen_large[static_cast<std::size_t>(r)]) continue;
        seen_large[static_cast<std::size_t>(r)] = 1;
      }
      const double marg = marginal(c);
      double bound = decided + marg;
      for (int j = 0; j < O_; ++j) {
        bound += table(j, k + 1, remaining_option_[static_cast<std::size_t>(j)] - (inst_.needs(c, j) ? 1 : 0));
      }
      if (bound >= cut) continue;
      f.kids.push_back({bound, marg, c});
    }
    std::sort(f.kids.begin(), f.kids.end(), [](const Child& x, const Child& y) {
      return x.marginal != y.marginal ? x.marginal < y.marginal : x.cls < y.cls;
    });
  }

  // Least bound among children not yet explored, on frames 0..k.
  double open_bound(int k) const {
    double b = incumbent_;
    for (int i = 0; i <= k && i < static_cast<int>(frames_.size()); ++i) {
      const Frame& f = frames_[static_cast<std::size_t>(i)];
      for (std::size_t n = f.next; n < f.kids.size(); ++n) b = std::min(b, f.kids[n].bound);
    }
    return b;
  }

  std::vector<ClassId> greedy_dive() {
    double decided = constant_;
    for (int k = 0; k < m_; ++k) {
      window_costs(k);
      ClassId pick = -1;
      double best = 0.0;
      for (ClassId c = 0; c < K_; ++c) {
        if (remaining_[static_cast<std::size_t>(c)] == 0) continue;
        const double mg = marginal(c);
        if (pick < 0 || mg < best) {
          pick = c;
          best = mg;
        }
      }
      assign(k, pick);
      decided += best;
    }
    greedy_value_ = decided;
    std::vector<ClassId> out = path_;
    reset();
    return out;
  }

  double value_of(const std::vector<ClassId>& assignment) {
    double decided = constant_;
    for (int k = 0; k < m_; ++k) {
      window_costs(k);
      const ClassId c = assignment[static_cast<std::size_t>(k)];
      decided += marginal(c);
      assign(k, c);
    }
    reset();
    return decided;
  }

  const Subproblem& sub_;
  const Instance& inst_;
  int m_, O_, K_;
  std::vector<std::vector<Window>> attached_;
  std::vector<int> attach_of_;
  std::vector<int> fixed_in_;
  double constant_ = 0.0;
  std::vector<int> option_total_;
  std::vector<std::vector<double>> tables_;
  std::vector<ClassId> rep_;

  std::vector<int> remaining_;
  std::vector<int> remaining_option_;
  std::vector<int> freepre_;
  std::vector<double> pen0_, pen1_;
  std::vector<ClassId> path_;
  std::vector<ClassId> best_;
  std::vector<Frame> frames_;
  double incumbent_ = 0.0;
  double greedy_value_ = 0.0;
  double root_bound_ = 0.0;
  std::uint64_t setup_work_ = 0;
};

}  // namespace

ExactResult branch_and_bound(const Subproblem& sub, Budget& parent, const BnbOptions& options) {
  sub.validate();
  if (options.warm_start) {
    check_sequence(*sub.instance, *options.warm_start);
    std::vector<char> is_free(sub.fixed.size(), 0);
    for (int t : sub.free_positions) is_free[static_cast<std::size_t>(t)] = 1;
    for (std::size_t t = 0; t < sub.fixed.size(); ++t) {
      if (!is_free[t] && (*options.warm_start)[t] != sub.fixed[t]) {
        throw InvalidInput("warm start disagrees with the fixed positions");
      }
    }
  }
  Budget budget(options.time_limit, parent);
  Engine engine(sub);
  budget.charge(engine.setup_work() + static_cast<std::uint64_t>(sub.instance->num_options) * sub.instance->num_cars);
  return engine.run(budget, options);
}

ExactResult branch_and_bound(const Subproblem& sub, const BnbOptions& options) {
  Budget root(options.time_limit, options.clock);
  return branch_and_bound(sub, root, options);
}

LazyResult solve_lazy(const Instance& inst, Budget& parent, const LazyOptions& options) {
  Budget budget(options.time_limit, parent);
  LazyResult res;
  Subproblem sub = whole_problem(inst);
  sub.active = WindowMask(inst.num_options, inst.num_cars);
  std::optional<Sequence> seed;
  for (;;) {
    BnbOptions bo;
    bo.warm_start = seed;
    ExactResult master = branch_and_bound(sub, budget, bo);
    ++res.rounds;
    res.nodes += master.nodes;
    res.bound = std::max(res.bound, master.bound);
    const Evaluation full = evaluate(inst, master.best);
    budget.charge(4ULL * static_cast<std::uint64_t>(inst.num_options) * inst.num_cars);
    if (full.total < res.objective) {
      res.objective = full.total;
      res.best = master.best;
      res.trace.push_back({budget.elapsed_seconds(), res.objective, std::min(res.bound, res.objective)});
    }
    seed = res.best;
    if (full.total <= master.objective + tolerance(master.objective)) {
      // The master's solution pays nothing outside the active windows.
      res.proven = master.proven;
      break;
    }
    std::size_t added = 0;
    for (int j = 0; j < inst.num_options; ++j) {
      for (int t = 0; t < inst.num_cars; ++t) {
        if (sub.active->active(j, t)) continue;
        if (full.y(j, t) > 0 || full.z(j, t) > 0) {
          sub.active->activate(j, t);
          ++added;
        }
      }
    }
    if (added == 0 || res.rounds >= options.max_rounds || budget.expired()) break;
  }
  if (res.proven) res.bound = res.objective;
  res.bound = std::min(res.bound, res.objective);
  res.active_windows = sub.active->count();
  res.wall_seconds = budget.elapsed_seconds();
  return res;
}

LazyResult solve_lazy(const Instance& inst, const LazyOptions& options) {
  Budget root(options.time_limit, options.clock);
  return solve_lazy(inst, root, options);
}

namespace {

SolveResult to_solve_result(Algorithm alg, const ExactResult& r) {
  SolveResult out;
  out.algorithm = alg;
  out.best = r.best;
  out.objective = r.objective;
  out.lower_bound = std::max(0.0, r.bound);
  out.bound_certified = true;
  out.gap = objective_gap(out.objective, out.lower_bound);
  out.seconds = r.wall_seconds;
  out.trace = r.trace;
  return out;
}

}  // namespace

SolveResult solve_exact(const Instance& inst, double time_limit, ClockMode clock) {
  BnbOptions bo;
  bo.time_limit = time_limit;
  bo.clock = clock;
  return to_solve_result(Algorithm::Exact, branch_and_bound(whole_problem(inst), bo));
}

SolveResult solve_lazy_result(const Instance& inst, double time_limit, ClockMode clock) {
  LazyOptions lo;
  lo.time_limit = time_limit;
  lo.clock = clock;
  return to_solve_result(Algorithm::Lazy, solve_lazy(inst, lo));
}

}  // namespace carseq
