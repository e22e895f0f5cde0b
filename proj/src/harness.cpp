#include "carseq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "carseq/error.hpp"
#include "carseq/exact.hpp"
#include "carseq/lns.hpp"
#include "carseq/lraco.hpp"
#include "carseq/rng.hpp"

namespace carseq {

bool BoundLedger::offer(const std::string& instance, double bound, bool certified, Algorithm algorithm,
                        std::string run_id) {
  if (!certified || !std::isfinite(bound)) return false;
  auto it = entries_.find(instance);
  if (it != entries_.end() && bound <= it->second.bound) return false;
  entries_[instance] = Entry{bound, algorithm, std::move(run_id)};
  return true;
}

std::optional<BoundLedger::Entry> BoundLedger::entry(const std::string& instance) const {
  auto it = entries_.find(instance);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double BoundLedger::bound(const std::string& instance) const {
  auto it = entries_.find(instance);
  return it == entries_.end() ? 0.0 : std::max(0.0, it->second.bound);
}

SolveResult run_algorithm(const Instance& inst, Algorithm alg, double time_limit, std::uint64_t seed,
                          ClockMode clock) {
  switch (alg) {
    case Algorithm::Exact: return solve_exact(inst, time_limit, clock);
    case Algorithm::Lazy: return solve_lazy_result(inst, time_limit, clock);
    case Algorithm::Lraco: {
      LracoConfig cfg;
      cfg.time_limit = time_limit;
      cfg.seed = seed;
      cfg.clock = clock;
      return lraco(inst, cfg);
    }
    case Algorithm::Lns10: return solve_lns10(inst, time_limit, seed, clock);
    case Algorithm::LnsLcm: return solve_lns_lcm(inst, time_limit, seed, clock);
    case Algorithm::Adaptive: return solve_adaptive(inst, time_limit, seed, clock);
  }
  throw InvalidInput("unknown algorithm");
}

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& instance, Algorithm alg, int index) {
  const std::string label = instance + "/" + std::string(algorithm_name(alg));
  return Rng(base_seed).split(label, static_cast<std::uint64_t>(index)).next_u64();
}

std::string run_id(const std::string& instance, Algorithm alg, std::uint64_t seed) {
  return instance + "/" + std::string(algorithm_name(alg)) + "/" + std::to_string(seed);
}

namespace {

int algorithm_rank(Algorithm alg) {
  return static_cast<int>(std::find(std::begin(kAllAlgorithms), std::end(kAllAlgorithms), alg) -
                          std::begin(kAllAlgorithms));
}

struct Job {
  std::size_t instance;
  Algorithm algorithm;
  int index;
  std::uint64_t seed;
};

ResultRecord run_job(const Instance& inst, const Job& job, const ExperimentConfig& cfg) {
  ResultRecord rec;
  rec.instance_name = inst.name;
  rec.algorithm = job.algorithm;
  rec.seed = job.seed;
  rec.config_digest = cfg.config_digest;
  try {
    const SolveResult r = run_algorithm(inst, job.algorithm, cfg.time_limit, job.seed, cfg.clock);
    if (r.bound_certified && r.lower_bound > r.objective) {
      throw Inconsistency("certified bound " + format_double(r.lower_bound) + " above objective " +
                          format_double(r.objective));
    }
    rec.objective = r.objective;
    rec.lower_bound = r.lower_bound;
    rec.bound_certified = r.bound_certified;
    rec.gap = r.gap;
    rec.wall_seconds = r.seconds;
  } catch (const std::exception&) {
    rec.status = RunStatus::Failed;
    rec.objective = 0.0;
    rec.lower_bound = 0.0;
    rec.bound_certified = false;
    rec.gap = 1.0;
    rec.wall_seconds = 0.0;
  }
  return rec;
}

}  // namespace

void apply_ledger(std::vector<ResultRecord>& records, BoundLedger& ledger) {
  for (const ResultRecord& r : records) {
    if (r.status == RunStatus::Ok) {
      ledger.offer(r.instance_name, r.lower_bound, r.bound_certified, r.algorithm,
                   run_id(r.instance_name, r.algorithm, r.seed));
    }
  }
  for (ResultRecord& r : records) {
    if (r.status == RunStatus::Ok) r.gap = objective_gap(r.objective, ledger.bound(r.instance_name));
  }
}

std::vector<ResultRecord> run_experiment(const std::vector<Instance>& instances, const ExperimentConfig& cfg,
                                         BoundLedger* ledger) {
  if (cfg.seeds < 1) throw InvalidInput("experiment needs at least one seed");
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return instances[a].name < instances[b].name; });
  std::vector<Algorithm> algs = cfg.algorithms;
  std::sort(algs.begin(), algs.end(), [](Algorithm a, Algorithm b) { return algorithm_rank(a) < algorithm_rank(b); });
  algs.erase(std::unique(algs.begin(), algs.end()), algs.end());

  std::vector<Job> jobs;
  for (std::size_t i : order) {
    for (Algorithm alg : algs) {
      for (int s = 0; s < cfg.seeds; ++s) {
        jobs.push_back({i, alg, s, run_seed(cfg.base_seed, instances[i].name, alg, s)});
      }
    }
  }

  std::vector<ResultRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      records[j] = run_job(instances[jobs[j].instance], jobs[j], cfg);
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  BoundLedger local;
  apply_ledger(records, ledger != nullptr ? *ledger : local);
  return records;
}

Label compare_gaps(double gap_a, double gap_b, double tolerance) {
  if (std::abs(gap_a - gap_b) < tolerance) return Label::Tie;
  return gap_a < gap_b ? Label::A : Label::B;
}

std::vector<PairLabel> label_pairs(const std::vector<ResultRecord>& records, Algorithm a, Algorithm b,
                                   double tolerance, std::vector<std::string>* warnings) {
  struct Acc {
    double sum[2] = {0.0, 0.0};
    int n[2] = {0, 0};
  };
  std::map<std::string, Acc> acc;
  for (const ResultRecord& r : records) {
    if (r.algorithm != a && r.algorithm != b) continue;
    Acc& x = acc[r.instance_name];
    if (r.status != RunStatus::Ok) continue;
    const int side = r.algorithm == a ? 0 : 1;
    x.sum[side] += r.gap;
    ++x.n[side];
  }
  std::vector<PairLabel> out;
  for (const auto& [name, x] : acc) {
    if (x.n[0] == 0 || x.n[1] == 0) {
      if (warnings != nullptr) {
        warnings->push_back("instance '" + name + "' lacks a successful " +
                            std::string(algorithm_name(x.n[0] == 0 ? a : b)) + " run; skipped");
      }
      continue;
    }
    PairLabel p;
    p.instance_name = name;
    p.gap_a = x.sum[0] / x.n[0];
    p.gap_b = x.sum[1] / x.n[1];
    p.label = compare_gaps(p.gap_a, p.gap_b, tolerance);
    out.push_back(p);
  }
  return out;
}

}  // namespace carseq
