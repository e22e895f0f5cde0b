#include "carseq/generator.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "carseq/error.hpp"
#include "carseq/features.hpp"
#include "carseq/rng.hpp"

namespace carseq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Band kHigh{0.90, true, 1.00, true};
const Band kMedium{0.70, true, 0.80, true};
const Band kLow{0.50, true, 0.60, true};
const Band kAtMostFull{0.0, true, 1.00, true};
const Band kAboveHalf{0.50, false, kInf, true};
const Band kAny{0.0, true, kInf, true};

Band very_low(double floor) { return Band{floor, true, 0.60, false}; }

std::string band_text(const Band& b) {
  auto num = [](double v) { return v == kInf ? std::string("inf") : std::to_string(v).substr(0, 4); };
  return std::string(b.lo_closed ? "[" : "(") + num(b.lo) + ", " + num(b.hi) + (b.hi_closed ? "]" : ")");
}

using Vector = std::vector<std::uint8_t>;

std::vector<Vector> draw_class_vectors(const FamilyParams& fp, const std::vector<int>& p,
                                       const std::vector<int>& q, std::uint64_t retry_limit,
                                       Rng& rng) {
  std::set<Vector> seen;
  std::vector<Vector> out;
  Vector v(static_cast<std::size_t>(fp.options));
  for (std::uint64_t draw = 0; draw < retry_limit; ++draw) {
    bool any = false;
    for (int j = 0; j < fp.options; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      v[idx] = rng.bernoulli(static_cast<double>(p[idx]) / q[idx]) ? 1 : 0;
      any = any || v[idx] != 0;
    }
    if (!any || !seen.insert(v).second) continue;
    out.push_back(v);
    if (static_cast<int>(out.size()) == fp.classes) return out;
  }
  throw GenerationFailure(std::string(fp.name) + ": could not draw " + std::to_string(fp.classes) +
                          " distinct class vectors within " + std::to_string(retry_limit) + " draws");
}

// Uniform composition of n into k nonnegative parts: choose k-1 bar slots among n+k-1.
std::vector<int> random_composition(int n, int k, Rng& rng) {
  if (k == 1) return {n};
  const int slots = n + k - 1;
  std::vector<int> bars;
  std::set<int> chosen;
  // Floyd's algorithm for a uniform (k-1)-subset.
  for (int j = slots - (k - 1); j < slots; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  bars.assign(chosen.begin(), chosen.end());
  std::vector<int> parts;
  int prev = -1;
  for (int b : bars) {
    parts.push_back(b - prev - 1);
    prev = b;
  }
  parts.push_back(slots - prev - 1);
  return parts;
}

bool biased_reject(Bias bias, int class_options, int options, Rng& rng) {
  const double frac = static_cast<double>(class_options) / options;
  switch (bias) {
    case Bias::None: return false;
    case Bias::Negative: return rng.bernoulli(frac);
    case Bias::Positive: return rng.bernoulli(1.0 - frac);
  }
  return false;
}

std::vector<int> draw_population(const FamilyParams& fp, int n, const std::vector<int>& class_options,
                                 Rng& rng) {
  const int k = fp.classes;
  if (fp.population == Population::RandomComposition && fp.bias == Bias::None) {
    // Uniform over compositions with no empty class: shift a composition of n - k by one.
    auto parts = random_composition(n - k, k, rng);
    for (int& c : parts) ++c;
    return parts;
  }
  // Per-car draws, proposing classes uniformly or from a random composition.
  std::vector<double> cumulative;
  if (fp.population == Population::RandomComposition) {
    const auto weights = random_composition(n, k, rng);
    double acc = 0.0;
    for (int w : weights) cumulative.push_back(acc += w);
  }
  auto propose = [&]() -> int {
    if (cumulative.empty()) return static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    const double x = rng.uniform() * cumulative.back();
    return static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
  };
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int car = 0; car < n; ++car) {
    int c = propose();
    while (biased_reject(fp.bias, class_options[static_cast<std::size_t>(c)], fp.options, rng)) c = propose();
    ++counts[static_cast<std::size_t>(c)];
  }
  return counts;
}


// Inclusive range of option demands T whose utilisation lies in the band.
// Utilisation is nondecreasing in T, so the admissible set is an interval.
struct Range {
  std::int64_t lo = 1;
  std::int64_t hi = 0;
};

Range allowed_demand(const Band& band, int p, int q, int n) {
  Range r;
  r.lo = n + 1;
  r.hi = -1;
  for (std::int64_t t = 0; t <= n; ++t) {
    if (!band.contains(static_cast<double>(min_accommodating_length(p, q, t)) / n)) continue;
    r.lo = std::min(r.lo, t);
    r.hi = t;
  }
  return r;
}

std::int64_t distance(std::int64_t t, const Range& r) {
  if (t < r.lo) return r.lo - t;
  if (t > r.hi) return t - r.hi;
  return 0;
}

std::vector<std::int64_t> demands(const std::vector<Vector>& vectors, const std::vector<int>& counts) {
  std::vector<std::int64_t> t(vectors.front().size(), 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) t[j] += vectors[i][j] ? counts[i] : 0;
  }
  return t;
}

// Band distance summed over options, plus a heavy charge per empty class.
std::int64_t violation(const std::vector<Vector>& vectors, const std::vector<int>& counts,
                       const std::vector<Range>& allowed) {
  std::int64_t v = 0;
  for (int c : counts) v += c == 0 ? 1'000'000 : 0;
  const auto t = demands(vectors, counts);
  for (std::size_t j = 0; j < t.size(); ++j) v += distance(t[j], allowed[j]);
  return v;
}

// Necessary conditions for some population with every class nonempty to fit
// the ranges; vector sets failing them are skipped without drawing populations.
bool possibly_feasible(const std::vector<Vector>& vectors, int n, const std::vector<Range>& allowed) {
  const auto k = static_cast<std::int64_t>(vectors.size());
  std::int64_t total_options = 0, fewest = std::numeric_limits<std::int64_t>::max(), most = 0;
  for (const auto& v : vectors) {
    const std::int64_t c = std::count(v.begin(), v.end(), 1);
    total_options += c;
    fewest = std::min(fewest, c);
    most = std::max(most, c);
  }
  std::int64_t sum_lo = 0, sum_hi = 0;
  for (std::size_t j = 0; j < allowed.size(); ++j) {
    std::int64_t holders = 0;
    for (const auto& v : vectors) holders += v[j];
    // Each holder class contributes at least one car; non-holders keep at least one car away.
    if (holders > allowed[j].hi || n - (k - holders) < allowed[j].lo) return false;
    sum_lo += allowed[j].lo;
    sum_hi += allowed[j].hi;
  }
  const std::int64_t spare = n - k;
  return total_options + spare * fewest <= sum_hi && total_options + spare * most >= sum_lo;
}

// Moves single cars between classes until every class is populated and every
// option demand sits inside its admissible range. Each step takes the best move
// aimed at one defect, breaking ties at random; local minima get a random kick.
bool repair_population(const std::vector<Vector>& vectors, std::vector<int>& counts,
                       const std::vector<Range>& allowed, int max_moves, Rng& rng) {
  const std::size_t K = counts.size();
  const std::size_t O = allowed.size();
  auto t = demands(vectors, counts);
  auto option_cost = [&](std::size_t j, std::int64_t value) { return distance(value, allowed[j]); };
  auto move_delta = [&](std::size_t from, std::size_t to) {
    std::int64_t d = 0;
    for (std::size_t j = 0; j < O; ++j) {
      const int change = static_cast<int>(vectors[to][j]) - static_cast<int>(vectors[from][j]);
      if (change != 0) d += option_cost(j, t[j] + change) - option_cost(j, t[j]);
    }
    return d;
  };
  auto apply = [&](std::size_t from, std::size_t to) {
    for (std::size_t j = 0; j < O; ++j) {
      t[j] += static_cast<int>(vectors[to][j]) - static_cast<int>(vectors[from][j]);
    }
    --counts[from];
    ++counts[to];
  };
  std::vector<std::size_t> defects;
  std::vector<std::pair<std::size_t, std::size_t>> ties;
  int kicks = 0;
  constexpr int kMaxKicks = 200;
  for (int step = 0; step < max_moves; ++step) {
    std::size_t empty = K;
    for (std::size_t i = 0; i < K && empty == K; ++i) {
      if (counts[i] == 0) empty = i;
    }
    defects.clear();
    for (std::size_t j = 0; j < O; ++j) {
      if (option_cost(j, t[j]) > 0) defects.push_back(j);
    }
    if (empty == K && defects.empty()) return true;

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    ties.clear();
    auto consider = [&](std::size_t from, std::size_t to) {
      const auto d = move_delta(from, to);
      if (d < best) {
        best = d;
        ties.clear();
      }
      if (d == best) ties.emplace_back(from, to);
    };
    const std::size_t j = empty == K ? defects[rng.below(defects.size())] : O;
    const bool too_high = j < O && t[j] > allowed[j].hi;
    for (std::size_t from = 0; from < K; ++from) {
      if (counts[from] < 2) continue;
      if (empty != K) {
        consider(from, empty);
        continue;
      }
      if ((vectors[from][j] != 0) != too_high) continue;
      for (std::size_t to = 0; to < K; ++to) {
        if ((vectors[to][j] != 0) != too_high) consider(from, to);
      }
    }
    if (ties.empty()) return false;
    if (empty == K && best >= 0) {
      // Stuck: take a random move that touches the defect.
      if (++kicks > kMaxKicks) return false;
    }
    const auto [from, to] = ties[rng.below(ties.size())];
    apply(from, to);
  }
  return false;
}

}  // namespace

FamilyParams family_params(Family family, double low_floor) {
  const auto base = [&](std::string_view name, int o, int k, int pmin, int pmax, int gmin, int gmax,
                        Band band, Bias bias, Population pop) {
    return FamilyParams{family, name, o, k, pmin, pmax, gmin, gmax, {}, {}, band, bias, pop};
  };
  using P = Population;
  switch (family) {
    case Family::Nobhiu: return base("nobhiu", 5, 25, 1, 3, 1, 2, kHigh, Bias::None, P::PerCarUniform);
    case Family::Negbhiu: return base("negbhiu", 5, 25, 1, 3, 1, 2, kHigh, Bias::Negative, P::PerCarUniform);
    case Family::Posbhiu: return base("posbhiu", 5, 25, 1, 3, 1, 2, kHigh, Bias::Positive, P::PerCarUniform);
    case Family::Hipqhiu: return base("hipqhiu", 5, 25, 2, 4, 1, 2, kHigh, Bias::None, P::PerCarUniform);
    case Family::Hipqmedu: return base("hipqmedu", 5, 25, 2, 4, 1, 2, kMedium, Bias::None, P::PerCarUniform);
    case Family::Negbhipqlou:
      return base("negbhipqlou", 5, 25, 2, 4, 1, 2, kLow, Bias::Negative, P::PerCarUniform);
    case Family::Lopq820: return base("lopq820", 8, 20, 1, 2, 2, 3, kAtMostFull, Bias::None, P::PerCarUniform);
    case Family::Negbfixedpq: {
      auto fp = base("negbfixedpq", 5, 25, 1, 3, 1, 2, kAtMostFull, Bias::Negative, P::PerCarUniform);
      fp.fixed_p = {3, 2, 1, 2, 1};
      fp.fixed_q = {4, 3, 4, 5, 2};
      return fp;
    }
    case Family::RandN: return base("randN", 5, 25, 1, 3, 1, 2, kHigh, Bias::None, P::RandomComposition);
    case Family::Rlou: return base("Rlou", 5, 25, 1, 3, 1, 2, kAboveHalf, Bias::None, P::RandomComposition);
    case Family::Ranyu10o: return base("Ranyu10o", 10, 25, 1, 3, 1, 2, kAny, Bias::None, P::RandomComposition);
    case Family::Rnegbvlou10o:
      return base("Rnegbvlou10o", 10, 25, 1, 3, 1, 2, very_low(low_floor), Bias::Negative, P::RandomComposition);
    case Family::Rnegbhipqvlou10o:
      return base("Rnegbhipqvlou10o", 10, 25, 2, 4, 1, 2, very_low(low_floor), Bias::Negative,
                  P::RandomComposition);
    case Family::Rnegblopqvlou10o:
      return base("Rnegblopqvlou10o", 10, 25, 1, 2, 2, 3, very_low(low_floor), Bias::Negative,
                  P::RandomComposition);
  }
  throw InvalidInput("unknown family");
}

const std::array<Family, kFamilyCount>& all_families() {
  static const std::array<Family, kFamilyCount> families = {
      Family::Nobhiu,      Family::Negbhiu,      Family::Posbhiu,          Family::Hipqhiu,
      Family::Hipqmedu,    Family::Negbhipqlou,  Family::Lopq820,          Family::Negbfixedpq,
      Family::RandN,       Family::Rlou,         Family::Ranyu10o,         Family::Rnegbvlou10o,
      Family::Rnegbhipqvlou10o, Family::Rnegblopqvlou10o};
  return families;
}

std::string_view family_name(Family family) { return family_params(family).name; }

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : all_families()) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

Instance generate(const GeneratorSpec& spec) {
  const FamilyParams fp = family_params(spec.family, spec.low_floor);
  const int n = spec.num_cars;
  if (n < fp.classes) {
    throw GenerationFailure(std::string(fp.name) + ": " + std::to_string(n) + " cars cannot fill " +
                            std::to_string(fp.classes) + " classes");
  }
  Rng rng(spec.seed);
  const auto O = static_cast<std::size_t>(fp.options);
  std::vector<int> p(O), q(O);
  std::vector<Range> allowed(O);
  for (int attempt = 0; attempt < spec.instance_attempts; ++attempt) {
    if (!fp.fixed_p.empty()) {
      p = fp.fixed_p;
      q = fp.fixed_q;
    } else {
      for (std::size_t j = 0; j < O; ++j) {
        p[j] = rng.between(fp.p_min, fp.p_max);
        q[j] = p[j] + rng.between(fp.gap_min, fp.gap_max);
      }
    }
    if (*std::max_element(q.begin(), q.end()) > n) continue;
    bool reachable = true;
    for (std::size_t j = 0; j < O && reachable; ++j) {
      allowed[j] = allowed_demand(fp.band, p[j], q[j], n);
      reachable = allowed[j].lo <= allowed[j].hi;
    }
    if (!reachable) continue;

    const auto vectors = draw_class_vectors(fp, p, q, spec.retry_limit, rng);
    std::vector<int> class_options;
    for (const auto& v : vectors) class_options.push_back(static_cast<int>(std::count(v.begin(), v.end(), 1)));

    if (!possibly_feasible(vectors, n, allowed)) continue;

    std::vector<int> counts;
    bool found = false;
    for (int pop_try = 0; pop_try < spec.population_attempts && !found; ++pop_try) {
      counts = draw_population(fp, n, class_options, rng);
      found = violation(vectors, counts, allowed) == 0;
    }
    if (!found && spec.repair_moves > 0) found = repair_population(vectors, counts, allowed, spec.repair_moves, rng);
    if (!found) continue;

    Instance inst;
    inst.name = std::string(fp.name) + "-" + std::to_string(n);
    inst.num_cars = n;
    inst.num_options = fp.options;
    inst.num_classes = fp.classes;
    inst.demand = counts;
    for (const auto& v : vectors) inst.option_table.insert(inst.option_table.end(), v.begin(), v.end());
    inst.capacity = p;
    inst.window = q;
    set_default_weights(inst);
    inst.validate();
    return inst;
  }
  throw GenerationFailure(std::string(fp.name) + ": utilisation band " + band_text(fp.band) +
                          " not reached within " + std::to_string(spec.instance_attempts) + " attempts");
}

std::string suite_instance_name(Family family, int num_cars, int replicate) {
  return std::string(family_name(family)) + "-" + std::to_string(num_cars) + "-" + std::to_string(replicate);
}

std::uint64_t suite_seed(std::uint64_t base_seed, Family family, int num_cars, int replicate) {
  return Rng(base_seed).split(suite_instance_name(family, num_cars, replicate)).seed();
}

std::vector<Instance> generate_suite(std::uint64_t base_seed) {
  std::vector<Instance> out;
  for (Family f : all_families()) {
    for (int n : kSuiteSizes) {
      for (int r = 1; r <= kSuiteReplicates; ++r) {
        GeneratorSpec spec;
        spec.family = f;
        spec.num_cars = n;
        spec.seed = suite_seed(base_seed, f, n, r);
        Instance inst = generate(spec);
        inst.name = suite_instance_name(f, n, r);
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

}  // namespace carseq
