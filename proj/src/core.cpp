#include "carseq/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "carseq/error.hpp"
#include "carseq/kernels.hpp"

namespace carseq {

int Instance::options_of(ClassId cls) const {
  int n = 0;
  for (int j = 0; j < num_options; ++j) n += needs(cls, j) ? 1 : 0;
  return n;
}

void Instance::validate() const {
  auto fail = [&](const std::string& what) { throw InvalidInput("instance '" + name + "': " + what); };
  if (num_cars < 1) fail("number of cars must be positive");
  if (num_options < 1) fail("number of options must be positive");
  if (num_classes < 1) fail("number of classes must be positive");
  const auto K = static_cast<std::size_t>(num_classes);
  const auto O = static_cast<std::size_t>(num_options);
  const auto D = static_cast<std::size_t>(num_cars);
  if (demand.size() != K) fail("demand has wrong length");
  if (option_table.size() != K * O) fail("option table has wrong shape");
  if (capacity.size() != O || window.size() != O) fail("p/q vectors have wrong length");
  if (over_weight.size() != O * D || under_weight.size() != O * D) fail("weight blocks have wrong shape");

  long long total = 0;
  for (std::size_t i = 0; i < K; ++i) {
    if (demand[i] < 1) fail("class " + std::to_string(i) + " has no cars");
    total += demand[i];
  }
  if (total != num_cars) {
    fail("class demands sum to " + std::to_string(total) + ", expected " + std::to_string(num_cars));
  }
  for (std::size_t j = 0; j < O; ++j) {
    if (capacity[j] < 1 || capacity[j] > window[j] || window[j] > num_cars) {
      fail("option " + std::to_string(j) + " violates 1 <= p <= q <= D");
    }
  }
  std::set<std::vector<std::uint8_t>> rows;
  for (std::size_t i = 0; i < K; ++i) {
    std::vector<std::uint8_t> row(option_table.begin() + static_cast<std::ptrdiff_t>(i * O),
                                  option_table.begin() + static_cast<std::ptrdiff_t>((i + 1) * O));
    for (auto v : row) {
      if (v > 1) fail("option table entries must be 0 or 1");
    }
    if (!rows.insert(row).second) fail("class " + std::to_string(i) + " duplicates another class");
  }
  for (std::size_t k = 0; k < O * D; ++k) {
    if (!(over_weight[k] >= 0.0) || !(under_weight[k] >= 0.0) || !std::isfinite(over_weight[k]) ||
        !std::isfinite(under_weight[k])) {
      fail("penalty weights must be finite and nonnegative");
    }
  }
}

void set_default_weights(Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.num_options) * inst.num_cars;
  inst.over_weight.assign(n, 1.0);
  inst.under_weight.assign(n, 0.0);
}

Instance make_instance(std::string name, std::vector<int> demand,
                       const std::vector<std::vector<int>>& options, std::vector<int> capacity,
                       std::vector<int> window) {
  Instance inst;
  inst.name = std::move(name);
  inst.num_classes = static_cast<int>(demand.size());
  inst.num_options = static_cast<int>(capacity.size());
  long long cars = 0;
  for (int d : demand) cars += d;
  inst.num_cars = static_cast<int>(cars);
  inst.demand = std::move(demand);
  inst.capacity = std::move(capacity);
  inst.window = std::move(window);
  if (options.size() != inst.demand.size()) throw InvalidInput("option rows do not match classes");
  for (const auto& row : options) {
    if (static_cast<int>(row.size()) != inst.num_options) throw InvalidInput("option row has wrong length");
    for (int v : row) inst.option_table.push_back(static_cast<std::uint8_t>(v));
  }
  set_default_weights(inst);
  inst.validate();
  return inst;
}

Sequence sorted_sequence(const Instance& inst) {
  std::vector<ClassId> classes;
  classes.reserve(static_cast<std::size_t>(inst.num_cars));
  for (ClassId i = 0; i < inst.num_classes; ++i) classes.insert(classes.end(), inst.demand[i], i);
  return Sequence(std::move(classes));
}

void check_sequence(const Instance& inst, const Sequence& seq) {
  if (static_cast<int>(seq.size()) != inst.num_cars) {
    throw InvalidInput("sequence length " + std::to_string(seq.size()) + " does not match " +
                       std::to_string(inst.num_cars) + " cars");
  }
  std::vector<int> count(static_cast<std::size_t>(inst.num_classes), 0);
  for (ClassId c : seq) {
    if (c < 0 || c >= inst.num_classes) throw InvalidInput("sequence holds unknown class " + std::to_string(c));
    ++count[static_cast<std::size_t>(c)];
  }
  if (count != inst.demand) throw InvalidInput("sequence class counts do not match demand");
}

std::size_t WindowMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int window_start(const Instance& inst, int option, int t) {
  return std::max(1, t + 1 - inst.window[static_cast<std::size_t>(option)]);
}

namespace {

void option_prefix(const Instance& inst, const Sequence& seq, int option, std::vector<std::int32_t>& prefix) {
  prefix.resize(static_cast<std::size_t>(inst.num_cars) + 1);
  prefix[0] = 0;
  for (int t = 0; t < inst.num_cars; ++t) {
    prefix[static_cast<std::size_t>(t) + 1] = prefix[static_cast<std::size_t>(t)] + (inst.needs(seq[static_cast<std::size_t>(t)], option) ? 1 : 0);
  }
}

}  // namespace

Evaluation evaluate(const Instance& inst, const Sequence& seq) {
  check_sequence(inst, seq);
  Evaluation ev;
  ev.num_options = inst.num_options;
  ev.num_cars = inst.num_cars;
  const auto D = static_cast<std::size_t>(inst.num_cars);
  ev.over.assign(static_cast<std::size_t>(inst.num_options) * D, 0);
  ev.under.assign(static_cast<std::size_t>(inst.num_options) * D, 0);
  std::vector<std::int32_t> prefix;
  for (int j = 0; j < inst.num_options; ++j) {
    option_prefix(inst, seq, j, prefix);
    std::span<std::int32_t> y(ev.over.data() + j * D, D);
    std::span<std::int32_t> z(ev.under.data() + j * D, D);
    const auto sums = kernels::window_penalties(prefix, inst.capacity[static_cast<std::size_t>(j)],
                                                inst.window[static_cast<std::size_t>(j)],
                                                inst.capacity[static_cast<std::size_t>(j)] - 1,
                                                inst.num_cars, inst.over_row(j), inst.under_row(j), y, z);
    ev.uoa += sums.over;
    ev.uua += sums.under;
  }
  ev.total = ev.uoa + ev.uua;
  return ev;
}

double evaluate_masked(const Instance& inst, const Sequence& seq, const WindowMask& mask) {
  if (mask.empty_mask()) return evaluate(inst, seq).total;
  check_sequence(inst, seq);
  double total = 0.0;
  std::vector<std::int32_t> prefix;
  for (int j = 0; j < inst.num_options; ++j) {
    option_prefix(inst, seq, j, prefix);
    const int p = inst.capacity[static_cast<std::size_t>(j)];
    const int q = inst.window[static_cast<std::size_t>(j)];
    for (int t = p - 1; t < inst.num_cars; ++t) {
      if (!mask.active(j, t)) continue;
      const int usage = prefix[static_cast<std::size_t>(t) + 1] - prefix[static_cast<std::size_t>(std::max(0, t - q + 1))];
      total += inst.over(j, t) * std::max(0, usage - p) + inst.under(j, t) * std::max(0, p - usage);
    }
  }
  return total;
}

Evaluation evaluate_delta(const Instance& inst, const Sequence& seq, const Evaluation& eval,
                          std::span<const int> positions, std::span<const ClassId> new_classes) {
  if (positions.size() != new_classes.size()) throw InvalidInput("positions and classes differ in length");
  if (positions.empty()) return eval;
  if (eval.num_cars != inst.num_cars || eval.num_options != inst.num_options) {
    throw InvalidInput("evaluation does not belong to this instance");
  }

  Sequence next = seq;
  std::vector<int> balance(static_cast<std::size_t>(inst.num_classes), 0);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const int t = positions[k];
    const ClassId c = new_classes[k];
    if (t < 0 || t >= inst.num_cars) throw InvalidInput("changed position out of range");
    if (c < 0 || c >= inst.num_classes) throw InvalidInput("replacement class out of range");
    --balance[static_cast<std::size_t>(seq[static_cast<std::size_t>(t)])];
    ++balance[static_cast<std::size_t>(c)];
    next[static_cast<std::size_t>(t)] = c;
  }
  if (std::any_of(balance.begin(), balance.end(), [](int b) { return b != 0; })) {
    throw InvalidInput("replacement does not preserve class counts");
  }

  Evaluation out = eval;
  const int D = inst.num_cars;
  std::vector<std::pair<int, int>> spans;
  for (int j = 0; j < inst.num_options; ++j) {
    const int p = inst.capacity[static_cast<std::size_t>(j)];
    const int q = inst.window[static_cast<std::size_t>(j)];
    spans.clear();
    for (int t : positions) {
      if (inst.needs(seq[static_cast<std::size_t>(t)], j) == inst.needs(next[static_cast<std::size_t>(t)], j)) continue;
      const int lo = std::max(t, p - 1);
      const int hi = std::min(D - 1, t + q - 1);
      if (lo <= hi) spans.emplace_back(lo, hi);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<int, int>> merged;
    for (const auto& s : spans) {
      if (!merged.empty() && s.first <= merged.back().second + 1) {
        merged.back().second = std::max(merged.back().second, s.second);
      } else {
        merged.push_back(s);
      }
    }
    const auto row = static_cast<std::size_t>(j) * static_cast<std::size_t>(D);
    for (const auto& [lo, hi] : merged) {
      int usage = 0;
      for (int u = std::max(0, lo - q + 1); u <= lo; ++u) usage += inst.needs(next[static_cast<std::size_t>(u)], j) ? 1 : 0;
      for (int t = lo; t <= hi; ++t) {
        if (t > lo) {
          usage += inst.needs(next[static_cast<std::size_t>(t)], j) ? 1 : 0;
          if (t - q >= 0) usage -= inst.needs(next[static_cast<std::size_t>(t - q)], j) ? 1 : 0;
        }
        const auto idx = row + static_cast<std::size_t>(t);
        const std::int32_t y = std::max(0, usage - p);
        const std::int32_t z = std::max(0, p - usage);
        out.uoa += inst.over(j, t) * (y - out.over[idx]);
        out.uua += inst.under(j, t) * (z - out.under[idx]);
        out.over[idx] = y;
        out.under[idx] = z;
      }
    }
  }
  out.total = out.uoa + out.uua;
  return out;
}

double objective_gap(double best_obj, double lower_bound) {
  const double slack = 1e-9 * std::max(1.0, std::abs(best_obj));
  if (lower_bound > best_obj + slack) {
    throw Inconsistency("lower bound " + std::to_string(lower_bound) + " exceeds objective " +
                        std::to_string(best_obj));
  }
  const double lb = std::clamp(lower_bound, 0.0, best_obj);
  if (best_obj <= 0.0) return 0.0;
  return (best_obj - lb) / best_obj;
}

}  // namespace carseq
