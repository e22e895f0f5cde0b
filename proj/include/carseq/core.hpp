#pragma once

// Instance and sequence model with exact objective evaluation.
//
// Containers are 0-indexed: option j in [0, O), class i in [0, K), position
// t in [0, D). The window for option j that ends at position t covers
// positions [max(0, t - q[j] + 1), t]; it is counted in the objective only
// when t >= p[j] - 1 (the sums over t = p_j..D in 1-based notation).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace carseq {

using ClassId = int;

struct Instance {
  std::string name;
  int num_cars = 0;
  int num_options = 0;
  int num_classes = 0;
  std::vector<int> demand;                 // K
  std::vector<std::uint8_t> option_table;  // K x O, row-major; 1 if class needs option
  std::vector<int> capacity;               // p, per option
  std::vector<int> window;                 // q, per option
  std::vector<double> over_weight;         // a, O x D row-major
  std::vector<double> under_weight;        // b, O x D row-major

  bool needs(ClassId cls, int option) const {
    return option_table[static_cast<std::size_t>(cls) * num_options + option] != 0;
  }
  double over(int option, int t) const {
    return over_weight[static_cast<std::size_t>(option) * num_cars + t];
  }
  double under(int option, int t) const {
    return under_weight[static_cast<std::size_t>(option) * num_cars + t];
  }
  std::span<const double> over_row(int option) const {
    return {over_weight.data() + static_cast<std::size_t>(option) * num_cars,
            static_cast<std::size_t>(num_cars)};
  }
  std::span<const double> under_row(int option) const {
    return {under_weight.data() + static_cast<std::size_t>(option) * num_cars,
            static_cast<std::size_t>(num_cars)};
  }
  int options_of(ClassId cls) const;

  /// Throws InvalidInput naming the first violated invariant.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Builds an instance with the default penalties (a = 1, b = 0) and validates it.
Instance make_instance(std::string name, std::vector<int> demand,
                       const std::vector<std::vector<int>>& options, std::vector<int> capacity,
                       std::vector<int> window);

/// Resets a to 1 and b to 0 everywhere.
void set_default_weights(Instance& inst);

/// Class assigned to each position.
struct Sequence {
  std::vector<ClassId> classes;

  Sequence() = default;
  explicit Sequence(std::vector<ClassId> c) : classes(std::move(c)) {}

  std::size_t size() const noexcept { return classes.size(); }
  ClassId operator[](std::size_t t) const { return classes[t]; }
  ClassId& operator[](std::size_t t) { return classes[t]; }
  auto begin() const noexcept { return classes.begin(); }
  auto end() const noexcept { return classes.end(); }

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

/// Classes laid out in index order (d[0] copies of class 0, then class 1, ...).
Sequence sorted_sequence(const Instance& inst);

/// Throws InvalidInput unless seq has D entries and exactly d[i] copies of each class.
void check_sequence(const Instance& inst, const Sequence& seq);

/// Selects which (option, window end) penalty terms count. Empty means all.
class WindowMask {
 public:
  WindowMask() = default;
  WindowMask(int num_options, int num_cars)
      : cars_(num_cars), bits_(static_cast<std::size_t>(num_options) * num_cars, 0) {}

  bool empty_mask() const noexcept { return bits_.empty(); }
  bool active(int option, int t) const {
    return bits_.empty() || bits_[static_cast<std::size_t>(option) * cars_ + t] != 0;
  }
  void activate(int option, int t) { bits_[static_cast<std::size_t>(option) * cars_ + t] = 1; }
  std::size_t count() const;

 private:
  int cars_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Evaluation {
  int num_options = 0;
  int num_cars = 0;
  std::vector<std::int32_t> over;   // y, O x D
  std::vector<std::int32_t> under;  // z, O x D
  double uoa = 0.0;
  double uua = 0.0;
  double total = 0.0;

  std::int32_t y(int option, int t) const {
    return over[static_cast<std::size_t>(option) * num_cars + t];
  }
  std::int32_t z(int option, int t) const {
    return under[static_cast<std::size_t>(option) * num_cars + t];
  }

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// u_j(t) = max(1, t + 1 - q[j]) on 1-based positions.
int window_start(const Instance& inst, int option, int t);

Evaluation evaluate(const Instance& inst, const Sequence& seq);

/// Objective counting only the windows active in `mask`.
double evaluate_masked(const Instance& inst, const Sequence& seq, const WindowMask& mask);

/// Re-evaluates after overwriting `positions[k]` with `new_classes[k]`.
/// Only windows that overlap a changed position are recomputed.
Evaluation evaluate_delta(const Instance& inst, const Sequence& seq, const Evaluation& eval,
                          std::span<const int> positions, std::span<const ClassId> new_classes);

/// (best - bound) / best, and 0 when both are zero. Throws Inconsistency if bound > best.
double objective_gap(double best_obj, double lower_bound);

}  // namespace carseq
