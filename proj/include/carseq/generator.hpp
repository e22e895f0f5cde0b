#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "carseq/core.hpp"

namespace carseq {

enum class Family {
  Nobhiu,
  Negbhiu,
  Posbhiu,
  Hipqhiu,
  Hipqmedu,
  Negbhipqlou,
  Lopq820,
  Negbfixedpq,
  RandN,
  Rlou,
  Ranyu10o,
  Rnegbvlou10o,
  Rnegbhipqvlou10o,
  Rnegblopqvlou10o,
};

inline constexpr std::size_t kFamilyCount = 14;
inline constexpr std::array<int, 3> kSuiteSizes = {100, 300, 500};
inline constexpr int kSuiteReplicates = 3;

/// How cars are spread over classes.
enum class Bias { None, Negative, Positive };
enum class Population { PerCarUniform, RandomComposition };

/// Utilisation interval; bounds may be open or closed.
struct Band {
  double lo = 0.0;
  bool lo_closed = true;
  double hi = 1.0;
  bool hi_closed = true;

  bool contains(double u) const {
    return (lo_closed ? u >= lo : u > lo) && (hi_closed ? u <= hi : u < hi);
  }
};

struct FamilyParams {
  Family family;
  std::string_view name;
  int options;
  int classes;
  int p_min, p_max;        // capacity range
  int gap_min, gap_max;    // q - p range
  std::vector<int> fixed_p;  // when non-empty, p and q are not drawn
  std::vector<int> fixed_q;
  Band band;
  Bias bias;
  Population population;
};

/// `low_floor` is the lower band edge imposed on the "very low (<60%)" families.
FamilyParams family_params(Family family, double low_floor = 0.30);
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);
const std::array<Family, kFamilyCount>& all_families();

struct GeneratorSpec {
  Family family = Family::Nobhiu;
  int num_cars = 100;
  std::uint64_t seed = 0;
  /// Cap on option-vector draws while collecting distinct class vectors.
  std::uint64_t retry_limit = 1'000'000;
  /// Full-instance attempts (fresh p, q and class vectors) before giving up.
  int instance_attempts = 100'000;
  /// Population redraws per full-instance attempt.
  int population_attempts = 10;
  /// Single-car moves allowed when repairing a population that missed the band
  /// after all redraws; 0 disables the repair phase.
  int repair_moves = 20'000;
  double low_floor = 0.30;
};

/// Throws GenerationFailure naming the band when no instance satisfies it.
Instance generate(const GeneratorSpec& spec);

/// Instance name "<family>-<n>-<replicate>".
std::string suite_instance_name(Family family, int num_cars, int replicate);

/// Seed used for one suite member, derived from (base_seed, family, n, replicate).
std::uint64_t suite_seed(std::uint64_t base_seed, Family family, int num_cars, int replicate);

/// 14 families x {100, 300, 500} cars x 3 replicates = 126 instances.
std::vector<Instance> generate_suite(std::uint64_t base_seed);

}  // namespace carseq
