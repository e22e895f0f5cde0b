#pragma once

// Instance files (.csq) and run-result logs (.runs).
//
// Instance grammar, whitespace separated, in the classic public benchmark
// layout:
//
//   D O K
//   p_1 .. p_O
//   q_1 .. q_O
//   K lines: class_index d_i r_i1 .. r_iO      (class_index = 0 .. K-1)
//   [#A  followed by O x D over-assignment weights, row-major]
//   [#B  followed by O x D under-assignment weights, row-major]
//
// Lines starting with '%' or "# " are comments; "# name: <id>" names the
// instance. Missing weight blocks default to a = 1, b = 0.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "carseq/core.hpp"
#include "carseq/solve_result.hpp"

namespace carseq {

/// Throws ParseError naming the offending line.
Instance parse_instance(std::string_view text, std::string default_name = "instance");
std::string write_instance(const Instance& inst);

Instance read_instance_file(const std::filesystem::path& path);

enum class RunStatus { Ok, Failed };

struct ResultRecord {
  std::string instance_name;
  Algorithm algorithm = Algorithm::Exact;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double lower_bound = 0.0;
  bool bound_certified = false;
  double gap = 0.0;
  double wall_seconds = 0.0;
  RunStatus status = RunStatus::Ok;
  std::string config_digest;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// One line per record, key=value fields in fixed order.
std::string write_results(const std::vector<ResultRecord>& records);
std::string format_record(const ResultRecord& record);

/// Blank lines are skipped. Throws ParseError naming the malformed line.
std::vector<ResultRecord> read_results(std::string_view text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text, int line);

/// True if `name` is usable as an identifier in instance and result files.
bool valid_identifier(std::string_view name);

}  // namespace carseq
