#pragma once

// Command-line entry point: generate, features, project, solve, experiment,
// select, plot.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carseq/features.hpp"

namespace carseq::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // unexpected internal error
  kUsage = 2,         // unknown flag, bad value, invalid combination
  kMissingFile = 3,
  kParseError = 4,    // malformed input file
  kInconsistent = 5,  // data or solver results that contradict each other
};

/// Effective settings of one command, in a fixed order.
struct RunConfig {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> settings;

  void set(std::string key, std::string value) { settings.emplace_back(std::move(key), std::move(value)); }
  /// 64-bit FNV-1a over "subcommand\nkey=value\n..." as 16 hex digits.
  std::string digest() const;
};

/// Writes to a temporary file next to `path`, then renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

struct FeatureRow {
  std::string instance_name;
  FeatureVector features;
};

/// "instance_name,<feature columns>" with '#' comment lines skipped.
std::string write_features_csv(const std::vector<FeatureRow>& rows, std::string_view digest);
std::vector<FeatureRow> read_features_csv(std::string_view text);

struct SpacePoint {
  std::string instance_name;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

std::vector<SpacePoint> read_space_csv(std::string_view text);

}  // namespace carseq::cli
