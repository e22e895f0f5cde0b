#include "carseq/solve_result.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace carseq {

std::string_view algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Exact: return "EXACT";
    case Algorithm::Lazy: return "LAZY";
    case Algorithm::Lraco: return "LRACO";
    case Algorithm::Lns10: return "LNS10";
    case Algorithm::LnsLcm: return "LNSLCM";
    case Algorithm::Adaptive: return "ADAPTIVE";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (s == "EXACT" || s == "MIP") return Algorithm::Exact;
  if (s == "LAZY") return Algorithm::Lazy;
  if (s == "LRACO" || s == "LR-ACO") return Algorithm::Lraco;
  if (s == "LNS10" || s == "10-LNS") return Algorithm::Lns10;
  if (s == "LNSLCM" || s == "LCM-LNS") return Algorithm::LnsLcm;
  if (s == "ADAPTIVE" || s == "ADAPTIVE-LNS") return Algorithm::Adaptive;
  return std::nullopt;
}

}  // namespace carseq
