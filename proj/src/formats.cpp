#include "carseq/formats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "carseq/error.hpp"

namespace carseq {

namespace {

struct Token {
  std::string_view text;
  int line;
};

struct Tokens {
  std::vector<Token> items;
  std::string name;
  std::size_t pos = 0;
  int last_line = 1;

  bool done() const { return pos >= items.size(); }
  const Token& peek() const { return items[pos]; }
  const Token& next(const char* what) {
    if (done()) throw ParseError(last_line, std::string("unexpected end of input, expected ") + what);
    return items[pos++];
  }
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  int line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    const std::string_view raw = text.substr(start, end - start);
    const std::string_view body = trim(raw);
    start = end + 1;
    if (!body.empty()) {
      out.last_line = line;
      if (body.front() == '%') continue;
      if (body.front() == '#' && body != "#A" && body != "#B") {
        constexpr std::string_view key = "name:";
        const auto rest = trim(body.substr(1));
        if (rest.substr(0, key.size()) == key) out.name = std::string(trim(rest.substr(key.size())));
        continue;
      }
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && (body[i] == ' ' || body[i] == '\t' || body[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < body.size() && body[j] != ' ' && body[j] != '\t' && body[j] != '\r') ++j;
        if (j > i) out.items.push_back({body.substr(i, j - i), line});
        i = j;
      }
    }
    if (end == text.size()) break;
  }
  return out;
}

long long parse_int(const Token& tok, const char* what) {
  long long v = 0;
  const auto* first = tok.text.data();
  const auto* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(tok.line, std::string("expected integer ") + what + ", got '" + std::string(tok.text) + "'");
  }
  return v;
}

int parse_count(Tokens& toks, const char* what, long long lo, long long hi) {
  const Token& tok = toks.next(what);
  const long long v = parse_int(tok, what);
  if (v < lo || v > hi) {
    throw ParseError(tok.line, std::string(what) + " = " + std::to_string(v) + " out of range [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

void read_weight_block(Tokens& toks, std::vector<double>& dst, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const Token& tok = toks.next("weight");
    const double w = parse_double(tok.text, tok.line);
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParseError(tok.line, "weights must be finite and nonnegative");
    dst[k] = w;
  }
}

constexpr int kMaxDimension = 100000000;

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "expected number, got '" + std::string(text) + "'");
  }
  return v;
}

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.' || c == '+';
    if (!ok) return false;
  }
  return true;
}

Instance parse_instance(std::string_view text, std::string default_name) {
  Tokens toks = tokenize(text);
  Instance inst;
  inst.name = toks.name.empty() ? std::move(default_name) : toks.name;

  const int header_line = toks.done() ? 1 : toks.peek().line;
  inst.num_cars = parse_count(toks, "number of cars", 1, kMaxDimension);
  inst.num_options = parse_count(toks, "number of options", 1, kMaxDimension);
  inst.num_classes = parse_count(toks, "number of classes", 1, kMaxDimension);
  const auto O = static_cast<std::size_t>(inst.num_options);
  const auto K = static_cast<std::size_t>(inst.num_classes);
  const auto D = static_cast<std::size_t>(inst.num_cars);

  inst.capacity.resize(O);
  inst.window.resize(O);
  for (auto& p : inst.capacity) p = parse_count(toks, "capacity p", 1, inst.num_cars);
  int q_line = header_line;
  for (std::size_t j = 0; j < O; ++j) {
    const Token& tok = toks.next("window q");
    q_line = tok.line;
    const long long q = parse_int(tok, "window q");
    if (q < inst.capacity[j]) {
      throw ParseError(tok.line, "option " + std::to_string(j) + " has p = " + std::to_string(inst.capacity[j]) +
                                     " > q = " + std::to_string(q));
    }
    if (q > inst.num_cars) throw ParseError(tok.line, "option " + std::to_string(j) + " has q larger than D");
    inst.window[j] = static_cast<int>(q);
  }

  inst.demand.resize(K);
  inst.option_table.resize(K * O);
  std::set<std::vector<std::uint8_t>> rows;
  long long total = 0;
  int last_class_line = q_line;
  for (std::size_t i = 0; i < K; ++i) {
    const Token& idx = toks.next("class index");
    last_class_line = idx.line;
    if (parse_int(idx, "class index") != static_cast<long long>(i)) {
      throw ParseError(idx.line, "class index must be " + std::to_string(i));
    }
    inst.demand[i] = parse_count(toks, "class demand", 1, inst.num_cars);
    total += inst.demand[i];
    std::vector<std::uint8_t> row(O);
    for (std::size_t j = 0; j < O; ++j) row[j] = static_cast<std::uint8_t>(parse_count(toks, "option flag", 0, 1));
    if (!rows.insert(row).second) throw ParseError(idx.line, "class " + std::to_string(i) + " duplicates an earlier class");
    std::copy(row.begin(), row.end(), inst.option_table.begin() + static_cast<std::ptrdiff_t>(i * O));
  }
  if (total != inst.num_cars) {
    throw ParseError(last_class_line, "class demands sum to " + std::to_string(total) + " but header declares " +
                                          std::to_string(inst.num_cars) + " cars");
  }

  set_default_weights(inst);
  bool seen_a = false;
  bool seen_b = false;
  while (!toks.done()) {
    const Token& marker = toks.next("weight block marker");
    if (marker.text == "#A" && !seen_a) {
      read_weight_block(toks, inst.over_weight, O * D);
      seen_a = true;
    } else if (marker.text == "#B" && !seen_b) {
      read_weight_block(toks, inst.under_weight, O * D);
      seen_b = true;
    } else {
      throw ParseError(marker.line, "unexpected token '" + std::string(marker.text) + "'");
    }
  }

  try {
    inst.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(toks.last_line, e.what());
  }
  return inst;
}

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  if (!inst.name.empty()) out << "# name: " << inst.name << '\n';
  out << inst.num_cars << ' ' << inst.num_options << ' ' << inst.num_classes << '\n';
  for (int j = 0; j < inst.num_options; ++j) out << (j ? " " : "") << inst.capacity[static_cast<std::size_t>(j)];
  out << '\n';
  for (int j = 0; j < inst.num_options; ++j) out << (j ? " " : "") << inst.window[static_cast<std::size_t>(j)];
  out << '\n';
  for (int i = 0; i < inst.num_classes; ++i) {
    out << i << ' ' << inst.demand[static_cast<std::size_t>(i)];
    for (int j = 0; j < inst.num_options; ++j) out << ' ' << (inst.needs(i, j) ? 1 : 0);
    out << '\n';
  }
  auto is_default = [&](const std::vector<double>& w, double v) {
    return std::all_of(w.begin(), w.end(), [v](double x) { return x == v; });
  };
  auto block = [&](const char* marker, const std::vector<double>& w) {
    out << marker << '\n';
    for (int j = 0; j < inst.num_options; ++j) {
      for (int t = 0; t < inst.num_cars; ++t) {
        out << (t ? " " : "") << format_double(w[static_cast<std::size_t>(j) * inst.num_cars + t]);
      }
      out << '\n';
    }
  };
  if (!is_default(inst.over_weight, 1.0)) block("#A", inst.over_weight);
  if (!is_default(inst.under_weight, 0.0)) block("#B", inst.under_weight);
  return out.str();
}

Instance read_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path.stem().string());
}

namespace {

constexpr std::array<std::string_view, 10> kRecordKeys = {
    "instance", "algorithm", "seed", "objective", "lower_bound",
    "bound_certified", "gap", "wall_seconds", "status", "config_digest"};

}  // namespace

std::string format_record(const ResultRecord& r) {
  std::string s;
  s += "instance=" + r.instance_name;
  s += " algorithm=" + std::string(algorithm_name(r.algorithm));
  s += " seed=" + std::to_string(r.seed);
  s += " objective=" + format_double(r.objective);
  s += " lower_bound=" + format_double(r.lower_bound);
  s += std::string(" bound_certified=") + (r.bound_certified ? "1" : "0");
  s += " gap=" + format_double(r.gap);
  s += " wall_seconds=" + format_double(r.wall_seconds);
  s += std::string(" status=") + (r.status == RunStatus::Ok ? "ok" : "failed");
  s += " config_digest=" + (r.config_digest.empty() ? std::string("-") : r.config_digest);
  return s;
}

std::string write_results(const std::vector<ResultRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += format_record(r);
    out += '\n';
  }
  return out;
}

std::vector<ResultRecord> read_results(std::string_view text) {
  std::vector<ResultRecord> out;
  int line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    const std::string_view body = trim(text.substr(start, end - start));
    start = end + 1;
    if (body.empty() || body.front() == '#') continue;

    std::array<std::string_view, kRecordKeys.size()> values;
    std::size_t field = 0;
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && body[i] == ' ') ++i;
      if (i >= body.size()) break;
      std::size_t j = body.find(' ', i);
      if (j == std::string_view::npos) j = body.size();
      const std::string_view kv = body.substr(i, j - i);
      i = j;
      const auto eq = kv.find('=');
      if (field >= kRecordKeys.size()) throw ParseError(line, "too many fields");
      if (eq == std::string_view::npos || kv.substr(0, eq) != kRecordKeys[field]) {
        throw ParseError(line, "expected field '" + std::string(kRecordKeys[field]) + "'");
      }
      values[field++] = kv.substr(eq + 1);
    }
    if (field != kRecordKeys.size()) throw ParseError(line, "missing fields");

    ResultRecord r;
    if (!valid_identifier(values[0])) throw ParseError(line, "bad instance name");
    r.instance_name = std::string(values[0]);
    const auto alg = parse_algorithm(values[1]);
    if (!alg) throw ParseError(line, "unknown algorithm '" + std::string(values[1]) + "'");
    r.algorithm = *alg;
    {
      auto [ptr, ec] = std::from_chars(values[2].data(), values[2].data() + values[2].size(), r.seed);
      if (ec != std::errc() || ptr != values[2].data() + values[2].size()) throw ParseError(line, "bad seed");
    }
    r.objective = parse_double(values[3], line);
    r.lower_bound = parse_double(values[4], line);
    if (values[5] != "0" && values[5] != "1") throw ParseError(line, "bound_certified must be 0 or 1");
    r.bound_certified = values[5] == "1";
    r.gap = parse_double(values[6], line);
    r.wall_seconds = parse_double(values[7], line);
    if (values[8] == "ok") {
      r.status = RunStatus::Ok;
    } else if (values[8] == "failed") {
      r.status = RunStatus::Failed;
    } else {
      throw ParseError(line, "bad status");
    }
    r.config_digest = values[9] == "-" ? std::string() : std::string(values[9]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace carseq
