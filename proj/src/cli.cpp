#include "carseq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "carseq/algoselect.hpp"
#include "carseq/error.hpp"
#include "carseq/exact.hpp"
#include "carseq/formats.hpp"
#include "carseq/generator.hpp"
#include "carseq/harness.hpp"
#include "carseq/lns.hpp"
#include "carseq/projection.hpp"
#include "carseq/rng.hpp"

namespace carseq::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFormatVersion = "carseq-1";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ParseError with the file it came from.
class FileParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path);

template <class F>
auto parse_file(const fs::path& path, F&& parse) {
  const std::string text = read_text(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw FileParseError(path.string() + ": " + e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw MissingFile("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A directory's *.csq files in name order, or the single file given.
std::vector<fs::path> instance_paths(const fs::path& where) {
  std::error_code ec;
  if (fs::is_regular_file(where, ec)) return {where};
  if (!fs::is_directory(where, ec)) throw MissingFile("file not found: " + where.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(where)) {
    if (e.is_regular_file() && e.path().extension() == ".csq") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw MissingFile("no .csq files in " + where.string());
  return out;
}

std::vector<Instance> load_instances(const fs::path& where) {
  std::vector<Instance> out;
  for (const fs::path& p : instance_paths(where)) {
    out.push_back(parse_file(p, [&](const std::string& t) { return parse_instance(t, p.stem().string()); }));
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    out.emplace_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

/// Non-comment, non-blank lines with their 1-based numbers.
std::vector<std::pair<int, std::string>> data_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int n = 0;
  for (std::string& line : split(text, '\n')) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(n, std::move(line));
  }
  return out;
}

std::vector<Algorithm> parse_algorithms(const std::string& list) {
  std::vector<Algorithm> out;
  for (const std::string& s : split(list, ',')) {
    const auto a = parse_algorithm(s);
    if (!a) throw UsageError("unknown algorithm '" + s + "'");
    out.push_back(*a);
  }
  return out;
}

ClockMode parse_clock(const std::string& s) {
  if (s == "work") return ClockMode::Work;
  if (s == "wall") return ClockMode::Wall;
  throw UsageError("clock must be 'work' or 'wall'");
}

int default_jobs() {
  const char* env = std::getenv("CARSEQ_JOBS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw UsageError("CARSEQ_JOBS must be a positive integer");
  return static_cast<int>(v);
}

std::string digest_line(const RunConfig& cfg) {
  return "config_digest=" + cfg.digest() + " command=" + cfg.subcommand;
}

// ---- generate ----

struct GenerateArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::string families = "all";
  std::vector<int> sizes{kSuiteSizes.begin(), kSuiteSizes.end()};
  int replicates = kSuiteReplicates;
};

int run_generate(const GenerateArgs& a, std::ostream& out) {
  std::vector<Family> fams;
  if (a.families == "all") {
    fams.assign(all_families().begin(), all_families().end());
  } else {
    for (const std::string& s : split(a.families, ',')) {
      const auto f = parse_family(s);
      if (!f) throw UsageError("unknown family '" + s + "'");
      fams.push_back(*f);
    }
  }
  if (a.replicates < 1) throw UsageError("--replicates must be positive");
  RunConfig cfg{"generate", {}};
  cfg.set("seed", std::to_string(a.seed));
  std::string fam_list, size_list;
  for (Family f : fams) fam_list += std::string(family_name(f)) + ",";
  for (int n : a.sizes) size_list += std::to_string(n) + ",";
  cfg.set("families", fam_list);
  cfg.set("sizes", size_list);
  cfg.set("replicates", std::to_string(a.replicates));

  fs::create_directories(a.out);
  int count = 0;
  for (Family f : fams) {
    for (int n : a.sizes) {
      for (int r = 0; r < a.replicates; ++r) {
        GeneratorSpec spec;
        spec.family = f;
        spec.num_cars = n;
        spec.seed = suite_seed(a.seed, f, n, r);
        Instance inst = generate(spec);
        inst.name = suite_instance_name(f, n, r);
        atomic_write(fs::path(a.out) / (inst.name + ".csq"), "# " + digest_line(cfg) + "\n" + write_instance(inst));
        ++count;
      }
    }
  }
  out << "generated " << count << " instances in " << a.out << " (" << digest_line(cfg) << ")\n";
  return kOk;
}

// ---- features ----

int run_features(const std::string& instances, const std::string& out_path, std::ostream& out) {
  RunConfig cfg{"features", {}};
  std::vector<FeatureRow> rows;
  for (const Instance& inst : load_instances(instances)) rows.push_back({inst.name, extract_features(inst)});
  atomic_write(out_path, write_features_csv(rows, digest_line(cfg)));
  out << "wrote features for " << rows.size() << " instances to " << out_path << '\n';
  return kOk;
}

// ---- project ----

int run_project(const std::string& features, const std::string& mode, const std::string& out_path,
                std::ostream& out) {
  if (mode != "fixed" && mode != "refit") throw UsageError("--mode must be 'fixed' or 'refit'");
  RunConfig cfg{"project", {}};
  cfg.set("mode", mode);
  const std::vector<FeatureRow> rows = parse_file(features, [](const std::string& t) { return read_features_csv(t); });
  if (rows.empty()) throw InvalidInput("features file has no rows");
  std::vector<FeatureVector> fv;
  for (const FeatureRow& r : rows) fv.push_back(r.features);
  const Normalizers norm = fit_normalizers(fv);
  std::vector<Selected> sel;
  for (const FeatureVector& f : fv) sel.push_back(select(f, norm));
  ProjectionModel model = mode == "fixed" ? fixed_model(norm) : fit_pca(sel);
  model.normalizers = norm;

  std::ostringstream csv;
  csv << "# " << digest_line(cfg) << " projection=" << mode_name(model.mode) << '\n';
  csv << "instance_name,PC1,PC2\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Point2 p = project(model, sel[i]);
    csv << rows[i].instance_name << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
  }
  atomic_write(out_path, csv.str());
  out << "projected " << rows.size() << " instances (" << mode_name(model.mode) << ") to " << out_path << '\n';
  return kOk;
}

// ---- solve ----

struct SolveArgs {
  std::string alg;
  std::string in;
  double time = 60.0;
  std::uint64_t seed = 0;
  int window = 0;
  int shift = 0;
  std::string clock = "work";
  std::string out;
};

int run_solve(const SolveArgs& a, bool has_window, bool has_shift, std::ostream& out, std::ostream& err) {
  const auto alg = parse_algorithm(a.alg);
  if (!alg) throw UsageError("unknown algorithm '" + a.alg + "'");
  const bool windowed = *alg == Algorithm::Lns10 || *alg == Algorithm::LnsLcm;
  if ((has_window || has_shift) && !windowed) {
    throw UsageError("--window and --shift apply only to lns10 and lnslcm");
  }
  if (has_window && a.window < 1) throw UsageError("--window must be positive");
  if (has_shift && a.shift < 1) throw UsageError("--shift must be positive");
  if (!(a.time >= 0.0)) throw UsageError("--time must be non-negative");
  const ClockMode clock = parse_clock(a.clock);
  const Instance inst =
      parse_file(a.in, [&](const std::string& t) { return parse_instance(t, fs::path(a.in).stem().string()); });

  RunConfig cfg{"solve", {}};
  cfg.set("alg", std::string(algorithm_name(*alg)));
  cfg.set("time", format_double(a.time));
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("clock", a.clock);
  if (has_window) cfg.set("window", std::to_string(a.window));
  if (has_shift) cfg.set("shift", std::to_string(a.shift));

  SolveResult r;
  if (has_window || has_shift) {
    LnsConfig lc;
    lc.window = has_window ? a.window : (*alg == Algorithm::Lns10 ? 10 : lcm_window(inst));
    lc.shift = has_shift ? a.shift : 0;
    if (lc.shift > lc.window) throw UsageError("--shift must not exceed the window");
    lc.time_limit = a.time;
    lc.seed = a.seed;
    lc.clock = clock;
    r = lns(inst, lc);
    r.algorithm = *alg;
  } else {
    r = run_algorithm(inst, *alg, a.time, a.seed, clock);
  }

  const double check = evaluate(inst, r.best).total;
  if (check != r.objective) {
    throw Inconsistency("reported objective " + format_double(r.objective) + " but the sequence evaluates to " +
                        format_double(check));
  }
  if (r.bound_certified && r.lower_bound > r.objective) {
    throw Inconsistency("certified bound " + format_double(r.lower_bound) + " exceeds objective " +
                        format_double(r.objective));
  }
  ResultRecord rec;
  rec.instance_name = inst.name;
  rec.algorithm = r.algorithm;
  rec.seed = a.seed;
  rec.objective = r.objective;
  rec.lower_bound = r.lower_bound;
  rec.bound_certified = r.bound_certified;
  rec.gap = r.gap;
  rec.wall_seconds = r.seconds;
  rec.config_digest = cfg.digest();
  out << format_record(rec) << '\n';
  out << "sequence";
  for (ClassId c : r.best.classes) out << ' ' << c;
  out << '\n';
  if (!a.out.empty()) {
    std::string existing;
    std::error_code ec;
    if (fs::exists(a.out, ec)) {
      // Refuse to append to a malformed log.
      existing = parse_file(a.out, [](const std::string& t) { read_results(t); return t; });
    }
    if (!existing.empty() && existing.back() != '\n') existing += '\n';
    atomic_write(a.out, existing + format_record(rec) + "\n");
  }
  (void)err;
  return kOk;
}

// ---- experiment ----

struct ExperimentArgs {
  std::string instances;
  std::string algs = "EXACT,LAZY,LRACO,LNS10,LNSLCM,ADAPTIVE";
  double time = 60.0;
  int seeds = 1;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string clock = "work";
  std::string out;
};

int run_experiment_cmd(const ExperimentArgs& a, std::ostream& out) {
  if (a.seeds < 1) throw UsageError("--seeds must be positive");
  if (!(a.time >= 0.0)) throw UsageError("--time must be non-negative");
  ExperimentConfig ec;
  ec.algorithms = parse_algorithms(a.algs);
  ec.time_limit = a.time;
  ec.seeds = a.seeds;
  ec.base_seed = a.seed;
  ec.clock = parse_clock(a.clock);
  ec.jobs = a.jobs > 0 ? a.jobs : default_jobs();
  const std::vector<Instance> insts = load_instances(a.instances);

  RunConfig cfg{"experiment", {}};
  std::string alg_list;
  for (Algorithm x : ec.algorithms) alg_list += std::string(algorithm_name(x)) + ",";
  cfg.set("algs", alg_list);
  cfg.set("time", format_double(a.time));
  cfg.set("seeds", std::to_string(a.seeds));
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("clock", a.clock);
  cfg.set("rng", std::string(kRngIdentifier));
  ec.config_digest = cfg.digest();

  const std::vector<ResultRecord> recs = run_experiment(insts, ec);
  atomic_write(a.out, write_results(recs));
  const auto failed = std::count_if(recs.begin(), recs.end(), [](const ResultRecord& r) { return r.status != RunStatus::Ok; });
  out << "wrote " << recs.size() << " records to " << a.out << " (" << failed << " failed, " << digest_line(cfg) << ")\n";
  return kOk;
}

// ---- select ----

struct SelectArgs {
  std::string results;
  std::string features;
  std::string pair = "MIP:ADAPTIVE";
  std::string model = "dt";
  int depth = 2;
  int k = 3;
  std::string cv = "10x100";
  std::uint64_t seed = 0;
  double tolerance = kTieTolerance;
  std::string view = "full";
  int resolution = 50;
  std::string out;
};

SelectionDataset selection_data(const std::vector<PairLabel>& labels, const std::vector<FeatureRow>& feats) {
  std::vector<FeatureVector> fv;
  for (const FeatureRow& r : feats) fv.push_back(r.features);
  const Normalizers norm = fit_normalizers(fv);
  std::map<std::string, Selected> by_name;
  for (const FeatureRow& r : feats) by_name[r.instance_name] = select(r.features, norm);
  SelectionDataset d;
  for (std::string_view n : selected_feature_names()) d.feature_names.emplace_back(n);
  for (const PairLabel& p : labels) {
    auto it = by_name.find(p.instance_name);
    if (it == by_name.end()) throw Inconsistency("no features for instance '" + p.instance_name + "'");
    d.rows.push_back({p.instance_name, std::vector<double>(it->second.begin(), it->second.end()), p.label});
  }
  return d;
}

int run_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> pair = split(a.pair, ':');
  if (pair.size() != 2) throw UsageError("--pair must look like MIP:ADAPTIVE");
  const auto alg_a = parse_algorithm(pair[0]);
  const auto alg_b = parse_algorithm(pair[1]);
  if (!alg_a || !alg_b) throw UsageError("unknown algorithm in --pair");
  if (*alg_a == *alg_b) throw UsageError("--pair needs two different algorithms");
  const auto kind = parse_model_kind(a.model);
  if (!kind) throw UsageError("--model must be dt, knn or zeror");
  const std::vector<std::string> cv = split(a.cv, 'x');
  int folds = 0, repeats = 0;
  try {
    if (cv.size() != 2) throw std::invalid_argument("cv");
    folds = std::stoi(cv[0]);
    repeats = std::stoi(cv[1]);
  } catch (const std::exception&) {
    throw UsageError("--cv must look like 10x100");
  }
  if (a.view != "full" && a.view != "usage-ops") throw UsageError("--view must be 'full' or 'usage-ops'");
  if (a.depth < 1) throw UsageError("--depth must be positive");
  if (a.k < 1) throw UsageError("--k must be positive");
  if (a.resolution < 1) throw UsageError("--resolution must be positive");
  if (!(a.tolerance >= 0.0)) throw UsageError("--tolerance must be non-negative");
  const std::vector<std::string> outs = split(a.out, ',');
  if (outs.size() != 3) throw UsageError("--out needs model.txt,boundary.csv,boundary.svg");

  const ModelSpec spec{*kind, a.k, a.depth};
  RunConfig cfg{"select", {}};
  cfg.set("pair", std::string(algorithm_name(*alg_a)) + ":" + std::string(algorithm_name(*alg_b)));
  cfg.set("model", model_name(spec));
  cfg.set("depth", std::to_string(a.depth));
  cfg.set("k", std::to_string(a.k));
  cfg.set("cv", std::to_string(folds) + "x" + std::to_string(repeats));
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("tolerance", format_double(a.tolerance));
  cfg.set("view", a.view);
  cfg.set("resolution", std::to_string(a.resolution));

  const std::vector<ResultRecord> recs = parse_file(a.results, [](const std::string& t) { return read_results(t); });
  const std::vector<FeatureRow> feats = parse_file(a.features, [](const std::string& t) { return read_features_csv(t); });
  std::vector<std::string> warnings;
  const std::vector<PairLabel> labels = label_pairs(recs, *alg_a, *alg_b, a.tolerance, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << '\n';
  if (labels.empty()) throw Inconsistency("no instance has results for both algorithms of the pair");

  const SelectionDataset full = selection_data(labels, feats);
  const SelectionDataset data = a.view == "full" ? full : full.view(kUsageOpsView);
  const SelectionDataset plane = full.view(kUsageOpsView);
  const CvResult res = cross_validate(data, spec, folds, repeats, a.seed);
  if (!res.stratified) err << "warning: a class has fewer rows than folds; using unstratified folds\n";
  const auto model = fit(spec, data);
  const auto plane_model = fit(spec, plane);

  const auto counts = data.label_counts();
  std::ostringstream txt;
  txt << "# " << digest_line(cfg) << '\n';
  txt << "pair " << algorithm_name(*alg_a) << " (A) vs " << algorithm_name(*alg_b) << " (B)\n";
  txt << "rows " << data.rows.size() << " A=" << counts[0] << " B=" << counts[1] << " TIE=" << counts[2] << '\n';
  txt << "view " << a.view << '\n';
  txt << "cv " << folds << "x" << repeats << " stratified=" << (res.stratified ? "yes" : "no")
      << " mean_accuracy=" << format_double(res.mean_accuracy) << '\n';
  txt << "training_accuracy=" << format_double(accuracy(*model, data)) << '\n';
  txt << "[model]\n" << model->describe();
  txt << "[boundary model: " << kUsageOpsView[0] << ", " << kUsageOpsView[1] << "]\n" << plane_model->describe();

  const BoundaryGrid grid = export_boundary(*plane_model, a.resolution, kUsageOpsView[0], kUsageOpsView[1]);
  atomic_write(outs[0], txt.str());
  atomic_write(outs[1], boundary_csv(grid, digest_line(cfg)));
  atomic_write(outs[2], boundary_svg(grid, &plane, digest_line(cfg)));
  out << "cv accuracy " << std::fixed << std::setprecision(4) << res.mean_accuracy << " over " << data.rows.size()
      << " instances; wrote " << a.out << '\n';
  return kOk;
}

// ---- plot ----

std::string footprint_svg(const std::vector<std::tuple<std::string, double, double, double>>& pts, double good,
                          std::string_view title) {
  constexpr int kSize = 400;
  constexpr int kMargin = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = std::get<1>(pts[0]);
    y0 = y1 = std::get<2>(pts[0]);
    for (const auto& p : pts) {
      x0 = std::min(x0, std::get<1>(p));
      x1 = std::max(x1, std::get<1>(p));
      y0 = std::min(y0, std::get<2>(p));
      y1 = std::max(y1, std::get<2>(p));
    }
  }
  const double sx = x1 > x0 ? x1 - x0 : 1.0, sy = y1 > y0 ? y1 - y0 : 1.0;
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kMargin << "\" height=\""
      << kSize + 2 * kMargin << "\">\n<title>" << title << "</title>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& [name, x, y, gap] : pts) {
    const double cx = kMargin + (x - x0) / sx * kSize;
    const double cy = kMargin + kSize - (y - y0) / sy * kSize;
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"4\" fill=\"" << (gap <= good ? "#2a9d8f" : "#bbbbbb")
        << "\"><title>" << name << " gap=" << format_double(gap) << "</title></circle>\n";
  }
  out << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << kSize + kMargin + 35
      << "\" text-anchor=\"middle\" font-size=\"14\">PC1</text>\n";
  out << "<text x=\"15\" y=\"" << kMargin + kSize / 2 << "\" font-size=\"14\" transform=\"rotate(-90 15 "
      << kMargin + kSize / 2 << ")\">PC2</text>\n";
  out << "<text x=\"" << kMargin << "\" y=\"30\" font-size=\"14\">" << title << "</text>\n</svg>\n";
  return out.str();
}

int run_plot(const std::string& space, const std::string& results, const std::string& out_dir, double good,
             std::ostream& out) {
  if (!(good >= 0.0)) throw UsageError("--good must be non-negative");
  RunConfig cfg{"plot", {}};
  cfg.set("good", format_double(good));
  const std::vector<SpacePoint> pts = parse_file(space, [](const std::string& t) { return read_space_csv(t); });
  const std::vector<ResultRecord> recs = parse_file(results, [](const std::string& t) { return read_results(t); });
  std::map<std::string, const SpacePoint*> by_name;
  for (const SpacePoint& p : pts) by_name[p.instance_name] = &p;

  // Mean gap per (algorithm, instance) over successful runs.
  std::map<Algorithm, std::map<std::string, std::pair<double, int>>> gaps;
  for (const ResultRecord& r : recs) {
    if (r.status != RunStatus::Ok) continue;
    auto& g = gaps[r.algorithm][r.instance_name];
    g.first += r.gap;
    ++g.second;
  }
  fs::create_directories(out_dir);
  int files = 0;
  for (Algorithm alg : kAllAlgorithms) {
    auto it = gaps.find(alg);
    if (it == gaps.end()) continue;
    std::vector<std::tuple<std::string, double, double, double>> rows;
    for (const auto& [name, g] : it->second) {
      auto p = by_name.find(name);
      if (p == by_name.end()) throw Inconsistency("instance '" + name + "' is missing from " + space);
      rows.emplace_back(name, p->second->pc1, p->second->pc2, g.first / g.second);
    }
    const std::string alg_name(algorithm_name(alg));
    std::ostringstream csv;
    csv << "# " << digest_line(cfg) << " algorithm=" << alg_name << '\n';
    csv << "instance_name,PC1,PC2,gap,good\n";
    for (const auto& [name, x, y, gap] : rows) {
      csv << name << ',' << format_double(x) << ',' << format_double(y) << ',' << format_double(gap) << ','
          << (gap <= good ? 1 : 0) << '\n';
    }
    atomic_write(fs::path(out_dir) / ("footprint_" + alg_name + ".csv"), csv.str());
    atomic_write(fs::path(out_dir) / ("footprint_" + alg_name + ".svg"),
                 footprint_svg(rows, good, alg_name + " (gap <= " + format_double(good) + ")"));
    files += 2;
  }
  out << "wrote " << files << " footprint files to " << out_dir << '\n';
  return kOk;
}

}  // namespace

std::string RunConfig::digest() const {
  std::string text = std::string(kFormatVersion) + "\n" + subcommand + "\n";
  for (const auto& [k, v] : settings) text += k + "=" + v + "\n";
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash_label(text);
  return out.str();
}

void atomic_write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string write_features_csv(const std::vector<FeatureRow>& rows, std::string_view digest) {
  std::ostringstream out;
  if (!digest.empty()) out << "# " << digest << '\n';
  out << "instance_name";
  for (std::string_view n : feature_names()) out << ',' << n;
  out << '\n';
  for (const FeatureRow& r : rows) {
    out << r.instance_name;
    for (double v : r.features.values()) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

std::vector<FeatureRow> read_features_csv(std::string_view text) {
  const auto lines = data_lines(text);
  if (lines.empty()) throw ParseError(1, "missing header");
  const auto header = split(lines[0].second, ',');
  if (header.size() != FeatureVector::kCount + 1 || header[0] != "instance_name") {
    throw ParseError(lines[0].first, "expected instance_name and " + std::to_string(FeatureVector::kCount) +
                                         " feature columns");
  }
  for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
    if (header[i + 1] != feature_names()[i]) {
      throw ParseError(lines[0].first, "column " + std::to_string(i + 2) + " should be " +
                                           std::string(feature_names()[i]));
    }
  }
  std::vector<FeatureRow> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split(lines[l].second, ',');
    if (cells.size() != header.size()) throw ParseError(lines[l].first, "wrong number of columns");
    std::array<double, FeatureVector::kCount> v{};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_double(cells[i + 1], lines[l].first);
    out.push_back({cells[0], FeatureVector::from_values(v)});
  }
  return out;
}

std::vector<SpacePoint> read_space_csv(std::string_view text) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines[0].second != "instance_name,PC1,PC2") {
    throw ParseError(lines.empty() ? 1 : lines[0].first, "expected header instance_name,PC1,PC2");
  }
  std::vector<SpacePoint> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split(lines[l].second, ',');
    if (cells.size() != 3) throw ParseError(lines[l].first, "wrong number of columns");
    out.push_back({cells[0], parse_double(cells[1], lines[l].first), parse_double(cells[2], lines[l].first)});
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Car sequencing solvers and instance-space tools", "carseq"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate instance families");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Base seed");
  g->add_option("--families", gen.families, "Comma-separated family names, or all");
  g->add_option("--sizes", gen.sizes, "Numbers of cars")->delimiter(',');
  g->add_option("--replicates", gen.replicates, "Instances per family and size");

  std::string feat_in, feat_out;
  auto* f = app.add_subcommand("features", "Extract instance features");
  f->add_option("--instances", feat_in, "Instance file or directory")->required();
  f->add_option("--out", feat_out, "Output CSV")->required();

  std::string proj_in, proj_mode = "fixed", proj_out;
  auto* p = app.add_subcommand("project", "Project features to two dimensions");
  p->add_option("--features", proj_in, "Features CSV")->required();
  p->add_option("--mode", proj_mode, "fixed or refit");
  p->add_option("--out", proj_out, "Output CSV")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve one instance");
  s->add_option("--alg", sol.alg, "exact, lazy, lraco, lns10, lnslcm or adaptive")->required();
  s->add_option("--in", sol.in, "Instance file")->required();
  s->add_option("--time", sol.time, "Time limit in seconds");
  s->add_option("--seed", sol.seed, "Random seed");
  auto* win = s->add_option("--window", sol.window, "LNS window size");
  auto* sh = s->add_option("--shift", sol.shift, "LNS window shift");
  s->add_option("--clock", sol.clock, "work or wall");
  s->add_option("--out", sol.out, "Append the result record to this .runs file");

  ExperimentArgs ex;
  auto* e = app.add_subcommand("experiment", "Run algorithms over an instance set");
  e->add_option("--instances", ex.instances, "Instance directory")->required();
  e->add_option("--algs", ex.algs, "Comma-separated algorithms");
  e->add_option("--time", ex.time, "Time limit per run in seconds");
  e->add_option("--seeds", ex.seeds, "Runs per instance and algorithm");
  e->add_option("--seed", ex.seed, "Base seed");
  e->add_option("--jobs", ex.jobs, "Parallel runs (default CARSEQ_JOBS or 1)");
  e->add_option("--clock", ex.clock, "work or wall");
  e->add_option("--out", ex.out, "Output .runs file")->required();

  SelectArgs sel;
  auto* c = app.add_subcommand("select", "Train an algorithm-selection model");
  c->add_option("--results", sel.results, "Results .runs file")->required();
  c->add_option("--features", sel.features, "Features CSV")->required();
  c->add_option("--pair", sel.pair, "Algorithms A:B");
  c->add_option("--model", sel.model, "dt, knn or zeror");
  c->add_option("--depth", sel.depth, "Tree depth");
  c->add_option("--k", sel.k, "Neighbours");
  c->add_option("--cv", sel.cv, "FOLDSxREPEATS");
  c->add_option("--seed", sel.seed, "Cross-validation seed");
  c->add_option("--tolerance", sel.tolerance, "Gap difference counted as a tie");
  c->add_option("--view", sel.view, "full or usage-ops");
  c->add_option("--resolution", sel.resolution, "Boundary grid cells per side");
  c->add_option("--out", sel.out, "model.txt,boundary.csv,boundary.svg")->required();

  std::string plot_space, plot_results, plot_dir;
  double plot_good = 0.05;
  auto* pl = app.add_subcommand("plot", "Footprint scatter data per algorithm");
  pl->add_option("--space", plot_space, "Projection CSV")->required();
  pl->add_option("--results", plot_results, "Results .runs file")->required();
  pl->add_option("--out-dir", plot_dir, "Output directory")->required();
  pl->add_option("--good", plot_good, "Largest gap counted as good");

  std::vector<std::string> argv{"carseq"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<char*> ptrs;
  for (std::string& a : argv) ptrs.push_back(a.data());
  try {
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::CallForHelp& ex_) {
    return app.exit(ex_, out, err);
  } catch (const CLI::CallForAllHelp& ex_) {
    return app.exit(ex_, out, err);
  } catch (const CLI::ParseError& ex_) {
    app.exit(ex_, out, err);
    return kUsage;
  }

  try {
    if (g->parsed()) return run_generate(gen, out);
    if (f->parsed()) return run_features(feat_in, feat_out, out);
    if (p->parsed()) return run_project(proj_in, proj_mode, proj_out, out);
    if (s->parsed()) return run_solve(sol, win->count() > 0, sh->count() > 0, out, err);
    if (e->parsed()) return run_experiment_cmd(ex, out);
    if (c->parsed()) return run_select(sel, out, err);
    if (pl->parsed()) return run_plot(plot_space, plot_results, plot_dir, plot_good, out);
  } catch (const UsageError& x) {
    err << "error: " << x.what() << '\n';
    return kUsage;
  } catch (const MissingFile& x) {
    err << "error: " << x.what() << '\n';
    return kMissingFile;
  } catch (const FileParseError& x) {
    err << "parse error: " << x.what() << '\n';
    return kParseError;
  } catch (const ParseError& x) {
    err << "parse error: " << x.what() << '\n';
    return kParseError;
  } catch (const Error& x) {
    err << "error: " << x.what() << '\n';
    return kInconsistent;
  } catch (const std::exception& x) {
    err << "internal error: " << x.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace carseq::cli
