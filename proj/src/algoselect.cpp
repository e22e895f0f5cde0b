#include "carseq/algoselect.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "carseq/error.hpp"
#include "carseq/formats.hpp"
#include "carseq/kernels.hpp"
#include "carseq/rng.hpp"

namespace carseq {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::A: return "A";
    case Label::B: return "B";
    case Label::Tie: return "TIE";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "A") return Label::A;
  if (text == "B") return Label::B;
  if (text == "TIE") return Label::Tie;
  return std::nullopt;
}

void SelectionDataset::validate() const {
  for (const SelectionRow& r : rows) {
    if (r.features.size() != feature_names.size()) {
      throw InvalidInput("row '" + r.instance_name + "' has " + std::to_string(r.features.size()) +
                         " features, expected " + std::to_string(feature_names.size()));
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) throw InvalidInput("row '" + r.instance_name + "' has a non-finite feature");
    }
  }
}

SelectionDataset SelectionDataset::view(const std::vector<std::string>& names) const {
  std::vector<std::size_t> cols;
  for (const std::string& n : names) {
    auto it = std::find(feature_names.begin(), feature_names.end(), n);
    if (it == feature_names.end()) throw InvalidInput("unknown feature '" + n + "'");
    cols.push_back(static_cast<std::size_t>(it - feature_names.begin()));
  }
  SelectionDataset out;
  out.feature_names = names;
  out.rows.reserve(rows.size());
  for (const SelectionRow& r : rows) {
    SelectionRow v{r.instance_name, {}, r.label};
    for (std::size_t c : cols) v.features.push_back(r.features[c]);
    out.rows.push_back(std::move(v));
  }
  return out;
}

std::array<int, kLabelCount> SelectionDataset::label_counts() const {
  std::array<int, kLabelCount> c{};
  for (const SelectionRow& r : rows) ++c[static_cast<std::size_t>(r.label)];
  return c;
}

Label majority_label(const std::array<int, kLabelCount>& counts) {
  int best = 0;
  for (int i = 1; i < kLabelCount; ++i) {
    if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(best)]) best = i;
  }
  return static_cast<Label>(best);
}

namespace {

void require_rows(const SelectionDataset& train) {
  if (train.rows.empty()) throw InvalidInput("training set is empty");
  train.validate();
}

}  // namespace

// ZeroR

ZeroR::ZeroR(const SelectionDataset& train) {
  require_rows(train);
  label_ = majority_label(train.label_counts());
}

std::string ZeroR::describe() const { return "zeror predict=" + std::string(label_name(label_)) + "\n"; }

// KNN

Knn::Knn(const SelectionDataset& train, int k) : k_(k) {
  require_rows(train);
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (static_cast<std::size_t>(k) > train.rows.size()) {
    throw InvalidInput("k = " + std::to_string(k) + " exceeds the training size " + std::to_string(train.rows.size()));
  }
  for (const SelectionRow& r : train.rows) {
    points_.push_back(r.features);
    labels_.push_back(r.label);
  }
}

Label Knn::predict(std::span<const double> features) const {
  if (features.size() != points_.front().size()) throw InvalidInput("feature count mismatch");
  std::vector<std::pair<double, int>> d(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    d[i] = {kernels::squared_distance(features, points_[i]), static_cast<int>(i)};
  }
  // Pairs compare by distance, then row index.
  std::partial_sort(d.begin(), d.begin() + k_, d.end());
  std::array<int, kLabelCount> votes{};
  for (int i = 0; i < k_; ++i) ++votes[static_cast<std::size_t>(labels_[static_cast<std::size_t>(d[static_cast<std::size_t>(i)].second)])];
  return majority_label(votes);
}

std::string Knn::describe() const {
  return "knn k=" + std::to_string(k_) + " train=" + std::to_string(points_.size()) + "\n";
}

// Decision tree

namespace {

double gini(const std::array<int, kLabelCount>& c, int n) {
  if (n == 0) return 0.0;
  double s = 1.0;
  for (int v : c) {
    const double p = static_cast<double>(v) / n;
    s -= p * p;
  }
  return s;
}

}  // namespace

DecisionTree::DecisionTree(const SelectionDataset& train, int max_depth)
    : names_(train.feature_names), max_depth_(max_depth) {
  require_rows(train);
  if (max_depth < 0) throw InvalidInput("tree depth must be non-negative");
  std::vector<int> idx(train.rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  build(train, std::move(idx), 0);
}

int DecisionTree::build(const SelectionDataset& train, std::vector<int> idx, int depth) {
  const int self = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  std::array<int, kLabelCount> counts{};
  for (int i : idx) ++counts[static_cast<std::size_t>(train.rows[static_cast<std::size_t>(i)].label)];
  const int n = static_cast<int>(idx.size());
  nodes_[static_cast<std::size_t>(self)].label = majority_label(counts);
  nodes_[static_cast<std::size_t>(self)].rows = n;
  const double parent = gini(counts, n);
  if (depth >= max_depth_ || parent == 0.0) return self;

  // Best split by weighted Gini; ties keep the lower feature, then the lower threshold.
  int best_f = -1;
  double best_t = 0.0;
  double best_score = parent - 1e-12;
  const std::size_t F = train.feature_names.size();
  std::vector<std::pair<double, Label>> col(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < F; ++f) {
    for (int i = 0; i < n; ++i) {
      const SelectionRow& r = train.rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      col[static_cast<std::size_t>(i)] = {r.features[f], r.label};
    }
    std::sort(col.begin(), col.end());
    std::array<int, kLabelCount> left{};
    for (int i = 0; i + 1 < n; ++i) {
      ++left[static_cast<std::size_t>(col[static_cast<std::size_t>(i)].second)];
      const double a = col[static_cast<std::size_t>(i)].first;
      const double b = col[static_cast<std::size_t>(i) + 1].first;
      if (a == b) continue;
      std::array<int, kLabelCount> right{};
      for (int c = 0; c < kLabelCount; ++c) right[static_cast<std::size_t>(c)] = counts[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
      const int nl = i + 1;
      const double score = (nl * gini(left, nl) + (n - nl) * gini(right, n - nl)) / n;
      if (score < best_score) {
        best_score = score;
        best_f = static_cast<int>(f);
        best_t = a + (b - a) / 2.0;
      }
    }
  }
  if (best_f < 0) return self;

  std::vector<int> li, ri;
  for (int i : idx) {
    (train.rows[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(best_f)] <= best_t ? li : ri).push_back(i);
  }
  const int l = build(train, std::move(li), depth + 1);
  const int r = build(train, std::move(ri), depth + 1);
  Node& node = nodes_[static_cast<std::size_t>(self)];
  node.feature = best_f;
  node.threshold = best_t;
  node.left = l;
  node.right = r;
  return self;
}

Label DecisionTree::predict(std::span<const double> features) const {
  if (features.size() != names_.size()) throw InvalidInput("feature count mismatch");
  int at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    at = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(at)].label;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    // Children are always created after their parent.
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

int DecisionTree::leaves() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

std::string DecisionTree::describe() const {
  std::ostringstream out;
  out << "dt max_depth=" << max_depth_ << " depth=" << depth() << " leaves=" << leaves() << '\n';
  auto rec = [&](auto& self, int at, int indent) -> void {
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (n.feature < 0) {
      out << pad << "predict " << label_name(n.label) << " (" << n.rows << " rows)\n";
      return;
    }
    const std::string& name = names_[static_cast<std::size_t>(n.feature)];
    out << pad << "if " << name << " <= " << format_double(n.threshold) << '\n';
    self(self, n.left, indent + 1);
    out << pad << "else\n";
    self(self, n.right, indent + 1);
  };
  rec(rec, 0, 0);
  return out.str();
}

std::unique_ptr<Classifier> zero_r(const SelectionDataset& train) { return std::make_unique<ZeroR>(train); }
std::unique_ptr<Classifier> knn(const SelectionDataset& train, int k) { return std::make_unique<Knn>(train, k); }
std::unique_ptr<Classifier> decision_tree(const SelectionDataset& train, int max_depth) {
  return std::make_unique<DecisionTree>(train, max_depth);
}

std::string model_name(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelSpec::Kind::ZeroR: return "zeror";
    case ModelSpec::Kind::Knn: return "knn";
    case ModelSpec::Kind::Tree: return "dt";
  }
  return "?";
}

std::optional<ModelSpec::Kind> parse_model_kind(std::string_view text) {
  if (text == "zeror") return ModelSpec::Kind::ZeroR;
  if (text == "knn") return ModelSpec::Kind::Knn;
  if (text == "dt") return ModelSpec::Kind::Tree;
  return std::nullopt;
}

std::unique_ptr<Classifier> fit(const ModelSpec& spec, const SelectionDataset& train) {
  switch (spec.kind) {
    case ModelSpec::Kind::ZeroR: return zero_r(train);
    case ModelSpec::Kind::Knn: return knn(train, spec.k);
    case ModelSpec::Kind::Tree: return decision_tree(train, spec.depth);
  }
  throw InvalidInput("unknown model");
}

double accuracy(const Classifier& model, const SelectionDataset& data) {
  if (data.rows.empty()) return 0.0;
  int hit = 0;
  for (const SelectionRow& r : data.rows) hit += model.predict(r.features) == r.label ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(data.rows.size());
}

CvResult cross_validate(const SelectionDataset& data, const ModelSpec& spec, int folds, int repeats,
                        std::uint64_t seed) {
  const int n = static_cast<int>(data.rows.size());
  if (folds < 2) throw InvalidInput("cross-validation needs at least 2 folds");
  if (folds > n) throw InvalidInput("folds (" + std::to_string(folds) + ") exceed rows (" + std::to_string(n) + ")");
  if (repeats < 1) throw InvalidInput("cross-validation needs at least 1 repeat");
  data.validate();

  CvResult res;
  res.folds = folds;
  res.repeats = repeats;
  const auto counts = data.label_counts();
  for (int c : counts) {
    if (c > 0 && c < folds) res.stratified = false;
  }

  const Rng root(seed);
  double sum = 0.0;
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int rep = 0; rep < repeats; ++rep) {
    Rng rng = root.split("cv", static_cast<std::uint64_t>(rep));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    if (res.stratified) {
      // Deal each class round-robin, continuing the fold counter across classes.
      int next = 0;
      for (int c = 0; c < kLabelCount; ++c) {
        for (int i : order) {
          if (static_cast<int>(data.rows[static_cast<std::size_t>(i)].label) != c) continue;
          fold_of[static_cast<std::size_t>(i)] = next;
          next = (next + 1) % folds;
        }
      }
    } else {
      for (int i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
    }
    for (int f = 0; f < folds; ++f) {
      SelectionDataset train, test;
      train.feature_names = test.feature_names = data.feature_names;
      for (int i = 0; i < n; ++i) {
        (fold_of[static_cast<std::size_t>(i)] == f ? test : train).rows.push_back(data.rows[static_cast<std::size_t>(i)]);
      }
      ModelSpec s = spec;
      if (s.kind == ModelSpec::Kind::Knn) s.k = std::min<int>(s.k, static_cast<int>(train.rows.size()));
      sum += accuracy(*fit(s, train), test);
    }
  }
  res.mean_accuracy = sum / (static_cast<double>(folds) * repeats);
  return res;
}

BoundaryGrid export_boundary(const Classifier& model, int resolution, std::string x_name, std::string y_name) {
  if (resolution < 1) throw InvalidInput("grid resolution must be at least 1");
  BoundaryGrid g;
  g.resolution = resolution;
  g.x_name = std::move(x_name);
  g.y_name = std::move(y_name);
  g.cells.resize(static_cast<std::size_t>(resolution) * resolution);
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      const std::array<double, 2> p{(ix + 0.5) / resolution, (iy + 0.5) / resolution};
      g.cells[static_cast<std::size_t>(iy) * resolution + ix] = model.predict(p);
    }
  }
  return g;
}

std::string boundary_csv(const BoundaryGrid& grid, std::string_view header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << grid.x_name << ',' << grid.y_name << ",label\n";
  for (int iy = 0; iy < grid.resolution; ++iy) {
    for (int ix = 0; ix < grid.resolution; ++ix) {
      out << format_double((ix + 0.5) / grid.resolution) << ',' << format_double((iy + 0.5) / grid.resolution) << ','
          << label_name(grid.at(ix, iy)) << '\n';
    }
  }
  return out.str();
}

namespace {

constexpr std::string_view kFill[kLabelCount] = {"#8ecae6", "#ffb703", "#d9d9d9"};
constexpr std::string_view kDot[kLabelCount] = {"#023047", "#9c4a00", "#555555"};

}  // namespace

std::string boundary_svg(const BoundaryGrid& grid, const SelectionDataset* points, std::string_view title) {
  constexpr int kSize = 400;
  constexpr int kMargin = 50;
  const double cell = static_cast<double>(kSize) / grid.resolution;
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kMargin << "\" height=\""
      << kSize + 2 * kMargin << "\">\n";
  if (!title.empty()) out << "<title>" << title << "</title>\n";
  for (int iy = 0; iy < grid.resolution; ++iy) {
    for (int ix = 0; ix < grid.resolution; ++ix) {
      out << "<rect x=\"" << kMargin + ix * cell << "\" y=\"" << kMargin + kSize - (iy + 1) * cell << "\" width=\""
          << cell << "\" height=\"" << cell << "\" fill=\"" << kFill[static_cast<int>(grid.at(ix, iy))]
          << "\" stroke=\"none\"/>\n";
    }
  }
  if (points != nullptr) {
    for (const SelectionRow& r : points->rows) {
      if (r.features.size() != 2) throw InvalidInput("boundary points need two features");
      out << "<circle cx=\"" << kMargin + r.features[0] * kSize << "\" cy=\"" << kMargin + kSize - r.features[1] * kSize
          << "\" r=\"3\" fill=\"" << kDot[static_cast<int>(r.label)] << "\"/>\n";
    }
  }
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << kSize + kMargin + 35
      << "\" text-anchor=\"middle\" font-size=\"14\">" << grid.x_name << "</text>\n";
  out << "<text x=\"15\" y=\"" << kMargin + kSize / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 "
      << kMargin + kSize / 2 << ")\">" << grid.y_name << "</text>\n";
  for (int i = 0; i < kLabelCount; ++i) {
    out << "<rect x=\"" << kMargin + i * 70 << "\" y=\"15\" width=\"12\" height=\"12\" fill=\"" << kFill[i] << "\"/>"
        << "<text x=\"" << kMargin + i * 70 + 16 << "\" y=\"26\" font-size=\"12\">" << label_name(static_cast<Label>(i))
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace carseq
