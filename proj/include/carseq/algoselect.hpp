#pragma once

// Algorithm-selection classifiers over instance features, cross-validation,
// and decision-boundary export for a two-feature view.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carseq {

/// A: the first algorithm of the pair has the smaller gap; B: the second; Tie: within tolerance.
/// The declaration order is the tie-break order everywhere.
enum class Label { A, B, Tie };
inline constexpr int kLabelCount = 3;

std::string_view label_name(Label label);  // "A", "B", "TIE"
std::optional<Label> parse_label(std::string_view text);

struct SelectionRow {
  std::string instance_name;
  std::vector<double> features;
  Label label = Label::A;
};

struct SelectionDataset {
  std::vector<std::string> feature_names;
  std::vector<SelectionRow> rows;

  /// Throws InvalidInput on width mismatches or non-finite features.
  void validate() const;
  /// Columns `names`, in that order. Throws InvalidInput on an unknown name.
  SelectionDataset view(const std::vector<std::string>& names) const;
  std::array<int, kLabelCount> label_counts() const;
};

/// The two-feature view used for boundary plots.
inline const std::vector<std::string> kUsageOpsView = {"ave-usage", "ave-ops"};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Label predict(std::span<const double> features) const = 0;
  /// Human-readable model text; stable for a given fit.
  virtual std::string describe() const = 0;
};

/// Label with the most rows, ties to the earlier label.
Label majority_label(const std::array<int, kLabelCount>& counts);

class ZeroR final : public Classifier {
 public:
  explicit ZeroR(const SelectionDataset& train);
  Label predict(std::span<const double>) const override { return label_; }
  std::string describe() const override;

 private:
  Label label_;
};

class Knn final : public Classifier {
 public:
  /// Throws InvalidInput when k < 1 or k exceeds the training size.
  Knn(const SelectionDataset& train, int k);
  Label predict(std::span<const double> features) const override;
  std::string describe() const override;

 private:
  std::vector<std::vector<double>> points_;
  std::vector<Label> labels_;
  int k_;
};

class DecisionTree final : public Classifier {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1;
    int right = -1;
    Label label = Label::A;  // majority of the rows reaching the node
    int rows = 0;
  };

  /// Gini splits at midpoints of adjacent distinct values, depth at most `max_depth`.
  DecisionTree(const SelectionDataset& train, int max_depth);
  Label predict(std::span<const double> features) const override;
  std::string describe() const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;
  int leaves() const;

 private:
  int build(const SelectionDataset& train, std::vector<int> idx, int depth);

  std::vector<Node> nodes_;
  std::vector<std::string> names_;
  int max_depth_;
};

std::unique_ptr<Classifier> zero_r(const SelectionDataset& train);
std::unique_ptr<Classifier> knn(const SelectionDataset& train, int k = 3);
std::unique_ptr<Classifier> decision_tree(const SelectionDataset& train, int max_depth = 2);

struct ModelSpec {
  enum class Kind { ZeroR, Knn, Tree };
  Kind kind = Kind::Tree;
  int k = 3;
  int depth = 2;
};

std::string model_name(const ModelSpec& spec);  // "zeror", "knn", "dt"
std::optional<ModelSpec::Kind> parse_model_kind(std::string_view text);
std::unique_ptr<Classifier> fit(const ModelSpec& spec, const SelectionDataset& train);

double accuracy(const Classifier& model, const SelectionDataset& data);

struct CvResult {
  double mean_accuracy = 0.0;
  int folds = 0;
  int repeats = 0;
  /// False when some class had fewer rows than folds and plain folds were used.
  bool stratified = true;
};

/// Mean test accuracy over folds x repeats; each repeat reshuffles.
/// Throws InvalidInput when folds < 2 or folds exceeds the row count.
CvResult cross_validate(const SelectionDataset& data, const ModelSpec& spec, int folds, int repeats,
                        std::uint64_t seed);

/// Labels predicted at cell centres of a resolution x resolution grid over [0,1]^2.
struct BoundaryGrid {
  int resolution = 0;
  std::string x_name;
  std::string y_name;
  std::vector<Label> cells;  // row-major, row 0 at y near 0

  Label at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * resolution + ix]; }
};

/// `model` must take two features. Throws InvalidInput when resolution < 1.
BoundaryGrid export_boundary(const Classifier& model, int resolution, std::string x_name, std::string y_name);

std::string boundary_csv(const BoundaryGrid& grid, std::string_view header_comment = {});
/// Coloured cells plus an optional scatter of labelled points (two features each).
std::string boundary_svg(const BoundaryGrid& grid, const SelectionDataset* points = nullptr,
                         std::string_view title = {});

}  // namespace carseq
