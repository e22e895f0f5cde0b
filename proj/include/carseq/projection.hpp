#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "carseq/features.hpp"

namespace carseq {

enum class ProjectionMode { Fixed, Recomputed };

std::string_view mode_name(ProjectionMode mode);  // "fixed" or "refit"

inline constexpr std::size_t kSelected = 8;
using Selected = std::array<double, kSelected>;
using Point2 = std::array<double, 2>;

/// num-ops, num-classes, min-usage, ave-usage, std-dev-usage, ave-ops, ave-pq, max-pq
const std::array<std::string_view, kSelected>& selected_feature_names();

/// Dataset maxima of the features that are not already fractions.
struct Normalizers {
  double num_cars = 1;
  double num_options = 1;
  double num_classes = 1;
  double lcm_q = 1;
};

Normalizers fit_normalizers(const std::vector<FeatureVector>& vectors);

/// Divides by the stored maxima and keeps the eight projected features.
Selected select(const FeatureVector& f, const Normalizers& norm);

/// Fits the maxima on `vectors` and selects. Throws InvalidInput on an empty list.
std::vector<Selected> normalize(const std::vector<FeatureVector>& vectors);

struct ProjectionModel {
  ProjectionMode mode = ProjectionMode::Fixed;
  std::array<Selected, 2> loading{};
  Selected center{};            // zero in fixed mode
  std::array<double, 2> explained{};  // eigenvalues, refit mode only
  Normalizers normalizers;
};

/// The published 2x8 loading, applied without centering.
ProjectionModel fixed_model(const Normalizers& norm = {});

/// Top two eigenvectors of the centered covariance; each row's largest-magnitude
/// entry is made positive. Throws DegenerateData when fewer than three distinct
/// rows exist or the covariance has rank below two.
ProjectionModel fit_pca(const std::vector<Selected>& rows);

Point2 project(const ProjectionModel& model, const Selected& v);
/// Same, for an unchecked span; throws InvalidInput unless it has 8 entries.
Point2 project(const ProjectionModel& model, std::span<const double> v);

}  // namespace carseq
