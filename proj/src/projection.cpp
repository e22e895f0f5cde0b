#include "carseq/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "carseq/error.hpp"

namespace carseq {

namespace {

constexpr std::array<Selected, 2> kPublishedLoading = {{
    {0.46417697, -0.13786325, -0.71876354, -0.36351993, 0.22506848, -0.25113443, -0.04415605, 0.03303967},
    {0.13118315, 0.40042554, 0.03250308, -0.44927092, -0.33242684, 0.21863308, 0.59942745, 0.31926206},
}};

// Relative eigenvalue cutoff below which a direction counts as absent.
constexpr double kRankTolerance = 1e-12;

}  // namespace

std::string_view mode_name(ProjectionMode mode) {
  return mode == ProjectionMode::Fixed ? "fixed" : "refit";
}

const std::array<std::string_view, kSelected>& selected_feature_names() {
  static const std::array<std::string_view, kSelected> names = {
      "num-ops", "num-classes", "min-usage", "ave-usage", "std-dev-usage", "ave-ops", "ave-pq", "max-pq"};
  return names;
}

Normalizers fit_normalizers(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw InvalidInput("cannot normalise an empty feature list");
  Normalizers n{0, 0, 0, 0};
  for (const auto& f : vectors) {
    n.num_cars = std::max(n.num_cars, f.num_cars);
    n.num_options = std::max(n.num_options, f.num_options);
    n.num_classes = std::max(n.num_classes, f.num_classes);
    n.lcm_q = std::max(n.lcm_q, static_cast<double>(f.lcm_q));
  }
  return n;
}

Selected select(const FeatureVector& f, const Normalizers& norm) {
  auto div = [](double x, double m) { return m > 0 ? x / m : 0.0; };
  return {div(f.num_options, norm.num_options),
          div(f.num_classes, norm.num_classes),
          f.usage_min,
          f.usage_ave,
          f.usage_std,
          f.ave_ops,
          f.pq_ave,
          f.pq_max};
}

std::vector<Selected> normalize(const std::vector<FeatureVector>& vectors) {
  const Normalizers norm = fit_normalizers(vectors);
  std::vector<Selected> out;
  out.reserve(vectors.size());
  for (const auto& f : vectors) out.push_back(select(f, norm));
  return out;
}

ProjectionModel fixed_model(const Normalizers& norm) {
  ProjectionModel m;
  m.mode = ProjectionMode::Fixed;
  m.loading = kPublishedLoading;
  m.normalizers = norm;
  return m;
}

ProjectionModel fit_pca(const std::vector<Selected>& rows) {
  const std::set<Selected> distinct(rows.begin(), rows.end());
  if (distinct.size() < 3) throw DegenerateData("PCA needs at least three distinct feature vectors");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kSelected));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kSelected; ++j) x(i, static_cast<Eigen::Index>(j)) = rows[static_cast<std::size_t>(i)][j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DegenerateData("eigen-decomposition did not converge");
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::Index last = values.size() - 1;
  const double scale = std::max(values(last), 0.0);
  if (scale <= 0 || values(last - 1) <= kRankTolerance * scale) {
    throw DegenerateData("feature covariance has rank below two");
  }

  ProjectionModel m;
  m.mode = ProjectionMode::Recomputed;
  for (std::size_t r = 0; r < 2; ++r) {
    Eigen::VectorXd v = solver.eigenvectors().col(last - static_cast<Eigen::Index>(r));
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    for (std::size_t j = 0; j < kSelected; ++j) m.loading[r][j] = v(static_cast<Eigen::Index>(j));
    m.explained[r] = values(last - static_cast<Eigen::Index>(r));
  }
  for (std::size_t j = 0; j < kSelected; ++j) m.center[j] = mean(static_cast<Eigen::Index>(j));
  return m;
}

Point2 project(const ProjectionModel& model, const Selected& v) {
  Point2 out{0.0, 0.0};
  for (std::size_t r = 0; r < 2; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kSelected; ++j) acc += model.loading[r][j] * (v[j] - model.center[j]);
    out[r] = acc;
  }
  return out;
}

Point2 project(const ProjectionModel& model, std::span<const double> v) {
  if (v.size() != kSelected) {
    throw InvalidInput("projection expects " + std::to_string(kSelected) + " features, got " +
                       std::to_string(v.size()));
  }
  Selected s{};
  std::copy(v.begin(), v.end(), s.begin());
  return project(model, s);
}

}  // namespace carseq
