#include "doctest.h"

#include <cmath>
#include <numbers>

#include "carseq/error.hpp"
#include "carseq/projection.hpp"
#include "carseq/rng.hpp"

using namespace carseq;

namespace {

// Published loading, copied column by column: row j holds (PC1, PC2) for feature j.
constexpr double kPublished[8][2] = {
    {0.46417697, 0.13118315},   {-0.13786325, 0.40042554}, {-0.71876354, 0.03250308},
    {-0.36351993, -0.44927092}, {0.22506848, -0.33242684}, {-0.25113443, 0.21863308},
    {-0.04415605, 0.59942745},  {0.03303967, 0.31926206},
};

double gaussian(Rng& rng) {
  const double u = 1.0 - rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * rng.uniform());
}

Selected random_selected(Rng& rng) {
  Selected v{};
  for (double& x : v) x = rng.uniform() * 2.0 - 1.0;
  return v;
}

double dot(const Selected& a, const Selected& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < kSelected; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

TEST_CASE("unit vectors reproduce the published coefficients") {
  const ProjectionModel m = fixed_model();
  for (std::size_t j = 0; j < kSelected; ++j) {
    Selected e{};
    e[j] = 1.0;
    const Point2 pt = project(m, e);
    CHECK(std::abs(pt[0] - kPublished[j][0]) <= 1e-9);
    CHECK(std::abs(pt[1] - kPublished[j][1]) <= 1e-9);
  }
}

TEST_CASE("fixed projection is linear") {
  const ProjectionModel m = fixed_model();
  CHECK(project(m, Selected{}) == Point2{0.0, 0.0});
  Rng rng(8);
  for (int n = 0; n < 1000; ++n) {
    const Selected u = random_selected(rng);
    const Selected v = random_selected(rng);
    const double a = rng.uniform() * 4.0 - 2.0;
    Selected w{};
    for (std::size_t j = 0; j < kSelected; ++j) w[j] = a * u[j] + v[j];
    const Point2 pu = project(m, u), pv = project(m, v), pw = project(m, w);
    for (std::size_t r = 0; r < 2; ++r) CHECK(std::abs(pw[r] - (a * pu[r] + pv[r])) <= 1e-12);
  }
}

TEST_CASE("span projection checks the length") {
  const ProjectionModel m = fixed_model();
  const std::vector<double> seven(7, 0.0);
  CHECK_THROWS_AS(project(m, std::span<const double>(seven)), InvalidInput);
}

TEST_CASE("normalising a single instance maps counts to one") {
  FeatureVector f;
  f.num_cars = 100;
  f.num_options = 5;
  f.num_classes = 25;
  f.usage_min = 0.9;
  f.ave_ops = 0.4;
  f.pq_max = 0.75;
  const auto rows = normalize({f});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 1.0);
  CHECK(rows[0][1] == 1.0);
  CHECK(rows[0][2] == 0.9);
  CHECK(rows[0][5] == 0.4);
  CHECK(rows[0][7] == 0.75);
  CHECK_THROWS_AS(normalize({}), InvalidInput);
}

TEST_CASE("normalising divides by the dataset maxima") {
  FeatureVector a, b;
  a.num_options = 5;
  a.num_classes = 20;
  b.num_options = 10;
  b.num_classes = 25;
  const auto rows = normalize({a, b});
  CHECK(rows[0][0] == 0.5);
  CHECK(rows[0][1] == 0.8);
  CHECK(rows[1][0] == 1.0);
}

TEST_CASE("PCA recovers planted directions") {
  Rng rng(21);
  // Two orthonormal directions by Gram-Schmidt on random vectors.
  Selected u = random_selected(rng), v = random_selected(rng);
  const double nu = std::sqrt(dot(u, u));
  for (double& x : u) x /= nu;
  const double uv = dot(u, v);
  for (std::size_t j = 0; j < kSelected; ++j) v[j] -= uv * u[j];
  const double nv = std::sqrt(dot(v, v));
  for (double& x : v) x /= nv;
  // Balanced +-3 / +-1 scores: zero mean, uncorrelated, variances 9 and 1.
  Selected offset = random_selected(rng);
  std::vector<Selected> rows;
  for (double a : {-3.0, 3.0}) {
    for (double b : {-1.0, 1.0}) {
      Selected x{};
      for (std::size_t j = 0; j < kSelected; ++j) x[j] = offset[j] + a * u[j] + b * v[j];
      rows.push_back(x);
    }
  }
  auto sign_fixed = [](Selected d) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < kSelected; ++j) {
      if (std::abs(d[j]) > std::abs(d[arg])) arg = j;
    }
    if (d[arg] < 0) {
      for (double& x : d) x = -x;
    }
    return d;
  };
  const ProjectionModel m = fit_pca(rows);
  CHECK(m.mode == ProjectionMode::Recomputed);
  const Selected eu = sign_fixed(u), ev = sign_fixed(v);
  for (std::size_t j = 0; j < kSelected; ++j) {
    CHECK(std::abs(m.loading[0][j] - eu[j]) <= 1e-6);
    CHECK(std::abs(m.loading[1][j] - ev[j]) <= 1e-6);
  }
  CHECK(m.explained[0] == doctest::Approx(9.0));
  CHECK(m.explained[1] == doctest::Approx(1.0));
  CHECK(std::abs(dot(m.loading[0], m.loading[1])) <= 1e-9);
  CHECK(std::abs(dot(m.loading[0], m.loading[0]) - 1.0) <= 1e-9);
  // The centre maps to the origin.
  const Point2 c = project(m, offset);
  CHECK(std::abs(c[0]) <= 1e-9);
  CHECK(std::abs(c[1]) <= 1e-9);
}

TEST_CASE("isotropic data has near-equal leading eigenvalues") {
  Rng rng(5);
  std::vector<Selected> rows(20000);
  for (Selected& r : rows) {
    for (double& x : r) x = gaussian(rng);
  }
  const ProjectionModel m = fit_pca(rows);
  // Sampling spread of the top eigenvalues at n = 20000 is a few percent.
  CHECK(m.explained[0] / m.explained[1] < 1.1);
  CHECK(m.explained[0] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("degenerate data is refused") {
  std::vector<Selected> line;
  for (int i = 0; i < 10; ++i) {
    Selected x{};
    for (std::size_t j = 0; j < kSelected; ++j) x[j] = i * (1.0 + static_cast<double>(j));
    line.push_back(x);
  }
  CHECK_THROWS_AS(fit_pca(line), DegenerateData);
  std::vector<Selected> two(5, Selected{});
  two[1][0] = 1.0;
  CHECK_THROWS_AS(fit_pca(two), DegenerateData);
}
