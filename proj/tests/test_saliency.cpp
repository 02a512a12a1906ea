#include "meshmark/adjacency.hpp"
#include "meshmark/corpus.hpp"
#include "meshmark/normalize.hpp"
#include "meshmark/saliency.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace meshmark;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

Mesh scaled(Mesh m, double s) {
  for (auto& v : m.vertices) v *= s;
  return m;
}

}  // namespace

TEST_CASE("mean curvature on analytic surfaces") {
  const Mesh g = corpus::grid(20, 20);
  const CurvatureField flat = mean_curvature(g, build_adjacency(g));
  for (int y = 1; y < 19; ++y) {
    for (int x = 1; x < 19; ++x) CHECK(std::abs(flat.mean[y * 20 + x]) < 1e-6);
  }

  // Unit sphere: H = 1 within 10% at every level. The worst vertex sits at
  // the irregular valence-5 points and does not improve, the mean error does.
  double previous = 1e9;
  for (int level : {3, 4, 5}) {
    const Mesh s = corpus::icosphere(level);
    const CurvatureField c = mean_curvature(s, build_adjacency(s));
    double worst = 0.0, total = 0.0;
    for (double h : c.mean) {
      worst = std::max(worst, std::abs(h - 1.0));
      total += std::abs(h - 1.0);
    }
    CAPTURE(level);
    CHECK(worst < 0.1);
    CHECK(total / c.mean.size() < previous);
    previous = total / c.mean.size();
  }

  const Mesh big = corpus::icosphere(4, 2.0);
  const CurvatureField c2 = mean_curvature(big, build_adjacency(big));
  for (double h : c2.mean) CHECK(h == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("Euclidean neighborhoods") {
  Mesh line;
  line.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  line.faces = {{0, 1, 2}};
  CHECK(neighborhood(line, 1, 1.5) == std::vector<VertexId>{0, 1, 2});
  CHECK(neighborhood(line, 1, 1.0) == std::vector<VertexId>{1});  // strict inequality
  CHECK(neighborhood(line, 0, 0.5) == std::vector<VertexId>{0});
  CHECK(neighborhood(line, 0, 100.0).size() == 3);

  // Against a brute-force scan.
  const Mesh m = corpus::make("bumpy_sphere");
  for (VertexId v : {0u, 17u, 4000u, 10241u}) {
    std::vector<VertexId> expected;
    for (VertexId i = 0; i < m.vertex_count(); ++i) {
      if ((m.vertices[i] - m.vertices[v]).norm() < 0.2) expected.push_back(i);
    }
    CHECK(neighborhood(m, v, 0.2) == expected);
  }
}

TEST_CASE("Gaussian-weighted average") {
  Mesh two;
  two.vertices = {Vec3(0, 0, 0), Vec3(0.3, 0, 0), Vec3(50, 0, 0)};
  two.faces = {{0, 1, 2}};
  const std::vector<double> field{0.0, 1.0, 9.0};
  CHECK(gaussian_weighted_average(two, field, 0, 0.3) ==
        doctest::Approx(std::exp(-0.5) / (1.0 + std::exp(-0.5))).epsilon(1e-12));
  CHECK(gaussian_weighted_average(two, field, 0, 0.3) == doctest::Approx(0.37754).epsilon(1e-4));
  // Window 2 sigma excludes the neighbor.
  CHECK(gaussian_weighted_average(two, field, 0, 0.1) == 0.0);
  const std::vector<double> constant(3, 2.5);
  CHECK(gaussian_weighted_average(two, constant, 1, 0.4) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("saliency sanity") {
  const Mesh ico = corpus::icosphere(4);
  const SaliencyMap s = compute_saliency(ico, 0.003 * principal_bbox_diagonal(ico) * 10.0);
  const CurvatureField c = mean_curvature(ico, build_adjacency(ico));
  std::vector<double> abs_curv;
  for (double h : c.mean) abs_curv.push_back(std::abs(h));
  CHECK(*std::max_element(s.values.begin(), s.values.end()) < 0.05 * mean_of(abs_curv));

  const Mesh g = corpus::grid(40, 40);
  const SaliencyMap flat = compute_saliency(g, 0.05);
  CHECK(*std::max_element(flat.values.begin(), flat.values.end()) < 1e-6);

  const Mesh bump = corpus::bump_grid(60, 0.15, 0.06);
  const SaliencyMap b = compute_saliency(bump, 0.02);
  const auto top = std::max_element(b.values.begin(), b.values.end()) - b.values.begin();
  const Vec3 p = bump.vertices[top];
  CHECK(std::hypot(p.x() - 0.5, p.y() - 0.5) < 3.0 * 0.06);
  CHECK(p.z() > 0.01);
}

TEST_CASE("saliency is invariant under rigid motion") {
  const Mesh m = corpus::make("ellipsoid");
  const double sigma = 0.003 * principal_bbox_diagonal(m);
  const SaliencyMap a = compute_saliency(m, sigma);
  Mesh moved = m;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(1.1, Vec3(-1, 0.5, 2).normalized()).toRotationMatrix();
  for (auto& v : moved.vertices) v = r * v + Vec3(4, -3, 2);
  const SaliencyMap b = compute_saliency(moved, sigma);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("saliency scales as curvature") {
  // Doubling the mesh and sigma halves curvature and therefore saliency.
  const Mesh m = corpus::make("bumpy_sphere");
  const SaliencyMap a = compute_saliency(m, 0.05);
  const SaliencyMap b = compute_saliency(scaled(m, 2.0), 0.10);
  for (std::size_t i = 0; i < a.values.size(); i += 97) CHECK(b.values[i] == doctest::Approx(0.5 * a.values[i]).epsilon(1e-6));
}

TEST_CASE("salient vertex selection") {
  CHECK(salient_count(10, 0.7) == 7);
  CHECK(salient_count(3, 1.0) == 3);
  CHECK(salient_count(11, 0.7) == 8);

  const std::vector<double> sal{5, 4, 3, 2, 1, 0, 0, 0, 0, 0};
  const std::vector<double> norms{1, 2, 3, 4, 5, 0.5, 6, 7, 8, 9};
  auto picked = select_salient(sal, norms, 0.7);
  std::sort(picked.begin(), picked.end());
  // Top five by saliency, then the two zero-saliency vertices of lowest norm (5 and 6).
  CHECK(picked == std::vector<VertexId>{0, 1, 2, 3, 4, 5, 6});

  const std::vector<double> equal(6, 1.0);
  const std::vector<double> n2{0.9, 0.1, 0.5, 0.3, 0.7, 0.2};
  CHECK(select_salient(equal, n2, 0.5) == std::vector<VertexId>{1, 5, 3});
  CHECK(select_salient(equal, n2, 1.0).size() == 6);
}
