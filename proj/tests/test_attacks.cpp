#include "meshmark/attacks.hpp"
#include "meshmark/corpus.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/normalize.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace meshmark;
using namespace meshmark::attacks;

namespace {

std::size_t edge_count(const Mesh& m) {
  std::set<std::pair<VertexId, VertexId>> edges;
  for (const Face& f : m.faces) {
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(f[k], f[(k + 1) % 3]));
  }
  return edges.size();
}

double mean_norm(const Mesh& m) {
  double s = 0.0;
  for (const auto& v : m.vertices) s += v.norm();
  return s / m.vertex_count();
}

}  // namespace

TEST_CASE("additive noise") {
  const Mesh m = corpus::make("bumpy_sphere");
  CHECK(add_noise(m, 0.0, 5).vertices == m.vertices);
  const Mesh a = add_noise(m, 0.5, 5);
  CHECK(a.vertices == add_noise(m, 0.5, 5).vertices);
  CHECK(a.vertices != add_noise(m, 0.5, 6).vertices);
  CHECK(a.faces == m.faces);
  const double expected = 0.005 * mean_centered_norm(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m.vertex_count(); ++i) total += (a.vertices[i] - m.vertices[i]).norm();
  CHECK(total / m.vertex_count() == doctest::Approx(expected).epsilon(0.01));
  CHECK_THROWS_AS(add_noise(m, -1.0, 1), AttackSpecError);
}

TEST_CASE("Laplacian smoothing") {
  // Interior grid vertices sit at their ring mean. The free border shrinks,
  // and that reaches one more ring per iteration.
  const Mesh g = corpus::grid(20, 20);
  for (int iterations : {1, 5}) {
    const Mesh sg = laplacian_smooth(g, 0.1, iterations);
    for (int y = iterations; y < 20 - iterations; ++y) {
      for (int x = iterations; x < 20 - iterations; ++x) {
        CHECK((sg.vertices[y * 20 + x] - g.vertices[y * 20 + x]).norm() < 1e-12);
      }
    }
    for (const auto& p : sg.vertices) CHECK(p.z() == 0.0);
  }
  const Mesh ico = corpus::icosphere(3);
  CHECK(laplacian_smooth(ico, 0.1, 0).vertices == ico.vertices);
  double previous = mean_norm(ico);
  Mesh cur = ico;
  for (int i = 0; i < 50; ++i) {
    cur = laplacian_smooth(cur, 0.1, 1);
    const double n = mean_norm(cur);
    CHECK(n < previous);
    previous = n;
  }
  // Iterating one step at a time equals one call with all iterations.
  const Mesh all = laplacian_smooth(ico, 0.1, 50);
  for (std::size_t i = 0; i < ico.vertex_count(); ++i) CHECK((all.vertices[i] - cur.vertices[i]).norm() < 1e-14);

  // One hand-checked Jacobi step on a single triangle.
  Mesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0)};
  tri.faces = {{0, 1, 2}};
  const Mesh st = laplacian_smooth(tri, 0.5, 1);
  CHECK((st.vertices[0] - Vec3(0.75, 0.75, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(laplacian_smooth(tri, 1.0, 1), AttackSpecError);
}

TEST_CASE("coordinate quantization") {
  const Mesh m = corpus::make("vase");
  const Mesh q = quantize_coords(m, 7);
  const BoundingBox box = bounding_box(m.vertices);
  for (int axis = 0; axis < 3; ++axis) {
    std::set<double> levels;
    for (const auto& v : q.vertices) levels.insert(v[axis]);
    CHECK(levels.size() <= 128);
    const double step = (box.max[axis] - box.min[axis]) / 127.0;
    for (std::size_t i = 0; i < m.vertex_count(); i += 13) CHECK(std::abs(q.vertices[i][axis] - m.vertices[i][axis]) <= 0.5 * step * (1 + 1e-9));
    CHECK(*levels.begin() == doctest::Approx(box.min[axis]));
    CHECK(*levels.rbegin() == doctest::Approx(box.max[axis]));
  }
  CHECK_THROWS_AS(quantize_coords(m, 3), AttackSpecError);
}

TEST_CASE("similarity transforms") {
  const Mesh m = corpus::make("ellipsoid");
  const Similarity s = random_similarity(m, 17);
  CHECK((s.rotation.transpose() * s.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(s.rotation.determinant() == doctest::Approx(1.0));
  CHECK(s.scale >= 0.5);
  CHECK(s.scale <= 2.0);
  const Mesh t = similarity_transform(m, s);
  for (std::size_t i = 0; i < m.vertex_count(); i += 101) {
    CHECK((t.vertices[i] - (s.scale * s.rotation * m.vertices[i] + s.translation)).norm() < 1e-12);
  }
  // Pairwise distances scale uniformly.
  CHECK((t.vertices[5] - t.vertices[900]).norm() == doctest::Approx(s.scale * (m.vertices[5] - m.vertices[900]).norm()));
  Similarity bad;
  bad.scale = 0.0;
  CHECK_THROWS_AS(similarity_transform(m, bad), AttackSpecError);
  bad.scale = 1.0;
  bad.rotation(0, 0) = -1.0;
  CHECK_THROWS_AS(similarity_transform(m, bad), AttackSpecError);
}

TEST_CASE("subdivision counts") {
  const Mesh m = corpus::icosphere(2);
  const std::size_t v = m.vertex_count(), e = edge_count(m), f = m.face_count();
  const Mesh mid = subdivide_midpoint(m, 1);
  CHECK(mid.vertex_count() == v + e);
  CHECK(mid.face_count() == 4 * f);
  const Mesh loop = subdivide_loop(m, 1);
  CHECK(loop.vertex_count() == v + e);
  CHECK(loop.face_count() == 4 * f);
  const Mesh s3 = subdivide_sqrt3(m, 1);
  CHECK(s3.vertex_count() == v + f);
  CHECK(s3.face_count() == 3 * f);
  CHECK(subdivide_midpoint(m, 2).face_count() == 16 * f);

  // Midpoint keeps the original vertices and puts new ones on edge midpoints.
  for (std::size_t i = 0; i < v; ++i) CHECK(mid.vertices[i] == m.vertices[i]);
  // Loop on a sphere-like mesh stays close to the unit sphere but shrinks it.
  for (const auto& p : loop.vertices) CHECK(p.norm() < 1.0 + 1e-12);

  Mesh nonmanifold;
  nonmanifold.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)};
  nonmanifold.faces = {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
  CHECK_THROWS_AS(subdivide_loop(nonmanifold, 1), TopologyError);
  CHECK_THROWS_AS(subdivide_sqrt3(nonmanifold, 1), TopologyError);
}

TEST_CASE("Loop subdivision of a flat patch stays flat") {
  const Mesh g = corpus::grid(6, 6);
  for (const auto& p : subdivide_loop(g, 1).vertices) CHECK(std::abs(p.z()) < 1e-15);
  for (const auto& p : subdivide_sqrt3(g, 1).vertices) CHECK(std::abs(p.z()) < 1e-15);
}

TEST_CASE("cropping") {
  const Mesh m = corpus::make("ellipsoid");  // long axis along x
  const Mesh c = crop(m, 10.0);
  const std::size_t removed = m.vertex_count() - c.vertex_count();
  CHECK(removed >= static_cast<std::size_t>(std::floor(0.1 * m.vertex_count())));
  CHECK(removed <= static_cast<std::size_t>(std::ceil(0.1 * m.vertex_count())));
  CHECK_NOTHROW(validate(c));
  // The removed cap lies at one end of the long axis.
  const BoundingBox before = bounding_box(m.vertices), after = bounding_box(c.vertices);
  const double cut = std::max(before.max.x() - after.max.x(), after.min.x() - before.min.x());
  CHECK(cut > 0.3);
  CHECK_THROWS_AS(crop(m, 0.0), AttackSpecError);
  CHECK_THROWS_AS(crop(m, 100.0), AttackSpecError);
}

TEST_CASE("element reordering keeps geometry") {
  const Mesh m = corpus::make("torus");
  for (int type : {1, 2, 3}) {
    const Mesh r = reorder_elements(m, type, 3);
    CHECK(r.vertex_count() == m.vertex_count());
    CHECK(r.face_count() == m.face_count());
    std::multiset<std::array<double, 9>> a, b;
    auto collect = [](const Mesh& mesh, std::multiset<std::array<double, 9>>& out) {
      for (const Face& f : mesh.faces) {
        std::array<Vec3, 3> p{mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]};
        // Rotate so the lexicographically smallest corner is first (orientation kept).
        int k = 0;
        for (int j = 1; j < 3; ++j) {
          if (lex_less(p[j], p[k])) k = j;
        }
        std::array<double, 9> key;
        for (int j = 0; j < 3; ++j) {
          for (int c = 0; c < 3; ++c) key[3 * j + c] = p[(k + j) % 3][c];
        }
        out.insert(key);
      }
    };
    collect(m, a);
    collect(r, b);
    CHECK(a == b);
    if (type != 2) CHECK(r.vertices != m.vertices);
    if (type == 2) CHECK(r.vertices == m.vertices);
  }
}

TEST_CASE("attack grammar") {
  CHECK(parse_attack("noise:0.3").kind == Kind::kNoise);
  CHECK(parse_attack("smooth:0.1,30").params == std::vector<double>{0.1, 30});
  CHECK(parse_attack("quant:9").params == std::vector<double>{9});
  CHECK(parse_attack("sim:4").kind == Kind::kSimilarity);
  CHECK(parse_attack("subdiv:loop,1").kind == Kind::kSubdivLoop);
  CHECK(parse_attack("subdiv:sqrt3,1").kind == Kind::kSubdivSqrt3);
  CHECK(parse_attack("subdiv:midpoint,2").kind == Kind::kSubdivMidpoint);
  CHECK(parse_attack("crop:10").kind == Kind::kCrop);
  CHECK(parse_attack("reorder:2").kind == Kind::kReorder);
  CHECK(parse_attack("noise:0.3@77").seed == 77);
  for (const char* text : {"smooth:0.1,30", "subdiv:loop,1", "noise:0.05", "quant:9", "crop:10", "reorder:3"}) {
    CHECK(parse_attack(text).to_string() == text);
  }
  for (const char* bad : {"", "noise", "noise:", "noise:abc", "smooth:0.1", "smooth:1.5,3", "quant:2", "subdiv:catmull,1",
                          "reorder:4", "crop:150", "blur:3", "noise:0.1,2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_attack(bad), AttackSpecError);
  }
  const Mesh m = corpus::icosphere(2);
  CHECK(apply(m, parse_attack("noise:0")).vertices == m.vertices);
}

TEST_CASE("subdivision worked cases") {
  Mesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 2, 0)};
  tri.faces = {{0, 1, 2}};
  const Mesh mid = subdivide_midpoint(tri, 1);
  CHECK(mid.face_count() == 4);
  CHECK(mid.vertex_count() == 6);
  // New vertices lie on the old edges.
  for (std::size_t i = 3; i < 6; ++i) {
    const Vec3& p = mid.vertices[i];
    CHECK((p.y() == 0.0 || p.x() == 0.0 || p.x() + p.y() == doctest::Approx(2.0)));
  }

  // Loop moves an icosahedron toward a smoother, rounder surface.
  const Mesh ico = corpus::icosphere(0);
  auto spread = [](const Mesh& m) {
    double lo = 1e9, hi = 0.0;
    for (const auto& p : m.vertices) {
      lo = std::min(lo, p.norm());
      hi = std::max(hi, p.norm());
    }
    return (hi - lo) / hi;
  };
  CHECK(spread(subdivide_loop(ico, 1)) < spread(subdivide_midpoint(ico, 1)));
}

TEST_CASE("crop worked cases") {
  // A strip of 10 vertices along x.
  Mesh strip;
  for (int i = 0; i < 10; ++i) strip.vertices.emplace_back(i, (i % 2) * 0.1, 0.0);
  for (VertexId i = 0; i + 2 < 10; ++i) strip.faces.push_back({i, i + 1, i + 2});
  const Mesh c = crop(strip, 30.0);
  REQUIRE(c.vertex_count() == 7);
  double max_x = -1.0;
  for (const auto& p : c.vertices) max_x = std::max(max_x, p.x());
  CHECK(max_x == 6.0);
  for (const Face& f : c.faces) {
    for (VertexId v : f) CHECK(v < c.vertex_count());
  }
  const Mesh tiny = crop(strip, 1e-6);
  CHECK(tiny.vertices == strip.vertices);
  CHECK(tiny.faces == strip.faces);
}

TEST_CASE("reordering is a permutation") {
  const Mesh m = corpus::icosphere(2);
  const Mesh r = reorder_elements(m, 3, 42);
  CHECK(reorder_elements(m, 3, 42).vertices == r.vertices);
  // Undo the vertex permutation by matching coordinates.
  std::map<std::array<double, 3>, VertexId> where;
  for (VertexId i = 0; i < m.vertex_count(); ++i) where[{m.vertices[i].x(), m.vertices[i].y(), m.vertices[i].z()}] = i;
  std::vector<VertexId> back(r.vertex_count());
  for (VertexId i = 0; i < r.vertex_count(); ++i) back[i] = where.at({r.vertices[i].x(), r.vertices[i].y(), r.vertices[i].z()});
  std::set<Face> original(m.faces.begin(), m.faces.end()), restored;
  for (const Face& f : r.faces) restored.insert({back[f[0]], back[f[1]], back[f[2]]});
  CHECK(original == restored);
}
