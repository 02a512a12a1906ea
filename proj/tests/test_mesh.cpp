#include "meshmark/adjacency.hpp"
#include "meshmark/corpus.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/mesh.hpp"
#include "meshmark/mesh_io.hpp"
#include "meshmark/normalize.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace meshmark;

namespace {

Mesh tetrahedron() {
  Mesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

ParseErrorKind parse_kind(std::string_view text, std::size_t* line = nullptr) {
  try {
    parse_off(text);
  } catch (const ParseError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  FAIL("no error raised");
  return ParseErrorKind::kIo;
}

}  // namespace

TEST_CASE("minimal OFF file") {
  const Mesh m = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  REQUIRE(m.vertex_count() == 3);
  REQUIRE(m.face_count() == 1);
  CHECK(m.faces[0] == Face{0, 1, 2});
  CHECK(m.vertices[1] == Vec3(1, 0, 0));
}

TEST_CASE("OFF errors carry kind and line") {
  std::size_t line = 0;
  CHECK(parse_kind("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n", &line) == ParseErrorKind::kIndexOutOfRange);
  CHECK(line == 6);
  CHECK(parse_kind("PLY\n") == ParseErrorKind::kBadHeader);
  CHECK(parse_kind("OFF\n3 1 0\n0 0 0\n1 0 0\n") == ParseErrorKind::kUnexpectedEnd);
  CHECK(parse_kind("OFF\n3 1 0\n0 0 0\n1 nan 0\n0 1 0\n3 0 1 2\n") == ParseErrorKind::kNonFiniteCoordinate);
  CHECK(parse_kind("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n") == ParseErrorKind::kNonTriangleFace);
  CHECK(parse_kind("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n") == ParseErrorKind::kRepeatedIndex);
  CHECK(parse_kind("") == ParseErrorKind::kBadHeader);
}

TEST_CASE("OFF and OBJ round trips") {
  const Mesh m = corpus::make("torus");
  for (const Mesh& back : {parse_off(write_off(m)), parse_obj(write_obj(m))}) {
    REQUIRE(back.vertex_count() == m.vertex_count());
    CHECK(back.faces == m.faces);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      worst = std::max(worst, (back.vertices[i] - m.vertices[i]).norm() / std::max(1.0, m.vertices[i].norm()));
    }
    CHECK(worst < 1e-9);
  }
  const Mesh twice = parse_off(write_off(parse_off(write_off(m))));
  CHECK(twice.vertices == parse_off(write_off(m)).vertices);
}

TEST_CASE("OBJ subset") {
  const Mesh m = parse_obj("# comment\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nf 1 2 3\n");
  REQUIRE(m.vertex_count() == 3);
  CHECK(m.faces[0] == Face{0, 1, 2});
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), ParseError);
}

TEST_CASE("unreadable file names the path") {
  try {
    read_mesh("/nonexistent/dir/model.off");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/model.off") != std::string::npos);
  }
}

TEST_CASE("vertex norms, rescale, bounding box") {
  Mesh m;
  m.vertices = {Vec3(3, 4, 0), Vec3(0, 0, 0), Vec3(1, 1, 1)};
  m.faces = {{0, 1, 2}};
  const auto n = vertex_norms(m);
  CHECK(n[0] == 5.0);
  CHECK(n[1] == 0.0);
  CHECK(n[2] == doctest::Approx(1.7320508).epsilon(1e-8));

  CHECK((rescale_vertex(Vec3(3, 4, 0), 10).vertex - Vec3(6, 8, 0)).norm() < 1e-15);
  CHECK(rescale_vertex(Vec3(1, 0, 0), 1).vertex == Vec3(1, 0, 0));
  const auto zero = rescale_vertex(Vec3::Zero(), 2.0);
  CHECK_FALSE(zero.rescaled);
  CHECK(zero.vertex == Vec3::Zero());

  Mesh cube;
  for (int i = 0; i < 8; ++i) cube.vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  cube.faces = {{0, 1, 2}};
  CHECK(bbox_diagonal(cube) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("mesh validation") {
  Mesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.faces = {{0, 1, 2}};
  CHECK_NOTHROW(validate(m));
  m.faces = {{0, 1, 3}};
  CHECK_THROWS_AS(validate(m), MeshError);
  m.faces.clear();
  CHECK_THROWS_AS(validate(m), MeshError);
}

TEST_CASE("adjacency rings") {
  Mesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  tri.faces = {{0, 1, 2}};
  CHECK(build_adjacency(tri).rings[0] == std::vector<VertexId>{1, 2});

  const Adjacency tet = build_adjacency(tetrahedron());
  for (const auto& ring : tet.rings) CHECK(ring.size() == 3);
  for (const auto& n : tet.normals) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-9));

  // Interior vertex of a 5x5 grid, counted from the faces directly.
  const Mesh g = corpus::grid(5, 5);
  const VertexId centre = 2 * 5 + 2;
  std::set<VertexId> seen;
  for (const Face& f : g.faces) {
    if (std::find(f.begin(), f.end(), centre) == f.end()) continue;
    for (VertexId v : f) {
      if (v != centre) seen.insert(v);
    }
  }
  CHECK(seen.size() == 6);
  const Adjacency adj = build_adjacency(g);
  CHECK(adj.rings[centre] == std::vector<VertexId>(seen.begin(), seen.end()));
  for (VertexId v = 0; v < adj.rings.size(); ++v) {
    for (VertexId w : adj.rings[v]) {
      const auto& back = adj.rings[w];
      CHECK(std::binary_search(back.begin(), back.end(), v));
    }
  }
}

TEST_CASE("normalization invariances") {
  const Mesh m = corpus::make("vase");
  const NormalizedMesh base = normalize(m);
  const auto norms = vertex_norms(base.mesh);
  double mean = 0.0;
  for (double x : norms) mean += x;
  CHECK(mean / norms.size() == doctest::Approx(1.0).epsilon(1e-9));

  SUBCASE("already normalized gives identity transform") {
    const NormalizedMesh again = normalize(base.mesh);
    CHECK(again.transform.centroid.norm() < 1e-12);
    CHECK(again.transform.scale == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("translation") {
    const Vec3 t(3.0, -2.0, 7.5);
    Mesh moved = m;
    for (auto& v : moved.vertices) v += t;
    const NormalizedMesh n = normalize(moved);
    CHECK((n.transform.centroid - (base.transform.centroid + t)).norm() < 1e-9);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) CHECK((n.mesh.vertices[i] - base.mesh.vertices[i]).norm() < 1e-9);
  }
  SUBCASE("uniform scale") {
    Mesh scaled = m;
    for (auto& v : scaled.vertices) v *= 4.0;
    const NormalizedMesh n = normalize(scaled);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) CHECK((n.mesh.vertices[i] - base.mesh.vertices[i]).norm() < 1e-12);
  }
  SUBCASE("rotation equivariance") {
    const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    Mesh rotated = m;
    for (auto& v : rotated.vertices) v = r * v;
    const NormalizedMesh n = normalize(rotated);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      CHECK((n.mesh.vertices[i] - r * base.mesh.vertices[i]).norm() < 1e-9);
    }
    CHECK(principal_bbox_diagonal(rotated) == doctest::Approx(principal_bbox_diagonal(m)).epsilon(1e-9));
  }
  SUBCASE("denormalize inverts") {
    const Mesh back = denormalize(base.mesh, base.transform);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      CHECK((back.vertices[i] - m.vertices[i]).norm() <= 1e-9 * std::max(1.0, m.vertices[i].norm()));
    }
  }
  Mesh flat;
  flat.vertices = {Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(normalize(flat), MeshError);
}

TEST_CASE("canonical sums ignore order") {
  std::vector<double> a{1e16, 1.0, -1e16, 3.0, 0.5};
  std::vector<double> b{0.5, -1e16, 3.0, 1.0, 1e16};
  CHECK(canonical_sum(a) == canonical_sum(b));
}

TEST_CASE("bundled corpus meshes are valid closed manifolds") {
  for (const auto& name : corpus::names()) {
    CAPTURE(name);
    const Mesh m = corpus::make(name);
    CHECK_NOTHROW(validate(m));
    CHECK(m.vertex_count() >= 2000);
    CHECK(m.vertex_count() <= 11000);
    std::map<std::pair<VertexId, VertexId>, int> edges;
    for (const Face& f : m.faces) {
      for (int k = 0; k < 3; ++k) ++edges[std::minmax(f[k], f[(k + 1) % 3])];
    }
    bool closed = true;
    for (const auto& [e, count] : edges) closed = closed && count == 2;
    CHECK(closed);
    // Euler characteristic: 0 for the torus, 2 for the spheres.
    const long chi = static_cast<long>(m.vertex_count()) - static_cast<long>(edges.size()) + static_cast<long>(m.face_count());
    CHECK(chi == (name == "torus" ? 0 : 2));
  }
}
