#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace meshmark {

using Vec3 = Eigen::Vector3d;
using VertexId = std::uint32_t;
using Face = std::array<VertexId, 3>;

// Indexed triangle mesh. Vertex and face order are significant: file
// round-trips and attacks preserve them unless documented otherwise.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

// Throws MeshError unless: >= 3 vertices, >= 1 face, all indices in range and
// pairwise distinct within a face, all coordinates finite.
void validate(const Mesh& mesh);

// Euclidean norm of every vertex, in mesh order.
std::vector<double> vertex_norms(const Mesh& mesh);

struct RescaleResult {
  Vec3 vertex;
  // False when the input had zero norm and was returned unchanged.
  bool rescaled = true;
};

// Moves `v` along its own direction so that its norm becomes `new_norm`.
RescaleResult rescale_vertex(const Vec3& v, double new_norm);

struct BoundingBox {
  Vec3 min;
  Vec3 max;
  Vec3 extent() const { return max - min; }
  double diagonal() const { return extent().norm(); }
};

BoundingBox bounding_box(std::span<const Vec3> points);
double bbox_diagonal(const Mesh& mesh);

Vec3 face_normal_unnormalized(const Mesh& mesh, const Face& f);
double face_area(const Mesh& mesh, const Face& f);

// Strict lexicographic order on coordinates. Used wherever a sum must not
// depend on storage order, so results are exactly invariant under element
// reordering.
inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

// Order-independent sum: sorts copies lexicographically before accumulating.
Vec3 canonical_sum(std::vector<Vec3> values);
double canonical_sum(std::vector<double> values);

}  // namespace meshmark
