#include "meshmark/mesh.hpp"

#include "meshmark/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace meshmark {

void validate(const Mesh& mesh) {
  if (mesh.vertices.size() < 3) {
    throw MeshError("mesh needs at least 3 vertices, got " + std::to_string(mesh.vertices.size()));
  }
  if (mesh.faces.empty()) throw MeshError("mesh has no faces");
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.vertices[i].allFinite()) {
      throw MeshError("vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  const auto n = mesh.vertices.size();
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Face& f = mesh.faces[i];
    for (VertexId idx : f) {
      if (idx >= n) {
        throw MeshError("face " + std::to_string(i) + " references vertex " + std::to_string(idx) +
                        " (vertex count " + std::to_string(n) + ")");
      }
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw MeshError("face " + std::to_string(i) + " repeats a vertex index");
    }
  }
}

std::vector<double> vertex_norms(const Mesh& mesh) {
  std::vector<double> norms;
  norms.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) norms.push_back(v.norm());
  return norms;
}

RescaleResult rescale_vertex(const Vec3& v, double new_norm) {
  const double norm = v.norm();
  if (norm == 0.0) return {v, false};
  return {v * (new_norm / norm), true};
}

BoundingBox bounding_box(std::span<const Vec3> points) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{Vec3::Constant(inf), Vec3::Constant(-inf)};
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

double bbox_diagonal(const Mesh& mesh) { return bounding_box(mesh.vertices).diagonal(); }

Vec3 face_normal_unnormalized(const Mesh& mesh, const Face& f) {
  const Vec3& a = mesh.vertices[f[0]];
  return (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
}

double face_area(const Mesh& mesh, const Face& f) { return 0.5 * face_normal_unnormalized(mesh, f).norm(); }

Vec3 canonical_sum(std::vector<Vec3> values) {
  std::sort(values.begin(), values.end(), lex_less);
  Vec3 sum = Vec3::Zero();
  for (const Vec3& v : values) sum += v;
  return sum;
}

double canonical_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace meshmark
