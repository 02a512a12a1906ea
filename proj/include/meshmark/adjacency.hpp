#pragma once

#include "meshmark/mesh.hpp"

#include <vector>

namespace meshmark {

struct Adjacency {
  // One-ring vertex neighbors, ascending index order, no duplicates.
  std::vector<std::vector<VertexId>> rings;
  // Indices of faces incident to each vertex, ascending.
  std::vector<std::vector<std::uint32_t>> incident_faces;
  // Area-weighted vertex normals (unit length; zero for vertices whose
  // incident faces all have zero area).
  std::vector<Vec3> normals;

  std::size_t isolated_vertices = 0;
  std::size_t zero_area_faces = 0;
};

Adjacency build_adjacency(const Mesh& mesh);

}  // namespace meshmark
