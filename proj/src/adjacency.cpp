#include "meshmark/adjacency.hpp"

#include <algorithm>

namespace meshmark {

Adjacency build_adjacency(const Mesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  Adjacency adj;
  adj.rings.resize(n);
  adj.incident_faces.resize(n);
  adj.normals.assign(n, Vec3::Zero());

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    for (int k = 0; k < 3; ++k) {
      adj.incident_faces[f[k]].push_back(static_cast<std::uint32_t>(fi));
      adj.rings[f[k]].push_back(f[(k + 1) % 3]);
      adj.rings[f[k]].push_back(f[(k + 2) % 3]);
    }
  }

  std::vector<Vec3> face_normals(mesh.faces.size());
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    face_normals[fi] = face_normal_unnormalized(mesh, mesh.faces[fi]);
    if (face_normals[fi].squaredNorm() == 0.0) ++adj.zero_area_faces;
  }

  std::vector<Vec3> contributions;
  for (std::size_t v = 0; v < n; ++v) {
    auto& ring = adj.rings[v];
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    if (ring.empty()) ++adj.isolated_vertices;

    // The unnormalized face normal has length 2*area, which gives the area
    // weighting for free. Zero-area faces contribute nothing.
    contributions.clear();
    for (std::uint32_t fi : adj.incident_faces[v]) {
      if (face_normals[fi].squaredNorm() > 0.0) contributions.push_back(face_normals[fi]);
    }
    const Vec3 sum = canonical_sum(contributions);
    const double len = sum.norm();
    if (len > 0.0) adj.normals[v] = sum / len;
  }
  return adj;
}

}  // namespace meshmark
