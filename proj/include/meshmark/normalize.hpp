#pragma once

#include "meshmark/mesh.hpp"

namespace meshmark {

// Maps original coordinates p to normalized coordinates (p - centroid) / scale.
struct NormalizationTransform {
  Vec3 centroid = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - centroid) / scale; }
  Vec3 invert(const Vec3& q) const { return q * scale + centroid; }
};

struct NormalizedMesh {
  Mesh mesh;
  NormalizationTransform transform;
};

// Unweighted vertex centroid. Exactly invariant under vertex reordering.
Vec3 vertex_centroid(const Mesh& mesh);

// Mean distance of the vertices from their centroid.
double mean_centered_norm(const Mesh& mesh);

// Centers the mesh on its vertex centroid and scales it to mean vertex norm 1.
// Throws MeshError when all vertices coincide.
NormalizedMesh normalize(const Mesh& mesh);

Mesh denormalize(const Mesh& normalized, const NormalizationTransform& transform);

// Unit eigenvectors of the vertex covariance, columns sorted by decreasing
// variance. Column signs are fixed so the largest-magnitude component is
// positive.
Eigen::Matrix3d principal_axes(const Mesh& mesh);

// Diagonal of the bounding box taken in the principal-axis frame. Unlike the
// axis-aligned diagonal it does not change when the mesh is rotated.
double principal_bbox_diagonal(const Mesh& mesh);

}  // namespace meshmark
