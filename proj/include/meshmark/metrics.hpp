#pragma once

#include "meshmark/mesh.hpp"

#include <cstdint>
#include <vector>

namespace meshmark {

// Closest point on triangle (a, b, c) to p (Ericson, Real-Time Collision
// Detection, 5.1.5). Handles face, edge and vertex regions.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Bounding-volume hierarchy over the triangles of a mesh for exact
// nearest-surface queries. Holds a reference to the mesh, which must outlive it.
class TriangleBvh {
 public:
  explicit TriangleBvh(const Mesh& mesh);

  // Exact minimum Euclidean distance from p to the surface.
  double distance(const Vec3& p) const;

 private:
  struct Node {
    Vec3 lo, hi;
    std::uint32_t first;  // leaf: first triangle in order_; inner: left child
    std::uint32_t count;  // leaf: triangle count; inner: 0
    std::uint32_t right;  // inner: right child
  };
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

  const Mesh& mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

double point_to_surface_distance(const Vec3& p, const TriangleBvh& bvh);

struct DistanceReport {
  double rms_a_to_b = 0.0;
  double rms_b_to_a = 0.0;
  double mrms = 0.0;  // max of the two RMS values
  double hausdorff = 0.0;
  double max_a_to_b = 0.0;
  double max_b_to_a = 0.0;
  std::size_t sample_count = 0;
};

struct SamplingParams {
  int samples_per_triangle = 10;
  std::uint64_t seed = 1;
};

// Samples `samples_per_triangle` points on every triangle of a (plus all of a's
// vertices) and measures their distance to b, and symmetrically. RMS values
// are area-weighted over the triangle samples; the Hausdorff value is the
// maximum over all samples and vertices in both directions. Per-triangle
// sample sequences are seeded from the triangle's geometry, so the result does
// not depend on element order, and a denser sampling extends a sparser one.
DistanceReport mesh_distance(const Mesh& a, const Mesh& b, const SamplingParams& params = {});

DistanceReport mrms(const Mesh& a, const Mesh& b, const SamplingParams& params = {});
double hausdorff(const Mesh& a, const Mesh& b, const SamplingParams& params = {});

}  // namespace meshmark
