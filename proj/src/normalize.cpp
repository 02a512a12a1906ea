#include "meshmark/normalize.hpp"

#include "meshmark/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include <vector>

namespace meshmark {
namespace {

double axis_mean(const Mesh& mesh, int axis) {
  std::vector<double> values;
  values.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) values.push_back(v[axis]);
  return canonical_sum(std::move(values)) / static_cast<double>(mesh.vertices.size());
}

}  // namespace

Vec3 vertex_centroid(const Mesh& mesh) {
  if (mesh.vertices.empty()) throw MeshError("centroid of an empty mesh");
  return {axis_mean(mesh, 0), axis_mean(mesh, 1), axis_mean(mesh, 2)};
}

double mean_centered_norm(const Mesh& mesh) {
  const Vec3 c = vertex_centroid(mesh);
  std::vector<double> norms;
  norms.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) norms.push_back((v - c).norm());
  return canonical_sum(std::move(norms)) / static_cast<double>(mesh.vertices.size());
}

NormalizedMesh normalize(const Mesh& mesh) {
  NormalizedMesh out;
  out.transform.centroid = vertex_centroid(mesh);
  out.mesh.faces = mesh.faces;
  out.mesh.vertices.reserve(mesh.vertices.size());
  std::vector<double> norms;
  norms.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    out.mesh.vertices.push_back(v - out.transform.centroid);
    norms.push_back(out.mesh.vertices.back().norm());
  }
  const double scale = canonical_sum(std::move(norms)) / static_cast<double>(mesh.vertices.size());
  if (!(scale > 0.0)) throw MeshError("cannot normalize: all vertices coincide");
  out.transform.scale = scale;
  for (Vec3& v : out.mesh.vertices) v /= scale;
  return out;
}

Mesh denormalize(const Mesh& normalized, const NormalizationTransform& transform) {
  Mesh out;
  out.faces = normalized.faces;
  out.vertices.reserve(normalized.vertices.size());
  for (const Vec3& q : normalized.vertices) out.vertices.push_back(transform.invert(q));
  return out;
}

Eigen::Matrix3d principal_axes(const Mesh& mesh) {
  const Vec3 c = vertex_centroid(mesh);
  const auto n = static_cast<double>(mesh.vertices.size());
  Eigen::Matrix3d cov;
  std::vector<double> products;
  products.reserve(mesh.vertices.size());
  for (int r = 0; r < 3; ++r) {
    for (int s = r; s < 3; ++s) {
      products.clear();
      for (const Vec3& v : mesh.vertices) products.push_back((v[r] - c[r]) * (v[s] - c[s]));
      cov(r, s) = cov(s, r) = canonical_sum(products) / n;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Matrix3d axes;
  // Eigen sorts eigenvalues ascending; we want decreasing variance.
  for (int k = 0; k < 3; ++k) {
    Vec3 axis = solver.eigenvectors().col(2 - k);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis[arg] < 0.0) axis = -axis;
    axes.col(k) = axis;
  }
  return axes;
}

double principal_bbox_diagonal(const Mesh& mesh) {
  const Eigen::Matrix3d axes = principal_axes(mesh);
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vec3 lo = Vec3::Constant(inf), hi = Vec3::Constant(-inf);
  for (const Vec3& v : mesh.vertices) {
    const Vec3 q = axes.transpose() * v;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  return (hi - lo).norm();
}

}  // namespace meshmark
