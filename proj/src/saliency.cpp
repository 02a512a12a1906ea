#include "meshmark/saliency.hpp"

#include "meshmark/errors.hpp"
#include "meshmark/spatial_grid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace meshmark {
namespace {

// Sum over incident faces of the area of faces that contain both v and u.
double edge_face_area(const Mesh& mesh, const Adjacency& adj, VertexId v, VertexId u) {
  double area = 0.0;
  for (std::uint32_t fi : adj.incident_faces[v]) {
    const Face& f = mesh.faces[fi];
    if (f[0] == u || f[1] == u || f[2] == u) area += face_area(mesh, f);
  }
  return area;
}

struct RingTerm {
  Vec3 position;  // canonical sort key
  double weight;
  double kappa;
  Vec3 tangent;
};

// Gaussian average over a precomputed neighbor list. Entries are summed in
// lexicographic order of their positions so the result does not depend on
// vertex storage order.
struct WindowEntry {
  Vec3 position;
  double dist2;
  double value;
};

double window_average(std::vector<WindowEntry>& entries, double radius, double sigma) {
  std::sort(entries.begin(), entries.end(), [](const WindowEntry& a, const WindowEntry& b) {
    if (lex_less(a.position, b.position)) return true;
    if (lex_less(b.position, a.position)) return false;
    return a.value < b.value;
  });
  const double r2 = radius * radius;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double num = 0.0, den = 0.0;
  for (const WindowEntry& e : entries) {
    if (!(e.dist2 < r2)) continue;
    const double w = std::exp(-e.dist2 * inv);
    num += w * e.value;
    den += w;
  }
  // The window always contains the query vertex, whose weight is 1.
  return num / den;
}

}  // namespace

CurvatureField mean_curvature(const Mesh& mesh, const Adjacency& adj) {
  const std::size_t n = mesh.vertices.size();
  CurvatureField field;
  field.mean.assign(n, 0.0);
  field.kappa1.assign(n, 0.0);
  field.kappa2.assign(n, 0.0);
  field.flagged.assign(n, false);

  std::vector<RingTerm> terms;
  for (std::size_t vi = 0; vi < n; ++vi) {
    const auto v = static_cast<VertexId>(vi);
    const Vec3& p = mesh.vertices[v];
    const Vec3& normal = adj.normals[v];
    const auto& ring = adj.rings[v];
    if (ring.size() < 2 || normal.squaredNorm() == 0.0) {
      field.flagged[v] = true;
      ++field.flagged_count;
      continue;
    }

    const Eigen::Matrix3d tangent_proj = Eigen::Matrix3d::Identity() - normal * normal.transpose();
    terms.clear();
    for (VertexId u : ring) {
      const Vec3 e = mesh.vertices[u] - p;
      const double len2 = e.squaredNorm();
      const Vec3 t = tangent_proj * e;
      const double tlen = t.norm();
      if (len2 == 0.0 || tlen == 0.0) continue;
      // Normal curvature along the edge direction; positive for convex
      // surfaces with outward normals.
      const double kappa = -2.0 * normal.dot(e) / len2;
      terms.push_back({mesh.vertices[u], edge_face_area(mesh, adj, v, u), kappa, t / tlen});
    }
    std::sort(terms.begin(), terms.end(),
              [](const RingTerm& a, const RingTerm& b) { return lex_less(a.position, b.position); });
    double total_weight = 0.0;
    for (const RingTerm& t : terms) total_weight += t.weight;
    if (terms.size() < 2 || !(total_weight > 0.0)) {
      field.flagged[v] = true;
      ++field.flagged_count;
      continue;
    }

    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const RingTerm& t : terms) {
      m += (t.weight / total_weight) * t.kappa * (t.tangent * t.tangent.transpose());
    }

    // The normal is an eigenvector of m with eigenvalue 0; the other two
    // eigenvalues are the tangent-plane ones.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
    const Eigen::Vector3d evals = solver.eigenvalues();
    const Eigen::Matrix3d evecs = solver.eigenvectors();
    int normal_idx = 0;
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double align = std::abs(evecs.col(k).dot(normal));
      if (align > best) {
        best = align;
        normal_idx = k;
      }
    }
    const double m1 = evals[(normal_idx + 1) % 3];
    const double m2 = evals[(normal_idx + 2) % 3];
    const double k1 = 3.0 * m1 - m2;
    const double k2 = 3.0 * m2 - m1;
    field.kappa1[v] = std::max(k1, k2);
    field.kappa2[v] = std::min(k1, k2);
    field.mean[v] = 0.5 * (k1 + k2);
  }
  return field;
}

std::vector<VertexId> neighborhood(const Mesh& mesh, VertexId v, double radius) {
  if (!(radius > 0.0)) throw Error("neighborhood radius must be positive");
  std::vector<VertexId> out;
  const Vec3& c = mesh.vertices.at(v);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if ((mesh.vertices[i] - c).squaredNorm() < r2) out.push_back(static_cast<VertexId>(i));
  }
  return out;
}

double gaussian_weighted_average(const Mesh& mesh, std::span<const double> field, VertexId v, double sigma) {
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  if (field.size() != mesh.vertices.size()) throw Error("field length does not match vertex count");
  const Vec3& c = mesh.vertices.at(v);
  std::vector<WindowEntry> entries;
  for (VertexId u : neighborhood(mesh, v, 2.0 * sigma)) {
    entries.push_back({mesh.vertices[u], (mesh.vertices[u] - c).squaredNorm(), field[u]});
  }
  return window_average(entries, 2.0 * sigma, sigma);
}

SaliencyMap compute_saliency(const Mesh& mesh, double sigma) {
  const Adjacency adj = build_adjacency(mesh);
  return compute_saliency(mesh, mean_curvature(mesh, adj), sigma);
}

SaliencyMap compute_saliency(const Mesh& mesh, const CurvatureField& curvature, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("sigma must be positive and finite");
  const std::size_t n = mesh.vertices.size();
  SaliencyMap map;
  map.sigma = sigma;
  map.flagged_count = curvature.flagged_count;
  map.values.assign(n, 0.0);

  // One grid serves both windows; the coarse radius 4 sigma bounds both.
  const double coarse_radius = 4.0 * sigma;
  const PointGrid grid(mesh.vertices, coarse_radius);
  std::vector<std::pair<VertexId, double>> hits;
  std::vector<WindowEntry> fine, coarse;
  for (std::size_t vi = 0; vi < n; ++vi) {
    grid.query(mesh.vertices[vi], coarse_radius, hits);
    fine.clear();
    coarse.clear();
    for (const auto& [u, d2] : hits) {
      WindowEntry e{mesh.vertices[u], d2, curvature.mean[u]};
      coarse.push_back(e);
      if (d2 < 4.0 * sigma * sigma) fine.push_back(e);
    }
    const double g_fine = window_average(fine, 2.0 * sigma, sigma);
    const double g_coarse = window_average(coarse, coarse_radius, 2.0 * sigma);
    map.values[vi] = std::abs(g_fine - g_coarse);
  }
  return map;
}

std::size_t salient_count(std::size_t n, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0) throw Error("saliency ratio must lie in (0, 1]");
  const double exact = ratio * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<VertexId> select_salient(std::span<const double> saliency, std::span<const double> norms, double ratio) {
  if (saliency.size() != norms.size()) throw Error("saliency and norm lengths differ");
  const std::size_t n = saliency.size();
  if (n == 0) return {};
  const std::size_t k = salient_count(n, ratio);

  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  auto by_rank = [&](VertexId a, VertexId b) {
    return std::make_tuple(-saliency[a], norms[a], a) < std::make_tuple(-saliency[b], norms[b], b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), by_rank);
  order.resize(k);
  std::sort(order.begin(), order.end(),
            [&](VertexId a, VertexId b) { return std::make_tuple(norms[a], a) < std::make_tuple(norms[b], b); });
  return order;
}

}  // namespace meshmark
