#include "meshmark/metrics.hpp"

#include "meshmark/errors.hpp"
#include "meshmark/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace meshmark {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate (zero-area) triangle: nearest of its three edges.
    Vec3 best = a;
    double best_d = (p - a).squaredNorm();
    for (auto [s, t] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
      const Vec3 e = t - s;
      const double len2 = e.squaredNorm();
      const double u = len2 > 0.0 ? std::clamp((p - s).dot(e) / len2, 0.0, 1.0) : 0.0;
      const Vec3 q = s + u * e;
      if ((p - q).squaredNorm() < best_d) {
        best_d = (p - q).squaredNorm();
        best = q;
      }
    }
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

TriangleBvh::TriangleBvh(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.faces.empty()) throw MeshError("distance query against a mesh without faces");
  order_.resize(mesh.faces.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(mesh.faces.size());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Face& f = mesh.faces[i];
    centroids[i] = (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
  }
  nodes_.reserve(2 * mesh.faces.size() / 4 + 1);
  build(0, static_cast<std::uint32_t>(order_.size()), centroids);
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  constexpr std::uint32_t kLeafSize = 4;
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  Vec3 clo = lo, chi = hi;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (VertexId v : mesh_.faces[order_[i]]) {
      lo = lo.cwiseMin(mesh_.vertices[v]);
      hi = hi.cwiseMax(mesh_.vertices[v]);
    }
    clo = clo.cwiseMin(centroids[order_[i]]);
    chi = chi.cwiseMax(centroids[order_[i]]);
  }
  nodes_[index].lo = lo;
  nodes_[index].hi = hi;
  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  Eigen::Index axis = 0;
  (chi - clo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t x, std::uint32_t y) { return centroids[x][axis] < centroids[y][axis]; });
  const std::uint32_t left = build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[index].first = left;
  nodes_[index].count = 0;
  nodes_[index].right = right;
  return index;
}

double TriangleBvh::distance(const Vec3& p) const {
  auto box_dist2 = [&](const Node& n) {
    const Vec3 d = (n.lo - p).cwiseMax(p - n.hi).cwiseMax(0.0);
    return d.squaredNorm();
  };
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_dist2(node) >= best) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const Face& f = mesh_.faces[order_[i]];
        const Vec3 q = closest_point_on_triangle(p, mesh_.vertices[f[0]], mesh_.vertices[f[1]], mesh_.vertices[f[2]]);
        best = std::min(best, (p - q).squaredNorm());
      }
      continue;
    }
    // Visit the nearer child first.
    const double dl = box_dist2(nodes_[node.first]);
    const double dr = box_dist2(nodes_[node.right]);
    if (dl < dr) {
      if (dr < best) stack[top++] = node.right;
      if (dl < best) stack[top++] = node.first;
    } else {
      if (dl < best) stack[top++] = node.first;
      if (dr < best) stack[top++] = node.right;
    }
  }
  return std::sqrt(best);
}

double point_to_surface_distance(const Vec3& p, const TriangleBvh& bvh) { return bvh.distance(p); }

namespace {

struct OneSided {
  double rms = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

std::uint64_t triangle_seed(const Vec3& a, const Vec3& b, const Vec3& c, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const Vec3* v : {&a, &b, &c}) {
    for (int k = 0; k < 3; ++k) h = derive_seed(h, std::bit_cast<std::uint64_t>((*v)[k] + 0.0));
  }
  return h;
}

OneSided one_sided(const Mesh& from, const TriangleBvh& to, const SamplingParams& params) {
  OneSided out;
  std::vector<double> weighted;  // per-face area-weighted squared distances
  std::vector<double> areas;
  weighted.reserve(from.faces.size());
  areas.reserve(from.faces.size());
  const int k = params.samples_per_triangle;
  for (const Face& f : from.faces) {
    const Vec3& a = from.vertices[f[0]];
    const Vec3& b = from.vertices[f[1]];
    const Vec3& c = from.vertices[f[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    Rng rng(triangle_seed(a, b, c, params.seed));
    double sum2 = 0.0;
    for (int s = 0; s < k; ++s) {
      const double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
      const Vec3 p = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
      const double d = to.distance(p);
      sum2 += d * d;
      out.max = std::max(out.max, d);
    }
    out.samples += static_cast<std::size_t>(k);
    if (k > 0) {
      weighted.push_back(area * sum2 / k);
      areas.push_back(area);
    }
  }
  for (const Vec3& v : from.vertices) out.max = std::max(out.max, to.distance(v));
  out.samples += from.vertices.size();
  const double total_area = canonical_sum(areas);
  if (total_area > 0.0) out.rms = std::sqrt(canonical_sum(weighted) / total_area);
  return out;
}

}  // namespace

DistanceReport mesh_distance(const Mesh& a, const Mesh& b, const SamplingParams& params) {
  if (params.samples_per_triangle < 0) throw Error("samples_per_triangle must be >= 0");
  const TriangleBvh bvh_a(a), bvh_b(b);
  const OneSided ab = one_sided(a, bvh_b, params);
  const OneSided ba = one_sided(b, bvh_a, params);
  DistanceReport r;
  r.rms_a_to_b = ab.rms;
  r.rms_b_to_a = ba.rms;
  r.mrms = std::max(ab.rms, ba.rms);
  r.max_a_to_b = ab.max;
  r.max_b_to_a = ba.max;
  r.hausdorff = std::max(ab.max, ba.max);
  r.sample_count = ab.samples + ba.samples;
  return r;
}

DistanceReport mrms(const Mesh& a, const Mesh& b, const SamplingParams& params) { return mesh_distance(a, b, params); }

double hausdorff(const Mesh& a, const Mesh& b, const SamplingParams& params) {
  return mesh_distance(a, b, params).hausdorff;
}

}  // namespace meshmark
