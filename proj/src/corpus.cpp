#include "meshmark/corpus.hpp"

#include "meshmark/adjacency.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/rng.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace meshmark::corpus {
namespace {

constexpr double kPi = std::numbers::pi;

VertexId midpoint_on_sphere(Mesh& mesh, std::map<std::pair<VertexId, VertexId>, VertexId>& cache, VertexId a,
                            VertexId b) {
  const auto key = std::minmax(a, b);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const Vec3 m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
  const auto id = static_cast<VertexId>(mesh.vertices.size());
  mesh.vertices.push_back(m);
  cache.emplace(key, id);
  return id;
}

// Closed surface of revolution about z from a profile (r(t), z(t)), t in
// [0, 1], with r(0) = r(1) = 0 collapsed into pole vertices.
template <typename Profile>
Mesh revolve(int segments, int rings, Profile profile) {
  Mesh mesh;
  const auto [r0, z0] = profile(0.0);
  (void)r0;
  mesh.vertices.emplace_back(0.0, 0.0, z0);
  for (int j = 1; j < rings; ++j) {
    const double t = static_cast<double>(j) / rings;
    const auto [r, z] = profile(t);
    for (int i = 0; i < segments; ++i) {
      const double phi = 2.0 * kPi * i / segments;
      mesh.vertices.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
  }
  const auto [r1, z1] = profile(1.0);
  (void)r1;
  mesh.vertices.emplace_back(0.0, 0.0, z1);
  const auto bottom = static_cast<VertexId>(0);
  const auto top = static_cast<VertexId>(mesh.vertices.size() - 1);
  auto at = [&](int ring, int i) { return static_cast<VertexId>(1 + (ring - 1) * segments + (i % segments)); };
  // Profile runs from low z (t = 0) to high z, so outward orientation is
  // counter-clockwise seen from outside.
  for (int i = 0; i < segments; ++i) mesh.faces.push_back({bottom, at(1, i + 1), at(1, i)});
  for (int j = 1; j + 1 < rings; ++j) {
    for (int i = 0; i < segments; ++i) {
      mesh.faces.push_back({at(j, i), at(j, i + 1), at(j + 1, i + 1)});
      mesh.faces.push_back({at(j, i), at(j + 1, i + 1), at(j + 1, i)});
    }
  }
  for (int i = 0; i < segments; ++i) mesh.faces.push_back({at(rings - 1, i), at(rings - 1, i + 1), top});
  return mesh;
}

}  // namespace

Mesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh mesh;
  for (const Vec3& v : {Vec3(-1, t, 0), Vec3(1, t, 0), Vec3(-1, -t, 0), Vec3(1, -t, 0), Vec3(0, -1, t), Vec3(0, 1, t),
                        Vec3(0, -1, -t), Vec3(0, 1, -t), Vec3(t, 0, -1), Vec3(t, 0, 1), Vec3(-t, 0, -1),
                        Vec3(-t, 0, 1)}) {
    mesh.vertices.push_back(v.normalized());
  }
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<VertexId, VertexId>, VertexId> cache;
    std::vector<Face> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      const VertexId a = midpoint_on_sphere(mesh, cache, f[0], f[1]);
      const VertexId b = midpoint_on_sphere(mesh, cache, f[1], f[2]);
      const VertexId c = midpoint_on_sphere(mesh, cache, f[2], f[0]);
      faces.push_back({f[0], a, c});
      faces.push_back({f[1], b, a});
      faces.push_back({f[2], c, b});
      faces.push_back({a, b, c});
    }
    mesh.faces = std::move(faces);
  }
  for (Vec3& v : mesh.vertices) v *= radius;
  return mesh;
}

Mesh grid(int nx, int ny, double size) {
  if (nx < 2 || ny < 2) throw Error("grid needs at least 2x2 vertices");
  Mesh mesh;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.vertices.emplace_back(size * i / (nx - 1), size * j / (ny - 1), 0.0);
    }
  }
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * nx + i); };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

Mesh bump_grid(int n, double height, double width, double size) {
  Mesh mesh = grid(n, n, size);
  const double c = 0.5 * size;
  for (Vec3& v : mesh.vertices) {
    const double d2 = (v.x() - c) * (v.x() - c) + (v.y() - c) * (v.y() - c);
    v.z() = height * std::exp(-d2 / (2.0 * width * width));
  }
  return mesh;
}

Mesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  Mesh mesh;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * kPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * kPi * j / minor_segments;
      // The tube radius varies around the ring so vertex norms do not repeat
      // from one tube section to the next.
      const double r = minor_radius * (1.0 + 0.35 * std::sin(3.0 * u + 0.4) + 0.15 * std::cos(5.0 * u));
      const double ring = major_radius + r * std::cos(v);
      mesh.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), r * std::sin(v));
    }
  }
  auto id = [&](int i, int j) {
    return static_cast<VertexId>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

Mesh bumpy_sphere(int subdivisions, double amplitude) {
  Mesh mesh = icosphere(subdivisions);
  // Six smooth lobes along irregular directions give a wide norm spread.
  const Vec3 dirs[] = {Vec3(1, 0.2, 0.1).normalized(),  Vec3(-0.3, 1, 0.2).normalized(),
                       Vec3(0.1, -0.4, 1).normalized(), Vec3(-1, -0.5, -0.3).normalized(),
                       Vec3(0.4, -1, -0.6).normalized(), Vec3(-0.2, 0.3, -1).normalized()};
  const double weights[] = {1.0, 0.8, 0.6, 0.9, 0.5, 0.7};
  for (Vec3& v : mesh.vertices) {
    double lobes = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double c = std::max(0.0, v.dot(dirs[k]));
      lobes += weights[k] * std::pow(c, 4.0);
    }
    v *= 1.0 + amplitude * lobes;
    v.x() *= 1.6;
    v.z() *= 0.8;
  }
  return mesh;
}

Mesh vase(int segments, int rings) {
  Mesh mesh = revolve(segments, rings, [](double t) {
    // Foot, belly, neck, lip.
    const double envelope = std::pow(std::sin(kPi * t), 0.6);
    const double shape = 0.55 + 0.25 * std::sin(2.0 * kPi * (0.85 * t - 0.1)) + 0.08 * std::cos(6.0 * kPi * t);
    return std::pair{envelope * shape, 4.0 * t - 2.0};
  });
  // Twisted flutes.
  for (Vec3& v : mesh.vertices) {
    const double phi = std::atan2(v.y(), v.x());
    const double f = 1.0 + 0.12 * std::cos(5.0 * phi + 2.5 * v.z());
    v.x() *= f;
    v.y() *= f;
  }
  return mesh;
}

Mesh ellipsoid(int subdivisions, double a, double b, double c) {
  Mesh mesh = icosphere(subdivisions);
  for (Vec3& v : mesh.vertices) v = Vec3(a * v.x(), b * v.y(), c * v.z());
  return mesh;
}

Mesh jitter(const Mesh& mesh, double fraction, std::uint64_t seed) {
  const Adjacency adj = build_adjacency(mesh);
  Rng rng(seed);
  Mesh out = mesh;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto& ring = adj.rings[v];
    if (ring.empty()) continue;
    double shortest = std::numeric_limits<double>::infinity();
    for (VertexId u : ring) shortest = std::min(shortest, (mesh.vertices[u] - mesh.vertices[v]).norm());
    const Vec3& n = adj.normals[v];
    Vec3 dir = rng.unit_vector();
    dir -= n * n.dot(dir);
    const double len = dir.norm();
    if (len == 0.0) continue;
    out.vertices[v] += (fraction * shortest * rng.uniform()) * (dir / len);
  }
  return out;
}

std::vector<std::string> names() { return {"torus", "bumpy_sphere", "vase", "ellipsoid"}; }

Mesh make(const std::string& name) {
  if (name == "torus") return jitter(torus(1.0, 0.45, 128, 64), 0.3, 11);
  if (name == "bumpy_sphere") return jitter(bumpy_sphere(5, 0.8), 0.3, 12);
  if (name == "vase") return jitter(vase(96, 90), 0.3, 13);
  if (name == "ellipsoid") return jitter(ellipsoid(5, 2.2, 1.0, 0.6), 0.3, 14);
  if (name == "icosphere") return icosphere(4);
  if (name == "grid") return grid(50, 50);
  if (name == "bump_grid") return bump_grid(60, 0.15, 0.06);
  throw Error("unknown corpus mesh '" + name + "'");
}

}  // namespace meshmark::corpus
