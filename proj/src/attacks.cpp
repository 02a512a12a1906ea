#include "meshmark/attacks.hpp"

#include "meshmark/adjacency.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/normalize.hpp"
#include "meshmark/rng.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace meshmark::attacks {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Undirected edge -> incident faces, plus a dense edge numbering in order of
// first appearance (face order, then corner order).
struct EdgeTable {
  struct Edge {
    VertexId a, b;
    std::vector<std::uint32_t> faces;
  };
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, std::uint32_t> index;

  explicit EdgeTable(const Mesh& mesh) {
    index.reserve(mesh.faces.size() * 2);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
      const Face& f = mesh.faces[fi];
      for (int k = 0; k < 3; ++k) {
        const VertexId a = f[k], b = f[(k + 1) % 3];
        auto [it, inserted] = index.emplace(edge_key(a, b), static_cast<std::uint32_t>(edges.size()));
        if (inserted) edges.push_back({std::min(a, b), std::max(a, b), {}});
        edges[it->second].faces.push_back(static_cast<std::uint32_t>(fi));
      }
    }
  }

  std::uint32_t id(VertexId a, VertexId b) const { return index.at(edge_key(a, b)); }

  void require_manifold(const char* scheme) const {
    for (const Edge& e : edges) {
      if (e.faces.size() > 2) {
        throw TopologyError(std::string(scheme) + " subdivision: edge (" + std::to_string(e.a) + ", " +
                            std::to_string(e.b) + ") has " + std::to_string(e.faces.size()) + " incident faces");
      }
    }
  }
};

VertexId opposite(const Face& f, VertexId a, VertexId b) {
  for (VertexId v : f) {
    if (v != a && v != b) return v;
  }
  return f[0];
}

// Splits every face into four; `edge_point` gives the position of the new
// vertex on each edge, `vertex_point` the updated old vertices.
template <typename EdgePoint>
Mesh split_four(const Mesh& mesh, const EdgeTable& table, std::vector<Vec3> old_positions, EdgePoint edge_point) {
  Mesh out;
  const auto nv = static_cast<VertexId>(mesh.vertices.size());
  out.vertices = std::move(old_positions);
  out.vertices.reserve(nv + table.edges.size());
  for (std::size_t e = 0; e < table.edges.size(); ++e) out.vertices.push_back(edge_point(table.edges[e]));
  out.faces.reserve(mesh.faces.size() * 4);
  for (const Face& f : mesh.faces) {
    const VertexId e01 = nv + table.id(f[0], f[1]);
    const VertexId e12 = nv + table.id(f[1], f[2]);
    const VertexId e20 = nv + table.id(f[2], f[0]);
    out.faces.push_back({f[0], e01, e20});
    out.faces.push_back({f[1], e12, e01});
    out.faces.push_back({f[2], e20, e12});
    out.faces.push_back({e01, e12, e20});
  }
  return out;
}

void check_iterations(int iterations) {
  if (iterations < 1) throw AttackSpecError("subdivision needs iterations >= 1");
}

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Mesh add_noise(const Mesh& mesh, double amplitude_percent, std::uint64_t seed) {
  if (!(amplitude_percent >= 0.0) || !std::isfinite(amplitude_percent)) {
    throw AttackSpecError("noise amplitude must be >= 0");
  }
  Mesh out = mesh;
  if (amplitude_percent == 0.0) return out;
  const double magnitude = amplitude_percent / 100.0 * mean_centered_norm(mesh);
  Rng rng(seed);
  for (Vec3& v : out.vertices) {
    const Vec3 dir = rng.unit_vector();
    const double sign = (rng.next_u64() >> 63) ? -1.0 : 1.0;
    v += sign * magnitude * dir;
  }
  return out;
}

Mesh laplacian_smooth(const Mesh& mesh, double lambda, int iterations) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw AttackSpecError("smoothing lambda must lie in (0, 1)");
  if (iterations < 0) throw AttackSpecError("smoothing iterations must be >= 0");
  Mesh out = mesh;
  if (iterations == 0) return out;
  const Adjacency adj = build_adjacency(mesh);
  std::vector<Vec3> next(out.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      const auto& ring = adj.rings[v];
      if (ring.empty()) {
        next[v] = out.vertices[v];
        continue;
      }
      Vec3 mean = Vec3::Zero();
      for (VertexId u : ring) mean += out.vertices[u];
      mean /= static_cast<double>(ring.size());
      next[v] = out.vertices[v] + lambda * (mean - out.vertices[v]);
    }
    std::swap(out.vertices, next);
  }
  return out;
}

Mesh quantize_coords(const Mesh& mesh, int bits) {
  if (bits < 4 || bits > 16) throw AttackSpecError("coordinate quantization needs 4 <= bits <= 16");
  Mesh out = mesh;
  const BoundingBox box = bounding_box(mesh.vertices);
  const double steps = std::ldexp(1.0, bits) - 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = box.min[axis], hi = box.max[axis];
    const double extent = hi - lo;
    if (!(extent > 0.0)) continue;
    for (Vec3& v : out.vertices) {
      const double level = std::round((v[axis] - lo) / extent * steps);
      // lerp is exact at both ends, so the extreme levels reproduce lo and hi.
      v[axis] = std::lerp(lo, hi, level / steps);
    }
  }
  return out;
}

Similarity random_similarity(const Mesh& mesh, std::uint64_t seed) {
  Rng rng(seed);
  // Shoemake's uniform random unit quaternion.
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2), a * std::cos(2 * kPi * u2),
                             b * std::sin(2 * kPi * u3));
  Similarity s;
  s.rotation = q.normalized().toRotationMatrix();
  s.scale = rng.uniform(0.5, 2.0);
  const double half = bbox_diagonal(mesh);
  s.translation = Vec3(rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half));
  return s;
}

Mesh similarity_transform(const Mesh& mesh, const Similarity& s) {
  if (!(s.scale > 0.0) || !std::isfinite(s.scale)) throw AttackSpecError("similarity scale must be positive");
  const double err = (s.rotation.transpose() * s.rotation - Eigen::Matrix3d::Identity()).norm();
  if (err > 1e-9 || s.rotation.determinant() < 0.0) {
    throw AttackSpecError("similarity rotation is not orthonormal with det +1");
  }
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v = s.scale * (s.rotation * v) + s.translation;
  return out;
}

Mesh similarity_transform(const Mesh& mesh, std::uint64_t seed) {
  return similarity_transform(mesh, random_similarity(mesh, seed));
}

Mesh subdivide_midpoint(const Mesh& mesh, int iterations) {
  check_iterations(iterations);
  Mesh current = mesh;
  for (int it = 0; it < iterations; ++it) {
    const EdgeTable table(current);
    current = split_four(current, table, current.vertices, [&](const EdgeTable::Edge& e) {
      return 0.5 * (current.vertices[e.a] + current.vertices[e.b]);
    });
  }
  return current;
}

Mesh subdivide_loop(const Mesh& mesh, int iterations) {
  check_iterations(iterations);
  Mesh current = mesh;
  for (int it = 0; it < iterations; ++it) {
    const EdgeTable table(current);
    table.require_manifold("Loop");
    const Adjacency adj = build_adjacency(current);
    const auto& p = current.vertices;

    // Boundary neighbors of each vertex (ends of its one-face edges).
    std::vector<std::vector<VertexId>> boundary(p.size());
    for (const auto& e : table.edges) {
      if (e.faces.size() == 1) {
        boundary[e.a].push_back(e.b);
        boundary[e.b].push_back(e.a);
      }
    }

    std::vector<Vec3> moved(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) {
      const auto& ring = adj.rings[v];
      if (!boundary[v].empty()) {
        moved[v] = boundary[v].size() == 2 ? 0.75 * p[v] + 0.125 * (p[boundary[v][0]] + p[boundary[v][1]]) : p[v];
        continue;
      }
      if (ring.empty()) {
        moved[v] = p[v];
        continue;
      }
      const double n = static_cast<double>(ring.size());
      const double c = 0.375 + 0.25 * std::cos(2.0 * kPi / n);
      const double beta = (0.625 - c * c) / n;
      Vec3 sum = Vec3::Zero();
      for (VertexId u : ring) sum += p[u];
      moved[v] = (1.0 - n * beta) * p[v] + beta * sum;
    }

    current = split_four(current, table, std::move(moved), [&](const EdgeTable::Edge& e) -> Vec3 {
      if (e.faces.size() == 1) return 0.5 * (p[e.a] + p[e.b]);
      const VertexId c = opposite(current.faces[e.faces[0]], e.a, e.b);
      const VertexId d = opposite(current.faces[e.faces[1]], e.a, e.b);
      return 0.375 * (p[e.a] + p[e.b]) + 0.125 * (p[c] + p[d]);
    });
  }
  return current;
}

Mesh subdivide_sqrt3(const Mesh& mesh, int iterations) {
  check_iterations(iterations);
  Mesh current = mesh;
  for (int it = 0; it < iterations; ++it) {
    const EdgeTable table(current);
    table.require_manifold("sqrt3");
    const Adjacency adj = build_adjacency(current);
    const auto& p = current.vertices;
    const auto nv = static_cast<VertexId>(p.size());

    std::vector<bool> on_boundary(p.size(), false);
    for (const auto& e : table.edges) {
      if (e.faces.size() == 1) on_boundary[e.a] = on_boundary[e.b] = true;
    }

    Mesh out;
    out.vertices.resize(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) {
      const auto& ring = adj.rings[v];
      if (on_boundary[v] || ring.empty()) {
        out.vertices[v] = p[v];
        continue;
      }
      const double n = static_cast<double>(ring.size());
      const double alpha = (4.0 - 2.0 * std::cos(2.0 * kPi / n)) / 9.0;
      Vec3 sum = Vec3::Zero();
      for (VertexId u : ring) sum += p[u];
      out.vertices[v] = (1.0 - alpha) * p[v] + (alpha / n) * sum;
    }
    for (const Face& f : current.faces) out.vertices.push_back((p[f[0]] + p[f[1]] + p[f[2]]) / 3.0);

    // Each face's centroid connects to its corners; every interior edge
    // (a, b) is then flipped to join the two adjacent centroids.
    out.faces.reserve(current.faces.size() * 3);
    for (std::size_t fi = 0; fi < current.faces.size(); ++fi) {
      const Face& f = current.faces[fi];
      const auto cf = static_cast<VertexId>(nv + fi);
      for (int k = 0; k < 3; ++k) {
        const VertexId a = f[k], b = f[(k + 1) % 3];
        const auto& faces = table.edges[table.id(a, b)].faces;
        if (faces.size() == 1) {
          out.faces.push_back({a, b, cf});
        } else {
          const std::uint32_t g = faces[0] == fi ? faces[1] : faces[0];
          out.faces.push_back({a, static_cast<VertexId>(nv + g), cf});
        }
      }
    }
    current = std::move(out);
  }
  return current;
}

Mesh crop(const Mesh& mesh, double ratio_percent) {
  if (!(ratio_percent > 0.0 && ratio_percent < 100.0)) throw AttackSpecError("crop ratio must lie in (0, 100)");
  const std::size_t n = mesh.vertices.size();
  const auto removed = static_cast<std::size_t>(std::llround(ratio_percent / 100.0 * static_cast<double>(n)));
  if (removed == 0) return mesh;

  const Vec3 axis = principal_axes(mesh).col(0);
  std::vector<double> proj(n);
  for (std::size_t i = 0; i < n; ++i) proj[i] = axis.dot(mesh.vertices[i]);
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return proj[a] != proj[b] ? proj[a] < proj[b] : a < b;
  });

  std::vector<bool> keep(n, true);
  for (std::size_t k = n - std::min(removed, n); k < n; ++k) keep[order[k]] = false;
  constexpr auto kGone = static_cast<VertexId>(-1);
  std::vector<VertexId> remap(n, kGone);
  Mesh out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[i]);
  }
  for (const Face& f : mesh.faces) {
    if (remap[f[0]] == kGone || remap[f[1]] == kGone || remap[f[2]] == kGone) continue;
    out.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  if (out.vertices.size() < 3 || out.faces.empty()) {
    throw MeshError("cropping " + fmt(ratio_percent) + "% leaves a degenerate mesh");
  }
  return out;
}

Mesh reorder_elements(const Mesh& mesh, int type, std::uint64_t seed) {
  if (type < 1 || type > 3) throw AttackSpecError("reorder type must be 1, 2 or 3");
  auto shuffled = [](std::size_t n, std::uint64_t s) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng(s);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    return perm;
  };
  Mesh out = mesh;
  if (type == 1 || type == 3) {
    // new vertex i is old vertex perm[i]
    const auto perm = shuffled(mesh.vertices.size(), derive_seed(seed, 1));
    std::vector<VertexId> old_to_new(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      out.vertices[i] = mesh.vertices[perm[i]];
      old_to_new[perm[i]] = static_cast<VertexId>(i);
    }
    for (Face& f : out.faces) {
      for (VertexId& v : f) v = old_to_new[v];
    }
  }
  if (type == 2 || type == 3) {
    const auto perm = shuffled(mesh.faces.size(), derive_seed(seed, 2));
    const std::vector<Face> faces = out.faces;
    for (std::size_t i = 0; i < perm.size(); ++i) out.faces[i] = faces[perm[i]];
  }
  return out;
}

std::string AttackSpec::kind_name() const {
  switch (kind) {
    case Kind::kNoise: return "noise";
    case Kind::kSmooth: return "smooth";
    case Kind::kQuantize: return "quant";
    case Kind::kSimilarity: return "sim";
    case Kind::kSubdivMidpoint:
    case Kind::kSubdivLoop:
    case Kind::kSubdivSqrt3: return "subdiv";
    case Kind::kCrop: return "crop";
    case Kind::kReorder: return "reorder";
  }
  return "unknown";
}

std::string AttackSpec::param_string() const {
  std::string out;
  switch (kind) {
    case Kind::kSimilarity: return std::to_string(seed);
    case Kind::kSubdivMidpoint: out = "midpoint,"; break;
    case Kind::kSubdivLoop: out = "loop,"; break;
    case Kind::kSubdivSqrt3: out = "sqrt3,"; break;
    default: break;
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += fmt(params[i]);
  }
  return out;
}

std::string AttackSpec::to_string() const { return kind_name() + ":" + param_string(); }

std::string attack_grammar_help() {
  return "attack grammar (optional @SEED suffix seeds randomized attacks):\n"
         "  noise:AMPLITUDE_PERCENT      e.g. noise:0.3\n"
         "  smooth:LAMBDA,ITERATIONS     e.g. smooth:0.1,30\n"
         "  quant:BITS                   4..16, e.g. quant:9\n"
         "  sim:SEED                     random rotation, scale and translation\n"
         "  subdiv:SCHEME,ITERATIONS     SCHEME in midpoint|loop|sqrt3, e.g. subdiv:loop,1\n"
         "  crop:RATIO_PERCENT           e.g. crop:10\n"
         "  reorder:TYPE                 1 vertices, 2 faces, 3 both\n";
}

namespace {

[[noreturn]] void grammar_error(std::string_view text, const std::string& why) {
  throw AttackSpecError("bad attack spec '" + std::string(text) + "': " + why + "\n" + attack_grammar_help());
}

double number(std::string_view text, std::string_view tok) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    grammar_error(text, "cannot parse number '" + std::string(tok) + "'");
  }
  return v;
}

int integer(std::string_view text, std::string_view tok) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    grammar_error(text, "cannot parse integer '" + std::string(tok) + "'");
  }
  return v;
}

std::uint64_t u64(std::string_view text, std::string_view tok) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    grammar_error(text, "cannot parse seed '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

AttackSpec parse_attack(std::string_view text, std::uint64_t default_seed) {
  std::string_view body = text;
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);

  AttackSpec spec;
  spec.seed = default_seed;
  if (const auto at = body.find('@'); at != std::string_view::npos) {
    spec.seed = u64(text, body.substr(at + 1));
    body = body.substr(0, at);
  }
  const auto colon = body.find(':');
  if (colon == std::string_view::npos) grammar_error(text, "missing ':'");
  const std::string_view name = body.substr(0, colon);
  const auto args = split(body.substr(colon + 1), ',');
  auto expect = [&](std::size_t n) {
    if (args.size() != n) grammar_error(text, "expected " + std::to_string(n) + " parameter(s)");
  };

  if (name == "noise") {
    expect(1);
    spec.kind = Kind::kNoise;
    const double a = number(text, args[0]);
    if (a < 0.0) grammar_error(text, "amplitude must be >= 0");
    spec.params = {a};
  } else if (name == "smooth") {
    expect(2);
    spec.kind = Kind::kSmooth;
    const double lambda = number(text, args[0]);
    const int iters = integer(text, args[1]);
    if (!(lambda > 0.0 && lambda < 1.0)) grammar_error(text, "lambda must lie in (0, 1)");
    if (iters < 0) grammar_error(text, "iterations must be >= 0");
    spec.params = {lambda, static_cast<double>(iters)};
  } else if (name == "quant") {
    expect(1);
    spec.kind = Kind::kQuantize;
    const int bits = integer(text, args[0]);
    if (bits < 4 || bits > 16) grammar_error(text, "bits must lie in 4..16");
    spec.params = {static_cast<double>(bits)};
  } else if (name == "sim") {
    expect(1);
    spec.kind = Kind::kSimilarity;
    spec.seed = u64(text, args[0]);
  } else if (name == "subdiv") {
    expect(2);
    if (args[0] == "midpoint") {
      spec.kind = Kind::kSubdivMidpoint;
    } else if (args[0] == "loop") {
      spec.kind = Kind::kSubdivLoop;
    } else if (args[0] == "sqrt3") {
      spec.kind = Kind::kSubdivSqrt3;
    } else {
      grammar_error(text, "unknown subdivision scheme '" + std::string(args[0]) + "'");
    }
    const int iters = integer(text, args[1]);
    if (iters < 1 || iters > 4) grammar_error(text, "iterations must lie in 1..4");
    spec.params = {static_cast<double>(iters)};
  } else if (name == "crop") {
    expect(1);
    spec.kind = Kind::kCrop;
    const double r = number(text, args[0]);
    if (!(r > 0.0 && r < 100.0)) grammar_error(text, "ratio must lie in (0, 100)");
    spec.params = {r};
  } else if (name == "reorder") {
    expect(1);
    spec.kind = Kind::kReorder;
    const int type = integer(text, args[0]);
    if (type < 1 || type > 3) grammar_error(text, "type must be 1, 2 or 3");
    spec.params = {static_cast<double>(type)};
  } else {
    grammar_error(text, "unknown attack '" + std::string(name) + "'");
  }
  return spec;
}

Mesh apply(const Mesh& mesh, const AttackSpec& spec) {
  auto param = [&](std::size_t i) {
    if (i >= spec.params.size()) throw AttackSpecError("attack '" + spec.kind_name() + "' is missing parameters");
    return spec.params[i];
  };
  switch (spec.kind) {
    case Kind::kNoise: return add_noise(mesh, param(0), spec.seed);
    case Kind::kSmooth: return laplacian_smooth(mesh, param(0), static_cast<int>(param(1)));
    case Kind::kQuantize: return quantize_coords(mesh, static_cast<int>(param(0)));
    case Kind::kSimilarity: return similarity_transform(mesh, spec.seed);
    case Kind::kSubdivMidpoint: return subdivide_midpoint(mesh, static_cast<int>(param(0)));
    case Kind::kSubdivLoop: return subdivide_loop(mesh, static_cast<int>(param(0)));
    case Kind::kSubdivSqrt3: return subdivide_sqrt3(mesh, static_cast<int>(param(0)));
    case Kind::kCrop: return crop(mesh, param(0));
    case Kind::kReorder: return reorder_elements(mesh, static_cast<int>(param(0)), spec.seed);
  }
  throw AttackSpecError("unknown attack kind");
}

}  // namespace meshmark::attacks
