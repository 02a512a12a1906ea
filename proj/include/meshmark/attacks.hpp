#pragma once

#include "meshmark/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace meshmark::attacks {

// Additive binary noise: every vertex moves by +/- (amplitude_percent / 100) *
// (mean distance of the vertices from their centroid) along a random unit
// direction. Topology is unchanged.
Mesh add_noise(const Mesh& mesh, double amplitude_percent, std::uint64_t seed);

// Uniform-weight Laplacian smoothing, Jacobi updates:
// v <- v + lambda * (mean(one-ring) - v). Isolated vertices stay fixed.
Mesh laplacian_smooth(const Mesh& mesh, double lambda, int iterations);

// Snaps each axis independently to 2^bits uniform levels spanning the mesh's
// extent on that axis (both ends included). Zero-extent axes are untouched.
Mesh quantize_coords(const Mesh& mesh, int bits);

struct Similarity {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();
};

// Random rotation (uniform over SO(3)), scale in [0.5, 2], translation in a
// cube of half-extent equal to the mesh's bounding-box diagonal.
Similarity random_similarity(const Mesh& mesh, std::uint64_t seed);

// v <- scale * R * v + t. Throws AttackSpecError for non-rotations or scale <= 0.
Mesh similarity_transform(const Mesh& mesh, const Similarity& s);
Mesh similarity_transform(const Mesh& mesh, std::uint64_t seed);

// Each triangle split in four through its edge midpoints (no smoothing).
Mesh subdivide_midpoint(const Mesh& mesh, int iterations);
// Loop subdivision with the standard boundary rules. Throws TopologyError on
// edges shared by more than two faces.
Mesh subdivide_loop(const Mesh& mesh, int iterations);
// Kobbelt's sqrt(3) subdivision. Boundary edges are not flipped and boundary
// vertices are not relaxed. Throws TopologyError on non-manifold edges.
Mesh subdivide_sqrt3(const Mesh& mesh, int iterations);

// Deletes the ratio_percent% of vertices furthest along the principal axis
// (largest-variance direction) together with their incident faces, then
// reindexes densely. Throws MeshError when fewer than 3 vertices remain.
Mesh crop(const Mesh& mesh, double ratio_percent);

// type 1: permute vertices (faces remapped); 2: permute faces; 3: both.
Mesh reorder_elements(const Mesh& mesh, int type, std::uint64_t seed);

enum class Kind { kNoise, kSmooth, kQuantize, kSimilarity, kSubdivMidpoint, kSubdivLoop, kSubdivSqrt3, kCrop, kReorder };

// Tagged attack descriptor. `params` meaning depends on `kind`:
//   noise: {amplitude %}      smooth: {lambda, iterations}   quant: {bits}
//   sim: {}                   subdiv_*: {iterations}          crop: {ratio %}
//   reorder: {type}
struct AttackSpec {
  Kind kind = Kind::kNoise;
  std::vector<double> params;
  std::uint64_t seed = 0;

  // Canonical grammar form, e.g. `smooth:0.1,30` or `subdiv:loop,1`.
  std::string to_string() const;
  // Grammar name of the kind (`noise`, `smooth`, `quant`, `sim`, `subdiv`, `crop`, `reorder`).
  std::string kind_name() const;
  // Parameter part of the grammar form, e.g. `0.1,30` or `loop,1`.
  std::string param_string() const;
};

// Parses `noise:A`, `smooth:L,N`, `quant:B`, `sim:SEED`, `subdiv:{midpoint|loop|sqrt3},N`,
// `crop:R`, `reorder:T`. `default_seed` seeds randomized attacks that do not
// carry their own seed. Throws AttackSpecError with a grammar summary.
AttackSpec parse_attack(std::string_view text, std::uint64_t default_seed = 1);

// One-line-per-form description of the grammar, for error messages and --help.
std::string attack_grammar_help();

Mesh apply(const Mesh& mesh, const AttackSpec& spec);

}  // namespace meshmark::attacks
