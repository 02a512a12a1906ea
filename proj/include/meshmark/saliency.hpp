#pragma once

#include "meshmark/adjacency.hpp"
#include "meshmark/mesh.hpp"

#include <span>
#include <vector>

namespace meshmark {

struct CurvatureField {
  // Mean curvature per vertex (1/model units). Positive on convex regions
  // with outward-facing normals.
  std::vector<double> mean;
  std::vector<double> kappa1;
  std::vector<double> kappa2;
  // Vertices whose curvature could not be estimated (ring < 2, zero normal);
  // their curvature is 0.
  std::vector<bool> flagged;
  std::size_t flagged_count = 0;
};

// Taubin's tensor estimate of the principal curvatures at every vertex.
CurvatureField mean_curvature(const Mesh& mesh, const Adjacency& adjacency);

// Vertices within Euclidean distance < radius of vertex v (v included), ascending.
std::vector<VertexId> neighborhood(const Mesh& mesh, VertexId v, double radius);

// Average of `field` over N(v, 2*sigma) with Gaussian weights exp(-d^2 / 2 sigma^2).
double gaussian_weighted_average(const Mesh& mesh, std::span<const double> field, VertexId v, double sigma);

struct SaliencyMap {
  std::vector<double> values;
  double sigma = 0.0;
  std::size_t flagged_count = 0;
};

// |G(Curv, sigma) - G(Curv, 2 sigma)| per vertex.
SaliencyMap compute_saliency(const Mesh& mesh, double sigma);
SaliencyMap compute_saliency(const Mesh& mesh, const CurvatureField& curvature, double sigma);

// The ceil(ratio * n) most salient vertices. Ties are broken by lower vertex
// norm, then lower index. The result is ordered by ascending norm (then index).
std::vector<VertexId> select_salient(std::span<const double> saliency, std::span<const double> norms, double ratio);

// ceil(ratio * n), robust to representation error in ratio (0.7 * 10 == 7).
std::size_t salient_count(std::size_t n, double ratio);

}  // namespace meshmark
