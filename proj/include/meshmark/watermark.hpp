#pragma once

#include "meshmark/mesh.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshmark {

// Secret key material shared by embedder and extractor.
struct WatermarkKey {
  std::uint64_t key1 = 0;         // payload PRNG seed
  double delta = 0.05;            // QIM step in normalized-norm units (key2)
  std::size_t payload_bits = 10;  // m
  double saliency_ratio = 0.70;   // fraction of vertices used as carriers
  double sigma_fraction = 0.003;  // saliency scale as a fraction of the bbox diagonal
  // Fraction of vertices ignored at each end of the norm range when placing
  // the bins; 0 uses the extreme norms.
  double span_trim = 0.01;
  // When false, every vertex is a carrier (saliency ablation).
  bool use_saliency = true;
};

// Throws CapacityError describing the first invalid field.
void validate(const WatermarkKey& key);

// Plain-text key file: one `name = value` per line, `#` comments allowed.
// Fields: key1, delta, payload_bits, saliency_ratio, sigma_fraction, span_trim,
// use_saliency.
std::string format_key(const WatermarkKey& key);
WatermarkKey parse_key(std::string_view text);
// Sets one named field from its text form. Returns false for unknown names;
// throws CapacityError for unparsable values.
bool set_key_field(WatermarkKey& key, std::string_view name, std::string_view value);

struct Watermark {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::string to_string() const;
  bool operator==(const Watermark&) const = default;
};

// Payload bits from xoshiro256** seeded with key1: bit i is the top bit of
// the i-th output.
Watermark generate_watermark(std::uint64_t key1, std::size_t m);

struct NormBin {
  double lo;
  double hi;  // half-open [lo, hi) except the last bin, which is closed
};

// m equal-width contiguous bins over [min - delta, max + delta]. Throws
// CapacityError when a bin would be narrower than 2 * delta.
std::vector<NormBin> assign_bins(std::span<const double> salient_norms, std::size_t m, double delta);

struct NormSpan {
  double lo;
  double hi;
};

// Order statistics of all vertex norms at ranks k and n-1-k with
// k = floor(trim * (n - 1)). Embedding moves few vertices across these ranks,
// so the span is reproduced from the watermarked mesh.
NormSpan norm_span(std::span<const double> norms, double trim);

// Bin containing `norm`; values outside the span clamp to the end bins.
std::size_t bin_index(std::span<const NormBin> bins, double norm);

struct EmbedReport {
  std::vector<std::size_t> carriers_per_bit;
  std::size_t carrier_count = 0;
  std::size_t skipped_vertices = 0;
  std::vector<NormBin> bins;
  NormSpan span{0.0, 0.0};
  double sigma = 0.0;  // saliency scale used, normalized units (0 without saliency)
  std::size_t curvature_flags = 0;
  double max_norm_change = 0.0;  // normalized units
};

struct EmbedResult {
  Mesh mesh;
  EmbedReport report;
};

// Quantizes the norms of the salient vertices of the normalized mesh so that
// every carrier in bin i lands on the lattice of bit i. Bins cover the trimmed
// norm span of all vertices widened by delta; salient vertices outside it are
// left alone, as are all non-salient vertices (copied bit-exactly). Throws
// CapacityError when a bin has no carrier.
EmbedResult embed(const Mesh& mesh, const WatermarkKey& key);

struct ExtractResult {
  Watermark watermark;
  // (winning - losing) / total votes per bit; 0 for empty bins.
  std::vector<double> confidence;
  std::vector<std::size_t> votes;
};

// Blind extraction: needs only the mesh and the key.
ExtractResult extract(const Mesh& mesh, const WatermarkKey& key);

struct Correlation {
  double value = 0.0;
  // True when a vector was constant and the exact-match indicator was used.
  bool degenerate = false;
};

// Pearson correlation of two equal-length bit vectors.
Correlation correlation(const Watermark& a, const Watermark& b);

// Carrier vertices of an already normalized mesh, ordered by ascending norm.
struct CarrierSet {
  std::vector<VertexId> vertices;
  double sigma = 0.0;
  std::size_t curvature_flags = 0;
};
CarrierSet select_carriers(const Mesh& normalized, std::span<const double> norms, const WatermarkKey& key);

}  // namespace meshmark
