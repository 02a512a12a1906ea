#include "meshmark/watermark.hpp"

#include "meshmark/errors.hpp"
#include "meshmark/normalize.hpp"
#include "meshmark/qim.hpp"
#include "meshmark/rng.hpp"
#include "meshmark/saliency.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace meshmark {

void validate(const WatermarkKey& key) {
  if (!(key.delta > 0.0) || !std::isfinite(key.delta)) throw CapacityError("delta must be positive and finite");
  if (key.payload_bits < 1) throw CapacityError("payload_bits must be >= 1");
  if (!(key.saliency_ratio > 0.0) || key.saliency_ratio > 1.0) {
    throw CapacityError("saliency_ratio must lie in (0, 1]");
  }
  if (!(key.sigma_fraction > 0.0) || !std::isfinite(key.sigma_fraction)) {
    throw CapacityError("sigma_fraction must be positive and finite");
  }
  if (!(key.span_trim >= 0.0) || key.span_trim >= 0.5) throw CapacityError("span_trim must lie in [0, 0.5)");
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view name, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw CapacityError("key field '" + std::string(name) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view name, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw CapacityError("key field '" + std::string(name) + "': expected true/false");
}

std::vector<NormBin> equal_bins(double lo, double hi, std::size_t m) {
  const double width = (hi - lo) / static_cast<double>(m);
  std::vector<NormBin> bins(m);
  for (std::size_t i = 0; i < m; ++i) {
    bins[i].lo = lo + width * static_cast<double>(i);
    bins[i].hi = i + 1 == m ? hi : lo + width * static_cast<double>(i + 1);
  }
  return bins;
}

}  // namespace

std::string format_key(const WatermarkKey& key) {
  std::string out;
  out += "key1 = " + std::to_string(key.key1) + "\n";
  out += "delta = " + format_double(key.delta) + "\n";
  out += "payload_bits = " + std::to_string(key.payload_bits) + "\n";
  out += "saliency_ratio = " + format_double(key.saliency_ratio) + "\n";
  out += "sigma_fraction = " + format_double(key.sigma_fraction) + "\n";
  out += "span_trim = " + format_double(key.span_trim) + "\n";
  out += std::string("use_saliency = ") + (key.use_saliency ? "true" : "false") + "\n";
  return out;
}

bool set_key_field(WatermarkKey& key, std::string_view name, std::string_view value) {
  if (name == "key1") {
    key.key1 = parse_number<std::uint64_t>(name, value);
  } else if (name == "delta") {
    key.delta = parse_number<double>(name, value);
  } else if (name == "payload_bits") {
    key.payload_bits = parse_number<std::size_t>(name, value);
  } else if (name == "saliency_ratio") {
    key.saliency_ratio = parse_number<double>(name, value);
  } else if (name == "sigma_fraction") {
    key.sigma_fraction = parse_number<double>(name, value);
  } else if (name == "span_trim") {
    key.span_trim = parse_number<double>(name, value);
  } else if (name == "use_saliency") {
    key.use_saliency = parse_bool(name, value);
  } else {
    return false;
  }
  return true;
}

WatermarkKey parse_key(std::string_view text) {
  WatermarkKey key;
  bool have_key1 = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw CapacityError("key file line without '=': " + std::string(line));
    const std::string_view name = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!set_key_field(key, name, value)) throw CapacityError("unknown key field '" + std::string(name) + "'");
    if (name == "key1") have_key1 = true;
  }
  if (!have_key1) throw CapacityError("key file is missing key1");
  validate(key);
  return key;
}

std::string Watermark::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

Watermark generate_watermark(std::uint64_t key1, std::size_t m) {
  if (m < 1) throw CapacityError("payload length must be >= 1");
  Rng rng(key1);
  Watermark w;
  w.bits.resize(m);
  for (auto& b : w.bits) b = static_cast<std::uint8_t>(rng.next_u64() >> 63);
  return w;
}

std::vector<NormBin> assign_bins(std::span<const double> salient_norms, std::size_t m, double delta) {
  if (salient_norms.empty()) throw CapacityError("no carrier norms to bin");
  if (m < 1) throw CapacityError("payload length must be >= 1");
  const auto [mn, mx] = std::minmax_element(salient_norms.begin(), salient_norms.end());
  const double lo = *mn - delta;
  const double hi = *mx + delta;
  const double width = (hi - lo) / static_cast<double>(m);
  if (width < 2.0 * delta) {
    char msg[256];
    std::snprintf(msg, sizeof msg,
                  "carrier norm span %.6g too small for %zu bins of width >= 2*delta = %.6g; "
                  "use a smaller payload or a smaller delta",
                  *mx - *mn, m, 2.0 * delta);
    throw CapacityError(msg);
  }
  return equal_bins(lo, hi, m);
}

std::size_t bin_index(std::span<const NormBin> bins, double norm) {
  // Bins are contiguous; binary search on lower edges.
  auto it = std::upper_bound(bins.begin(), bins.end(), norm, [](double x, const NormBin& b) { return x < b.lo; });
  if (it == bins.begin()) return 0;
  return static_cast<std::size_t>(std::distance(bins.begin(), it)) - 1;
}

NormSpan norm_span(std::span<const double> norms, double trim) {
  if (norms.empty()) throw CapacityError("no vertex norms");
  if (!(trim >= 0.0) || trim >= 0.5) throw CapacityError("span_trim must lie in [0, 0.5)");
  std::vector<double> sorted(norms.begin(), norms.end());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<std::size_t>(std::floor(trim * static_cast<double>(sorted.size() - 1)));
  return {sorted[k], sorted[sorted.size() - 1 - k]};
}

CarrierSet select_carriers(const Mesh& normalized, std::span<const double> norms, const WatermarkKey& key) {
  CarrierSet set;
  if (!key.use_saliency) {
    // Every vertex carries, ranked by norm.
    set.vertices.resize(norms.size());
    std::iota(set.vertices.begin(), set.vertices.end(), VertexId{0});
    std::sort(set.vertices.begin(), set.vertices.end(), [&](VertexId a, VertexId b) {
      return norms[a] != norms[b] ? norms[a] < norms[b] : a < b;
    });
    return set;
  }
  set.sigma = key.sigma_fraction * principal_bbox_diagonal(normalized);
  const Adjacency adj = build_adjacency(normalized);
  const CurvatureField curvature = mean_curvature(normalized, adj);
  const SaliencyMap smap = compute_saliency(normalized, curvature, set.sigma);
  set.curvature_flags = curvature.flagged_count;
  set.vertices = select_salient(smap.values, norms, key.saliency_ratio);
  return set;
}

namespace {

// Salient vertices whose norm falls inside the bin range, in ascending norm.
std::vector<VertexId> carriers_in_range(const CarrierSet& set, std::span<const double> norms,
                                        std::span<const NormBin> bins) {
  std::vector<VertexId> out;
  out.reserve(set.vertices.size());
  for (VertexId v : set.vertices) {
    if (norms[v] >= bins.front().lo && norms[v] <= bins.back().hi) out.push_back(v);
  }
  return out;
}

}  // namespace

EmbedResult embed(const Mesh& mesh, const WatermarkKey& key) {
  validate(mesh);
  validate(key);
  const NormalizedMesh nm = normalize(mesh);
  const std::vector<double> norms = vertex_norms(nm.mesh);
  const CarrierSet salient = select_carriers(nm.mesh, norms, key);
  const Watermark payload = generate_watermark(key.key1, key.payload_bits);

  EmbedResult result;
  EmbedReport& report = result.report;
  report.sigma = salient.sigma;
  report.curvature_flags = salient.curvature_flags;
  report.span = norm_span(norms, key.span_trim);
  const double ends[] = {report.span.lo, report.span.hi};
  report.bins = assign_bins(ends, key.payload_bits, key.delta);
  const std::vector<VertexId> carriers = carriers_in_range(salient, norms, report.bins);
  report.carriers_per_bit.assign(key.payload_bits, 0);
  for (VertexId v : carriers) ++report.carriers_per_bit[bin_index(report.bins, norms[v])];

  std::vector<std::size_t> empty;
  for (std::size_t i = 0; i < report.carriers_per_bit.size(); ++i) {
    if (report.carriers_per_bit[i] == 0) empty.push_back(i);
  }
  if (!empty.empty()) {
    std::string list;
    for (std::size_t i = 0; i < empty.size() && i < 16; ++i) {
      char item[96];
      std::snprintf(item, sizeof item, "%s%zu [%.6g, %.6g)", i ? ", " : "", empty[i], report.bins[empty[i]].lo,
                    report.bins[empty[i]].hi);
      list += item;
    }
    if (empty.size() > 16) list += ", ...";
    throw CapacityError(std::to_string(empty.size()) + " of " + std::to_string(key.payload_bits) +
                        " payload bins have no carrier vertex: " + list);
  }

  const qim::QuantizerParams params{key.delta};
  result.mesh = mesh;
  for (VertexId v : carriers) {
    const double norm = norms[v];
    if (norm == 0.0) {
      ++report.skipped_vertices;
      continue;
    }
    const std::size_t bin = bin_index(report.bins, norm);
    const NormBin& b = report.bins[bin];
    // Keep quantized norms away from bin edges so small drifts of the edges
    // between embedding and extraction do not flip bin membership.
    const double guard = std::clamp(0.5 * (b.hi - b.lo - 2.0 * key.delta), 0.0, 0.5 * key.delta);
    double lo = b.lo + guard;
    double hi = b.hi - guard;
    if (hi - lo < 2.0 * key.delta) {
      lo = b.lo;
      hi = b.hi;
    }
    const double new_norm = qim::quantize_bit_bounded(std::clamp(norm, lo, hi), payload.bits[bin], params, lo, hi);
    const RescaleResult r = rescale_vertex(nm.mesh.vertices[v], new_norm);
    result.mesh.vertices[v] = nm.transform.invert(r.vertex);
    report.max_norm_change = std::max(report.max_norm_change, std::abs(new_norm - norm));
  }
  report.carrier_count = carriers.size() - report.skipped_vertices;
  return result;
}

ExtractResult extract(const Mesh& mesh, const WatermarkKey& key) {
  validate(mesh);
  validate(key);
  const NormalizedMesh nm = normalize(mesh);
  const std::vector<double> norms = vertex_norms(nm.mesh);
  const CarrierSet salient = select_carriers(nm.mesh, norms, key);

  // After heavy attacks the span may be too narrow for bins of width 2*delta;
  // the bins are still well defined, so no capacity check here.
  const NormSpan span = norm_span(norms, key.span_trim);
  const std::size_t m = key.payload_bits;
  const std::vector<NormBin> bins = equal_bins(span.lo - key.delta, span.hi + key.delta, m);
  const qim::QuantizerParams params{key.delta};
  std::vector<std::size_t> ones(m, 0), total(m, 0);
  for (VertexId v : carriers_in_range(salient, norms, bins)) {
    const std::size_t bin = bin_index(bins, norms[v]);
    ++total[bin];
    ones[bin] += static_cast<std::size_t>(qim::detect_bit(norms[v], params));
  }

  ExtractResult out;
  out.watermark.bits.assign(m, 0);
  out.confidence.assign(m, 0.0);
  out.votes = total;
  for (std::size_t i = 0; i < m; ++i) {
    if (total[i] == 0) continue;
    const std::size_t zeros = total[i] - ones[i];
    out.watermark.bits[i] = ones[i] > zeros ? 1 : 0;
    const double winning = static_cast<double>(std::max(ones[i], zeros));
    const double losing = static_cast<double>(std::min(ones[i], zeros));
    out.confidence[i] = (winning - losing) / static_cast<double>(total[i]);
  }
  return out;
}

Correlation correlation(const Watermark& a, const Watermark& b) {
  if (a.size() != b.size()) throw Error("correlation of watermarks with different lengths");
  if (a.size() == 0) throw Error("correlation of empty watermarks");
  const auto n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a.bits[i];
    sb += b.bits[i];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.bits[i] - ma, db = b.bits[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) return {a == b ? 1.0 : 0.0, true};
  return {std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0), false};
}

}  // namespace meshmark
