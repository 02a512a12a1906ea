// meshmark command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 unreadable or invalid input (parse, mesh or
// topology errors), 3 key or capacity error, 4 attack grammar, 5 internal.

#include "meshmark/attacks.hpp"
#include "meshmark/bench.hpp"
#include "meshmark/corpus.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/mesh_io.hpp"
#include "meshmark/metrics.hpp"
#include "meshmark/normalize.hpp"
#include "meshmark/saliency.hpp"
#include "meshmark/watermark.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace meshmark;

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kKey = 3, kGrammar = 4, kInternal = 5 };

struct KeyOptions {
  std::string key_file;
  std::optional<std::uint64_t> key1;
  std::optional<double> delta;
  std::optional<std::size_t> bits;
  std::optional<double> ratio;
  std::optional<double> sigma;
  std::optional<double> trim;
  bool no_saliency = false;

  void attach(CLI::App* app) {
    app->add_option("-k,--key", key_file, "key file (name = value lines)");
    app->add_option("--key1", key1, "payload seed");
    app->add_option("--delta", delta, "QIM step in normalized units");
    app->add_option("--bits", bits, "payload length m");
    app->add_option("--ratio", ratio, "fraction of vertices used as carriers");
    app->add_option("--sigma-fraction", sigma, "saliency scale relative to the bounding-box diagonal");
    app->add_option("--span-trim", trim, "fraction of norms ignored at each end of the bin span");
    app->add_flag("--no-saliency", no_saliency, "use every vertex as a carrier");
  }

  WatermarkKey resolve() const {
    WatermarkKey key;
    if (!key_file.empty()) key = parse_key(read_text_file(key_file));
    if (key1) key.key1 = *key1;
    if (delta) key.delta = *delta;
    if (bits) key.payload_bits = *bits;
    if (ratio) key.saliency_ratio = *ratio;
    if (sigma) key.sigma_fraction = *sigma;
    if (trim) key.span_trim = *trim;
    if (no_saliency) key.use_saliency = false;
    validate(key);
    return key;
  }
};

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

int cmd_embed(const std::string& in, const std::string& out, const KeyOptions& opts) {
  const WatermarkKey key = opts.resolve();
  const Mesh mesh = read_mesh(in);
  const EmbedResult result = embed(mesh, key);
  write_mesh(out, result.mesh);
  const EmbedReport& r = result.report;
  std::cout << "vertices: " << mesh.vertex_count() << "\n"
            << "carriers: " << r.carrier_count << "\n"
            << "skipped: " << r.skipped_vertices << "\n"
            << "span: " << num(r.span.lo) << " " << num(r.span.hi) << "\n"
            << "sigma: " << num(r.sigma) << "\n"
            << "curvature_flags: " << r.curvature_flags << "\n"
            << "max_norm_change: " << num(r.max_norm_change) << "\n"
            << "carriers_per_bit:";
  for (std::size_t c : r.carriers_per_bit) std::cout << " " << c;
  std::cout << "\n";
  for (std::size_t i = 0; i < r.bins.size(); ++i) {
    std::cout << "bin " << i << ": [" << num(r.bins[i].lo) << ", " << num(r.bins[i].hi) << ")\n";
  }
  return kOk;
}

int cmd_extract(const std::string& in, const KeyOptions& opts) {
  const WatermarkKey key = opts.resolve();
  const ExtractResult result = extract(read_mesh(in), key);
  const Watermark expected = generate_watermark(key.key1, key.payload_bits);
  std::cout << "bits: " << result.watermark.to_string() << "\n"
            << "expected: " << expected.to_string() << "\n"
            << "confidence:";
  for (double c : result.confidence) std::cout << " " << num(c, "%.3f");
  std::cout << "\nvotes:";
  for (std::size_t v : result.votes) std::cout << " " << v;
  const Correlation corr = correlation(expected, result.watermark);
  std::cout << "\ncorrelation: " << num(corr.value, "%.6f") << (corr.degenerate ? " (degenerate)" : "") << "\n";
  return kOk;
}

int cmd_attack(const std::string& in, const std::string& text, const std::string& out, std::uint64_t seed) {
  attacks::AttackSpec spec;
  try {
    spec = attacks::parse_attack(text, attack_seed(seed, text));
  } catch (const AttackSpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGrammar;
  }
  write_mesh(out, attacks::apply(read_mesh(in), spec));
  std::cout << "applied " << spec.to_string() << "\n";
  return kOk;
}

int cmd_metric(const std::string& a, const std::string& b, const SamplingParams& sampling) {
  const DistanceReport d = mesh_distance(read_mesh(a), read_mesh(b), sampling);
  std::cout << "rms_a_to_b: " << num(d.rms_a_to_b, "%.9e") << "\n"
            << "rms_b_to_a: " << num(d.rms_b_to_a, "%.9e") << "\n"
            << "mrms: " << num(d.mrms, "%.9e") << "\n"
            << "hausdorff: " << num(d.hausdorff, "%.9e") << "\n"
            << "max_a_to_b: " << num(d.max_a_to_b, "%.9e") << "\n"
            << "max_b_to_a: " << num(d.max_b_to_a, "%.9e") << "\n"
            << "samples: " << d.sample_count << "\n";
  return kOk;
}

int cmd_bench(const std::string& config_path, bool no_saliency, const std::string& out_dir, bool quiet) {
  BenchConfig config = parse_bench_config(read_text_file(config_path));
  if (no_saliency) {
    config.key.use_saliency = false;
    config.report_name += "_no_saliency";
  }
  if (const char* env = std::getenv("MESHMARK_OUT_DIR"); env && *env) config.output_dir = env;
  if (!out_dir.empty()) config.output_dir = out_dir;

  BenchProgress progress;
  if (!quiet) {
    progress = [](const BenchRow& row) {
      std::cerr << row.mesh << " " << row.stage << " " << row.attack << " " << row.param;
      if (row.corr) std::cerr << " corr=" << num(*row.corr, "%.3f");
      if (!row.error.empty()) std::cerr << " error: " << row.error;
      std::cerr << "\n";
    };
  }
  const BenchReport report = run_bench(config, progress);
  const BenchFiles files = write_bench_report(report, config.output_dir);
  std::cout << files.csv.string() << "\n" << files.markdown.string() << "\n";
  return kOk;
}

std::array<std::uint8_t, 4> heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // blue -> green -> red
  const double r = std::clamp(2.0 * t - 1.0, 0.0, 1.0);
  const double b = std::clamp(1.0 - 2.0 * t, 0.0, 1.0);
  const double g = 1.0 - r - b;
  auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); };
  return {byte(r), byte(g), byte(b), 255};
}

int cmd_saliency(const std::string& in, const std::string& csv_path, const std::string& colored, double fraction) {
  if (!(fraction > 0.0)) throw CapacityError("sigma fraction must be positive");
  const Mesh mesh = read_mesh(in);
  const double sigma = fraction * principal_bbox_diagonal(mesh);
  const SaliencyMap map = compute_saliency(mesh, sigma);
  std::string csv = "vertex,saliency\n";
  for (std::size_t i = 0; i < map.values.size(); ++i) csv += std::to_string(i) + "," + num(map.values[i], "%.9e") + "\n";
  write_text_file(csv_path, csv);
  if (!colored.empty()) {
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    const double range = *hi - *lo;
    std::vector<std::array<std::uint8_t, 4>> colors;
    colors.reserve(map.values.size());
    for (double s : map.values) colors.push_back(heat_color(range > 0.0 ? (s - *lo) / range : 0.0));
    write_text_file(colored, write_coff(mesh, colors));
  }
  std::cout << "sigma: " << num(sigma) << "\nflagged: " << map.flagged_count << "\n";
  return kOk;
}

int cmd_corpus(bool list, const std::string& name, const std::string& out) {
  if (list || name.empty()) {
    for (const auto& n : corpus::names()) std::cout << n << "\n";
    return kOk;
  }
  if (out.empty()) {
    std::cerr << "error: corpus needs an output path\n";
    return kUsage;
  }
  const auto known = corpus::names();
  if (std::find(known.begin(), known.end(), name) == known.end() && name != "icosphere" && name != "grid" &&
      name != "bump_grid") {
    std::cerr << "error: unknown corpus mesh '" << name << "'\n";
    return kUsage;
  }
  write_mesh(out, corpus::make(name));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind robust watermarking of triangle meshes"};
  app.set_version_flag("--version", std::string(meshmark::version()));
  app.require_subcommand(1);

  std::string in, out, other, spec, config_path, out_dir, colored, corpus_name;
  std::uint64_t seed = 1;
  bool no_saliency = false, quiet = false, list = false;
  double sigma_fraction = 0.003;
  meshmark::SamplingParams sampling;
  KeyOptions embed_key, extract_key;

  auto* embed = app.add_subcommand("embed", "embed the key's payload into a mesh");
  embed->add_option("input", in, "input mesh (.off or .obj)")->required();
  embed->add_option("output", out, "watermarked mesh")->required();
  embed_key.attach(embed);

  auto* extract = app.add_subcommand("extract", "recover the payload and correlate it with the key's");
  extract->add_option("input", in, "mesh")->required();
  extract_key.attach(extract);

  auto* attack = app.add_subcommand("attack", "apply one attack");
  attack->add_option("input", in, "mesh")->required();
  attack->add_option("spec", spec, "attack, e.g. noise:0.3 or smooth:0.1,30")->required();
  attack->add_option("output", out, "attacked mesh")->required();
  attack->add_option("--seed", seed, "global seed for randomized attacks without @seed");
  attack->footer(meshmark::attacks::attack_grammar_help());

  auto* metric = app.add_subcommand("metric", "MRMS and Hausdorff distance between two meshes");
  metric->add_option("a", in, "first mesh")->required();
  metric->add_option("b", other, "second mesh")->required();
  metric->add_option("--samples", sampling.samples_per_triangle, "samples per triangle");
  metric->add_option("--seed", sampling.seed, "sampling seed");

  auto* bench = app.add_subcommand("bench", "run an attack battery from a config file");
  bench->add_option("config", config_path, "config file")->required();
  bench->add_flag("--no-saliency", no_saliency, "ablation: every vertex is a carrier");
  bench->add_option("--out", out_dir, "output directory (overrides MESHMARK_OUT_DIR and the config)");
  bench->add_flag("-q,--quiet", quiet, "no per-row progress");

  auto* saliency = app.add_subcommand("saliency", "per-vertex saliency as CSV");
  saliency->add_option("input", in, "mesh")->required();
  saliency->add_option("csv", out, "output CSV")->required();
  saliency->add_option("--colored", colored, "also write a color-mapped COFF mesh");
  saliency->add_option("--sigma-fraction", sigma_fraction, "scale relative to the bounding-box diagonal");

  auto* corpus = app.add_subcommand("corpus", "write a bundled mesh");
  corpus->add_option("name", corpus_name, "mesh name");
  corpus->add_option("output", out, "output path");
  corpus->add_flag("--list", list, "list bundled meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*embed) return cmd_embed(in, out, embed_key);
    if (*extract) return cmd_extract(in, extract_key);
    if (*attack) return cmd_attack(in, spec, out, seed);
    if (*metric) return cmd_metric(in, other, sampling);
    if (*bench) return cmd_bench(config_path, no_saliency, out_dir, quiet);
    if (*saliency) return cmd_saliency(in, out, colored, sigma_fraction);
    if (*corpus) return cmd_corpus(list, corpus_name, out);
  } catch (const meshmark::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const meshmark::MeshError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const meshmark::TopologyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const meshmark::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kKey;
  } catch (const meshmark::AttackSpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGrammar;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
