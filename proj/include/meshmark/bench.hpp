#pragma once

#include "meshmark/attacks.hpp"
#include "meshmark/mesh.hpp"
#include "meshmark/metrics.hpp"
#include "meshmark/watermark.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace meshmark {

const char* version();

// Benchmark configuration, read from a flat `key = value` file:
//
//   meshes = corpus:torus, data/bunny.off
//   attacks = noise:0.05, smooth:0.1,5, quant:9, sim:1, reorder:2
//   key1 = 20240601
//   output_dir = bench_out
//
// Keys: meshes, attacks (both may repeat and accumulate), the watermark key
// fields (key1, delta, payload_bits, saliency_ratio, sigma_fraction,
// span_trim, use_saliency), samples_per_triangle, seed, output_dir,
// report_name, timing, attack_metrics. In the attack list a token without ':'
// continues the previous one, so `smooth:0.1,30` needs no quoting.
struct BenchConfig {
  std::vector<std::string> meshes;  // file paths or `corpus:<name>`
  WatermarkKey key;
  std::vector<std::string> attacks;  // grammar strings, validated on parse
  SamplingParams sampling;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "bench_out";
  std::string report_name = "report";
  // Wall-clock milliseconds in the `millis` column; 0 when off so reports
  // stay byte-identical between runs.
  bool timing = false;
  // MRMS/Hausdorff of every attacked mesh against the watermarked one.
  bool attack_metrics = true;
};

// Throws ParseError (kind kBadConfig) with the offending line number.
BenchConfig parse_bench_config(std::string_view text);
std::string format_bench_config(const BenchConfig& config);
// FNV-1a 64 of the canonical config text, as 16 hex digits.
std::string config_hash(const BenchConfig& config);

// Seed used for an attack without an explicit `@seed`: derived from the
// global seed and the attack text, independent of its position in the grid.
std::uint64_t attack_seed(std::uint64_t global_seed, std::string_view attack_text);

Mesh load_bench_mesh(const std::string& source);
std::string bench_mesh_name(const std::string& source);

struct BenchRow {
  std::string mesh;
  std::string stage;   // `embed` or `attack`; `-failed` appended on error
  std::string attack;  // attack kind name, `none` for the embed row
  std::string param;   // attack parameters as in the grammar
  std::optional<double> corr;
  std::optional<double> mrms;
  std::optional<double> hd;
  long long millis = 0;
  std::string error;  // Markdown only
  std::optional<attacks::AttackSpec> spec;
};

struct BenchMeshInfo {
  std::string name;
  std::size_t vertices = 0;
  std::size_t faces = 0;
  double bbox_diagonal = 0.0;
  std::size_t carriers = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchMeshInfo> meshes;
  std::string config_hash;
  std::string version;
  BenchConfig config;
};

using BenchProgress = std::function<void(const BenchRow&)>;

// For every mesh: embed once (imperceptibility row), then attack, extract
// and correlate for every attack in the grid. Failures become rows with a
// `-failed` stage and the run continues. Rows are ordered by mesh (config
// order), then attack kind and parameters.
BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress = {});

// Columns: mesh,stage,attack,param,corr,mrms,hd,millis.
std::string bench_csv(const BenchReport& report);
std::string bench_markdown(const BenchReport& report);

struct BenchFiles {
  std::filesystem::path csv;
  std::filesystem::path markdown;
};
BenchFiles write_bench_report(const BenchReport& report, const std::filesystem::path& dir);

}  // namespace meshmark
