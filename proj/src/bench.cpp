#include "meshmark/bench.hpp"

#include "meshmark/corpus.hpp"
#include "meshmark/errors.hpp"
#include "meshmark/mesh_io.hpp"
#include "meshmark/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <map>

#ifndef MESHMARK_VERSION
#define MESHMARK_VERSION "0.0.0"
#endif

namespace meshmark {

const char* version() { return MESHMARK_VERSION; }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    const auto item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool parse_flag(std::string_view v, bool& out) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") {
    out = true;
  } else if (v == "false" || v == "0" || v == "off" || v == "no") {
    out = false;
  } else {
    return false;
  }
  return true;
}

template <typename T>
bool parse_int(std::string_view v, T& out) {
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && ptr == v.data() + v.size();
}

std::string fixed(double v, int digits) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // no "-0.000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt(const std::optional<double>& v, bool scientific) {
  if (!v) return "";
  return scientific ? sci(*v) : fixed(*v, 6);
}

bool spec_less(const attacks::AttackSpec& a, const attacks::AttackSpec& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.params != b.params) return a.params < b.params;
  return a.seed < b.seed;
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

BenchConfig parse_bench_config(std::string_view text) {
  BenchConfig config;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) { throw ParseError(ParseErrorKind::kBadConfig, line_no, why); };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string_view name = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (name == "meshes") {
      for (auto& m : split_list(value)) config.meshes.push_back(m);
    } else if (name == "attacks") {
      std::vector<std::string> merged;
      for (auto& tok : split_list(value)) {
        if (tok.find(':') == std::string::npos && !merged.empty()) {
          merged.back() += "," + tok;
        } else {
          merged.push_back(tok);
        }
      }
      for (auto& a : merged) {
        try {
          (void)attacks::parse_attack(a);
        } catch (const AttackSpecError& e) {
          fail(e.what());
        }
        config.attacks.push_back(a);
      }
    } else if (name == "samples_per_triangle") {
      if (!parse_int(value, config.sampling.samples_per_triangle) || config.sampling.samples_per_triangle < 0) {
        fail("samples_per_triangle must be a non-negative integer");
      }
    } else if (name == "seed") {
      if (!parse_int(value, config.seed)) fail("seed must be an unsigned integer");
    } else if (name == "output_dir") {
      config.output_dir = std::string(value);
    } else if (name == "report_name") {
      if (value.empty() || value.find_first_of("/\\") != std::string_view::npos) fail("bad report_name");
      config.report_name = std::string(value);
    } else if (name == "timing") {
      if (!parse_flag(value, config.timing)) fail("timing must be true or false");
    } else if (name == "attack_metrics") {
      if (!parse_flag(value, config.attack_metrics)) fail("attack_metrics must be true or false");
    } else {
      try {
        if (!set_key_field(config.key, name, value)) fail("unknown key '" + std::string(name) + "'");
      } catch (const CapacityError& e) {
        fail(e.what());
      }
    }
  }
  try {
    validate(config.key);
  } catch (const CapacityError& e) {
    throw ParseError(ParseErrorKind::kBadConfig, 0, e.what());
  }
  if (config.meshes.empty()) throw ParseError(ParseErrorKind::kBadConfig, 0, "no meshes listed");
  if (config.attacks.empty()) throw ParseError(ParseErrorKind::kBadConfig, 0, "attack grid is empty");
  std::vector<std::string> sorted = config.meshes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParseError(ParseErrorKind::kBadConfig, 0, "a mesh is listed twice");
  }
  config.sampling.seed = config.seed;
  return config;
}

std::string format_bench_config(const BenchConfig& config) {
  std::string out;
  auto list = [](const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
    return s;
  };
  out += "meshes = " + list(config.meshes) + "\n";
  out += "attacks = " + list(config.attacks) + "\n";
  out += format_key(config.key);
  out += "samples_per_triangle = " + std::to_string(config.sampling.samples_per_triangle) + "\n";
  out += "seed = " + std::to_string(config.seed) + "\n";
  out += "report_name = " + config.report_name + "\n";
  out += std::string("timing = ") + (config.timing ? "true" : "false") + "\n";
  out += std::string("attack_metrics = ") + (config.attack_metrics ? "true" : "false") + "\n";
  return out;
}

std::string config_hash(const BenchConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(format_bench_config(config))));
  return buf;
}

std::uint64_t attack_seed(std::uint64_t global_seed, std::string_view attack_text) {
  return derive_seed(global_seed, fnv1a(trim(attack_text)));
}

Mesh load_bench_mesh(const std::string& source) {
  constexpr std::string_view prefix = "corpus:";
  if (source.starts_with(prefix)) return corpus::make(source.substr(prefix.size()));
  return read_mesh(source);
}

std::string bench_mesh_name(const std::string& source) {
  constexpr std::string_view prefix = "corpus:";
  if (source.starts_with(prefix)) return source.substr(prefix.size());
  return std::filesystem::path(source).stem().string();
}

BenchReport run_bench(const BenchConfig& config, const BenchProgress& progress) {
  BenchReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  report.version = version();

  std::vector<attacks::AttackSpec> grid;
  for (const auto& text : config.attacks) grid.push_back(attacks::parse_attack(text, attack_seed(config.seed, text)));
  std::stable_sort(grid.begin(), grid.end(), spec_less);

  SamplingParams sampling = config.sampling;
  sampling.seed = config.seed;
  const Watermark payload = generate_watermark(config.key.key1, config.key.payload_bits);

  auto emit = [&](BenchRow row) {
    if (!config.timing) row.millis = 0;
    if (progress) progress(row);
    report.rows.push_back(std::move(row));
  };

  for (const auto& source : config.meshes) {
    BenchMeshInfo info;
    info.name = bench_mesh_name(source);
    BenchRow embed_row;
    embed_row.mesh = info.name;
    embed_row.stage = "embed";
    embed_row.attack = "none";

    Mesh original;
    EmbedResult embedded;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      original = load_bench_mesh(source);
      info.vertices = original.vertex_count();
      info.faces = original.face_count();
      info.bbox_diagonal = bbox_diagonal(original);
      embedded = embed(original, config.key);
      info.carriers = embedded.report.carrier_count;
      embed_row.corr = correlation(payload, extract(embedded.mesh, config.key).watermark).value;
      embed_row.millis = elapsed_ms(t0);
      const DistanceReport d = mesh_distance(original, embedded.mesh, sampling);
      embed_row.mrms = d.mrms;
      embed_row.hd = d.hausdorff;
    } catch (const std::exception& e) {
      embed_row.stage = "embed-failed";
      embed_row.error = e.what();
      embed_row.millis = elapsed_ms(t0);
    }
    report.meshes.push_back(info);
    const bool embedded_ok = embed_row.error.empty();
    emit(std::move(embed_row));

    for (const auto& spec : grid) {
      BenchRow row;
      row.mesh = info.name;
      row.stage = "attack";
      row.attack = spec.kind_name();
      row.param = spec.param_string();
      row.spec = spec;
      if (!embedded_ok) {
        row.stage = "attack-failed";
        row.error = "embedding failed";
        emit(std::move(row));
        continue;
      }
      const auto t1 = std::chrono::steady_clock::now();
      try {
        const Mesh attacked = attacks::apply(embedded.mesh, spec);
        row.corr = correlation(payload, extract(attacked, config.key).watermark).value;
        row.millis = elapsed_ms(t1);
        if (config.attack_metrics) {
          const DistanceReport d = mesh_distance(embedded.mesh, attacked, sampling);
          row.mrms = d.mrms;
          row.hd = d.hausdorff;
        }
      } catch (const std::exception& e) {
        row.stage = "attack-failed";
        row.error = e.what();
        row.millis = elapsed_ms(t1);
      }
      emit(std::move(row));
    }
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out = "mesh,stage,attack,param,corr,mrms,hd,millis\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.mesh) + "," + r.stage + "," + r.attack + "," + csv_field(r.param) + "," + opt(r.corr, false) +
           "," + opt(r.mrms, true) + "," + opt(r.hd, true) + "," + std::to_string(r.millis) + "\n";
  }
  return out;
}

namespace {

std::string column_label(const attacks::AttackSpec& s) {
  using attacks::Kind;
  switch (s.kind) {
    case Kind::kNoise: return "Noise " + s.param_string() + "%";
    case Kind::kSmooth: return "Smooth " + s.param_string();
    case Kind::kQuantize: return "Quant " + s.param_string() + " bits";
    case Kind::kSimilarity: return "Sim " + s.param_string();
    case Kind::kSubdivMidpoint:
    case Kind::kSubdivLoop:
    case Kind::kSubdivSqrt3: return "Subdiv " + s.param_string();
    case Kind::kCrop: return "Crop " + s.param_string() + "%";
    case Kind::kReorder: return "Reorder " + s.param_string();
  }
  return s.to_string();
}

std::string cell(const BenchRow* row) {
  if (!row) return "";
  if (!row->error.empty()) return "failed";
  return row->corr ? fixed(*row->corr, 3) : "";
}

void robustness_table(std::string& out, const BenchReport& report, const std::string& title,
                      const std::vector<attacks::Kind>& kinds) {
  auto wanted = [&](attacks::Kind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  std::vector<std::string> columns;
  std::map<std::string, std::map<std::string, const BenchRow*>> grid;
  std::map<std::string, std::vector<double>> sims;
  std::size_t sim_count = 0;
  for (const auto& r : report.rows) {
    if (!r.spec || !wanted(r.spec->kind)) continue;
    if (r.spec->kind == attacks::Kind::kSimilarity) {
      if (r.corr) sims[r.mesh].push_back(*r.corr);
      continue;
    }
    const std::string label = column_label(*r.spec);
    if (std::find(columns.begin(), columns.end(), label) == columns.end()) columns.push_back(label);
    grid[r.mesh][label] = &r;
  }
  for (const auto& r : report.rows) {
    if (r.spec && r.spec->kind == attacks::Kind::kSimilarity && wanted(r.spec->kind) &&
        r.mesh == report.rows.front().mesh) {
      ++sim_count;
    }
  }
  const bool with_sim = sim_count > 0;
  if (columns.empty() && !with_sim) return;

  out += "## " + title + "\n\n| Mesh |";
  std::string rule = "|---|";
  for (const auto& c : columns) {
    out += " " + c + " |";
    rule += "---:|";
  }
  if (with_sim) {
    out += " Sim mean (n=" + std::to_string(sim_count) + ") | Sim min |";
    rule += "---:|---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& m : report.meshes) {
    out += "| " + m.name + " |";
    for (const auto& c : columns) {
      auto it = grid[m.name].find(c);
      out += " " + cell(it == grid[m.name].end() ? nullptr : it->second) + " |";
    }
    if (with_sim) {
      const auto& v = sims[m.name];
      if (v.empty()) {
        out += " | |";
      } else {
        double sum = 0.0;
        for (double x : v) sum += x;
        out += " " + fixed(sum / static_cast<double>(v.size()), 3) + " | " + fixed(*std::min_element(v.begin(), v.end()), 3) +
               " |";
      }
    }
    out += "\n";
  }
  out += "\n";
}

}  // namespace

std::string bench_markdown(const BenchReport& report) {
  const BenchConfig& c = report.config;
  std::string out = "# meshmark benchmark: " + c.report_name + "\n\n";
  out += "- version: " + report.version + "\n";
  out += "- config hash: " + report.config_hash + "\n";
  out += "- seed: " + std::to_string(c.seed) + "\n";
  out += "- key: key1=" + std::to_string(c.key.key1) + ", delta=" + fixed(c.key.delta, 6) +
         ", payload_bits=" + std::to_string(c.key.payload_bits) + ", saliency_ratio=" + fixed(c.key.saliency_ratio, 3) +
         ", sigma_fraction=" + fixed(c.key.sigma_fraction, 4) + ", span_trim=" + fixed(c.key.span_trim, 4) +
         ", saliency=" + (c.key.use_saliency ? "on" : "off") + "\n";
  out += "- sampling: " + std::to_string(c.sampling.samples_per_triangle) + " samples per triangle plus vertices\n\n";

  out += "## Imperceptibility\n\n";
  out += "| Mesh | Vertices | Faces | Carriers | MRMS | HD | MRMS/diag | HD/diag | Corr |\n";
  out += "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& m : report.meshes) {
    const BenchRow* row = nullptr;
    for (const auto& r : report.rows) {
      if (r.mesh == m.name && r.attack == "none") row = &r;
    }
    out += "| " + m.name + " | " + std::to_string(m.vertices) + " | " + std::to_string(m.faces) + " | " +
           std::to_string(m.carriers) + " | ";
    if (row && row->error.empty() && row->mrms && m.bbox_diagonal > 0) {
      out += sci(*row->mrms) + " | " + sci(*row->hd) + " | " + sci(*row->mrms / m.bbox_diagonal) + " | " +
             sci(*row->hd / m.bbox_diagonal) + " | " + fixed(*row->corr, 3) + " |\n";
    } else {
      out += "failed | | | | |\n";
    }
  }
  out += "\n";

  using attacks::Kind;
  robustness_table(out, report, "Robustness: noise, smoothing, reordering",
                   {Kind::kNoise, Kind::kSmooth, Kind::kReorder});
  robustness_table(out, report, "Robustness: quantization, similarity, subdivision, cropping",
                   {Kind::kQuantize, Kind::kSimilarity, Kind::kSubdivMidpoint, Kind::kSubdivLoop,
                    Kind::kSubdivSqrt3, Kind::kCrop});

  std::string failures;
  for (const auto& r : report.rows) {
    if (r.error.empty()) continue;
    failures += "- " + r.mesh + " " + (r.spec ? r.spec->to_string() : std::string("embed")) + ": " + r.error + "\n";
  }
  if (!failures.empty()) out += "## Failures\n\n" + failures + "\n";
  return out;
}

BenchFiles write_bench_report(const BenchReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  BenchFiles files{dir / (report.config.report_name + ".csv"), dir / (report.config.report_name + ".md")};
  write_text_file(files.csv, bench_csv(report));
  write_text_file(files.markdown, bench_markdown(report));
  return files;
}

}  // namespace meshmark
