#include "meshmark/mesh_io.hpp"

#include "meshmark/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace meshmark {
namespace {

// Splits the input into lines, tracking 1-based numbers, skipping blanks and
// `#` comments.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Returns false at end of input.
  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view raw = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (!raw.empty()) {
        line = raw;
        return true;
      }
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec == std::errc::result_out_of_range) {
    // from_chars leaves `out` untouched on overflow; treat as infinite.
    out = std::numeric_limits<double>::infinity();
    return ptr == tok.data() + tok.size();
  }
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_int(std::string_view tok, long long& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

Vec3 parse_vertex(std::span<const std::string_view> toks, std::size_t line) {
  if (toks.size() < 3) throw ParseError(ParseErrorKind::kBadVertex, line, "expected 3 coordinates");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    double d = 0;
    if (!parse_double(toks[k], d)) {
      throw ParseError(ParseErrorKind::kBadVertex, line, "cannot parse '" + std::string(toks[k]) + "'");
    }
    if (!std::isfinite(d)) {
      throw ParseError(ParseErrorKind::kNonFiniteCoordinate, line, std::string(toks[k]));
    }
    v[k] = d;
  }
  return v;
}

Face check_face(const std::array<long long, 3>& idx, std::size_t vertex_count, std::size_t line) {
  Face f{};
  for (int k = 0; k < 3; ++k) {
    if (idx[k] < 0 || static_cast<unsigned long long>(idx[k]) >= vertex_count) {
      throw ParseError(ParseErrorKind::kIndexOutOfRange, line,
                       "index " + std::to_string(idx[k]) + " with " + std::to_string(vertex_count) +
                           " vertices");
    }
    f[k] = static_cast<VertexId>(idx[k]);
  }
  if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
    throw ParseError(ParseErrorKind::kRepeatedIndex, line, "face repeats a vertex");
  }
  return f;
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace

Mesh parse_off(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(ParseErrorKind::kBadHeader, 0, "empty input");
  auto toks = split_ws(line);
  if (toks.empty() || toks[0] != "OFF") {
    throw ParseError(ParseErrorKind::kBadHeader, reader.line_no(), "expected 'OFF'");
  }
  // Counts may follow the keyword on the same line.
  std::vector<std::string_view> count_toks(toks.begin() + 1, toks.end());
  if (count_toks.empty()) {
    if (!reader.next(line)) throw ParseError(ParseErrorKind::kUnexpectedEnd, reader.line_no(), "missing counts");
    count_toks = split_ws(line);
  }
  long long nv = 0, nf = 0;
  if (count_toks.size() < 2 || !parse_int(count_toks[0], nv) || !parse_int(count_toks[1], nf) || nv < 0 ||
      nf < 0) {
    throw ParseError(ParseErrorKind::kBadCounts, reader.line_no(), "expected '<vertices> <faces> <edges>'");
  }

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long long i = 0; i < nv; ++i) {
    if (!reader.next(line)) {
      throw ParseError(ParseErrorKind::kUnexpectedEnd, reader.line_no(),
                       "expected " + std::to_string(nv) + " vertices, got " + std::to_string(i));
    }
    auto vt = split_ws(line);
    mesh.vertices.push_back(parse_vertex(vt, reader.line_no()));
  }
  for (long long i = 0; i < nf; ++i) {
    if (!reader.next(line)) {
      throw ParseError(ParseErrorKind::kUnexpectedEnd, reader.line_no(),
                       "expected " + std::to_string(nf) + " faces, got " + std::to_string(i));
    }
    auto ft = split_ws(line);
    long long arity = 0;
    if (ft.empty() || !parse_int(ft[0], arity)) {
      throw ParseError(ParseErrorKind::kNonTriangleFace, reader.line_no(), "missing face arity");
    }
    if (arity != 3) {
      throw ParseError(ParseErrorKind::kNonTriangleFace, reader.line_no(), "arity " + std::to_string(arity));
    }
    if (ft.size() < 4) throw ParseError(ParseErrorKind::kNonTriangleFace, reader.line_no(), "too few indices");
    std::array<long long, 3> idx{};
    for (int k = 0; k < 3; ++k) {
      if (!parse_int(ft[k + 1], idx[k])) {
        throw ParseError(ParseErrorKind::kIndexOutOfRange, reader.line_no(),
                         "cannot parse index '" + std::string(ft[k + 1]) + "'");
      }
    }
    mesh.faces.push_back(check_face(idx, mesh.vertices.size(), reader.line_no()));
  }
  if (mesh.vertices.size() < 3 || mesh.faces.empty()) {
    throw ParseError(ParseErrorKind::kEmptyMesh, 0, "need >= 3 vertices and >= 1 face");
  }
  return mesh;
}

std::string write_off(const Mesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 60 + mesh.faces.size() * 24 + 32);
  out += "OFF\n";
  out += std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.faces.size()) + " 0\n";
  for (const Vec3& v : mesh.vertices) {
    append_number(out, v.x());
    out += ' ';
    append_number(out, v.y());
    out += ' ';
    append_number(out, v.z());
    out += '\n';
  }
  for (const Face& f : mesh.faces) {
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  }
  return out;
}

std::string write_coff(const Mesh& mesh, std::span<const std::array<std::uint8_t, 4>> colors) {
  if (colors.size() != mesh.vertices.size()) throw Error("write_coff: one color per vertex required");
  std::string out = "COFF\n";
  out += std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.faces.size()) + " 0\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    append_number(out, v.x());
    out += ' ';
    append_number(out, v.y());
    out += ' ';
    append_number(out, v.z());
    for (auto c : colors[i]) out += " " + std::to_string(c);
    out += '\n';
  }
  for (const Face& f : mesh.faces) {
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  }
  return out;
}

Mesh parse_obj(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  Mesh mesh;
  struct PendingFace {
    std::array<long long, 3> idx;
    std::size_t line;
  };
  std::vector<PendingFace> pending;
  while (reader.next(line)) {
    auto toks = split_ws(line);
    if (toks[0] == "v") {
      mesh.vertices.push_back(parse_vertex(std::span(toks).subspan(1), reader.line_no()));
    } else if (toks[0] == "f") {
      if (toks.size() != 4) {
        throw ParseError(ParseErrorKind::kNonTriangleFace, reader.line_no(),
                         "arity " + std::to_string(toks.size() - 1));
      }
      PendingFace pf{{}, reader.line_no()};
      for (int k = 0; k < 3; ++k) {
        std::string_view t = toks[k + 1];
        t = t.substr(0, t.find('/'));
        if (!parse_int(t, pf.idx[k])) {
          throw ParseError(ParseErrorKind::kIndexOutOfRange, reader.line_no(),
                           "cannot parse index '" + std::string(toks[k + 1]) + "'");
        }
      }
      pending.push_back(pf);
    }
  }
  // Faces may precede the vertices they reference; resolve once all are read.
  mesh.faces.reserve(pending.size());
  const auto nv = static_cast<long long>(mesh.vertices.size());
  for (const PendingFace& pf : pending) {
    std::array<long long, 3> zero_based{};
    for (int k = 0; k < 3; ++k) {
      const long long i = pf.idx[k];
      // Negative indices are relative to the end of the vertex list.
      zero_based[k] = i > 0 ? i - 1 : (i < 0 ? nv + i : -1);
    }
    mesh.faces.push_back(check_face(zero_based, mesh.vertices.size(), pf.line));
  }
  if (mesh.vertices.size() < 3 || mesh.faces.empty()) {
    throw ParseError(ParseErrorKind::kEmptyMesh, 0, "need >= 3 vertices and >= 1 face");
  }
  return mesh;
}

std::string write_obj(const Mesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 60 + mesh.faces.size() * 24);
  for (const Vec3& v : mesh.vertices) {
    out += "v ";
    append_number(out, v.x());
    out += ' ';
    append_number(out, v.y());
    out += ' ';
    append_number(out, v.z());
    out += '\n';
  }
  for (const Face& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseErrorKind::kIo, 0, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

namespace {
std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}
}  // namespace

Mesh read_mesh(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string ext = lower_extension(path);
  try {
    if (ext == ".obj") return parse_obj(text);
    return parse_off(text);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), e.line(), path.string() + ": " + e.detail());
  }
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  write_text_file(path, lower_extension(path) == ".obj" ? write_obj(mesh) : write_off(mesh));
}

}  // namespace meshmark
