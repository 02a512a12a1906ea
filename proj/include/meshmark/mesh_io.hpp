#pragma once

#include "meshmark/mesh.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace meshmark {

// ASCII OFF with triangular faces. Comments (`#`) and blank lines are skipped.
// Throws ParseError carrying the 1-based line number of the offending record.
Mesh parse_off(std::string_view text);
// Writes with 17 significant digits, so parse_off(write_off(m)) == m exactly.
std::string write_off(const Mesh& mesh);

// OBJ subset: `v x y z` and `f a b c` (1-based, `a/t/n` forms accepted, only
// the position index is used). Every other record is ignored.
Mesh parse_obj(std::string_view text);
std::string write_obj(const Mesh& mesh);

// OFF with per-vertex RGBA colors (`COFF` header), components in 0..255.
std::string write_coff(const Mesh& mesh, std::span<const std::array<std::uint8_t, 4>> colors);

// Dispatch on extension (.off / .obj, case-insensitive).
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace meshmark
