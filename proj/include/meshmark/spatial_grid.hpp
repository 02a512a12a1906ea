#pragma once

#include "meshmark/mesh.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace meshmark {

// Uniform hash grid over a point set. Radius queries are exact: the grid only
// narrows the candidate set, every candidate is distance-checked.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell_size);

  // Indices of all points with |p - center| < radius, ascending.
  std::vector<VertexId> query(const Vec3& center, double radius) const;

  // Same, but appends (index, squared distance) pairs into `out` (cleared first).
  void query(const Vec3& center, double radius, std::vector<std::pair<VertexId, double>>& out) const;

  double cell_size() const { return cell_; }

 private:
  using Key = std::uint64_t;
  struct Cell {
    std::int64_t x, y, z;
  };
  Cell cell_of(const Vec3& p) const;
  static Key pack(const Cell& c);

  std::span<const Vec3> points_;
  double cell_;
  // Cell key -> [begin, end) into sorted_.
  std::unordered_map<Key, std::pair<std::uint32_t, std::uint32_t>> cells_;
  std::vector<VertexId> sorted_;
};

}  // namespace meshmark
