#include "meshmark/spatial_grid.hpp"

#include "meshmark/errors.hpp"

#include <algorithm>
#include <cmath>

namespace meshmark {

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size) : points_(points), cell_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw Error("grid cell size must be positive");
  std::vector<std::pair<Key, VertexId>> keyed;
  keyed.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    keyed.emplace_back(pack(cell_of(points[i])), static_cast<VertexId>(i));
  }
  std::sort(keyed.begin(), keyed.end());
  sorted_.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) {
      sorted_.push_back(keyed[j].second);
      ++j;
    }
    cells_.emplace(keyed[i].first, std::make_pair(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
    i = j;
  }
}

PointGrid::Cell PointGrid::cell_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

PointGrid::Key PointGrid::pack(const Cell& c) {
  // 21 bits per axis; coordinates wrap, which only merges distant cells into
  // the same bucket (still exact, since candidates are distance-checked).
  constexpr std::uint64_t mask = (1ULL << 21) - 1;
  return (static_cast<std::uint64_t>(c.x) & mask) | ((static_cast<std::uint64_t>(c.y) & mask) << 21) |
         ((static_cast<std::uint64_t>(c.z) & mask) << 42);
}

void PointGrid::query(const Vec3& center, double radius, std::vector<std::pair<VertexId, double>>& out) const {
  out.clear();
  const double r2 = radius * radius;
  const Cell lo = cell_of(center - Vec3::Constant(radius));
  const Cell hi = cell_of(center + Vec3::Constant(radius));
  for (std::int64_t x = lo.x; x <= hi.x; ++x) {
    for (std::int64_t y = lo.y; y <= hi.y; ++y) {
      for (std::int64_t z = lo.z; z <= hi.z; ++z) {
        auto it = cells_.find(pack({x, y, z}));
        if (it == cells_.end()) continue;
        for (std::uint32_t k = it->second.first; k < it->second.second; ++k) {
          const VertexId idx = sorted_[k];
          const double d2 = (points_[idx] - center).squaredNorm();
          if (d2 < r2) out.emplace_back(idx, d2);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  // Wrapped keys can alias one bucket from several cells.
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<VertexId> PointGrid::query(const Vec3& center, double radius) const {
  std::vector<std::pair<VertexId, double>> hits;
  query(center, radius, hits);
  std::vector<VertexId> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.first);
  return out;
}

}  // namespace meshmark
