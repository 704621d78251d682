#include "xray/registration/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xray/core/error.hpp"
#include "xray/core/random.hpp"

namespace xray {

namespace {

std::vector<Vec3> positions(const PointCloud& cloud) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(p.position());
  return out;
}

bool better(double d, std::size_t idx, const std::optional<Neighbor>& best) {
  return !best || d < best->distance || (d == best->distance && idx < best->index);
}

}  // namespace

std::size_t VoxelGrid::KeyHash::operator()(const Key& k) const noexcept {
  auto h = mix64(static_cast<std::uint64_t>(k[0]));
  h = mix64(h ^ static_cast<std::uint64_t>(k[1]));
  return static_cast<std::size_t>(mix64(h ^ static_cast<std::uint64_t>(k[2])));
}

VoxelGrid::VoxelGrid(const PointCloud& cloud, double cell_size) : VoxelGrid(positions(cloud), cell_size) {}

VoxelGrid::VoxelGrid(std::vector<Vec3> points, double cell_size) : points_(std::move(points)), cell_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    fail(ErrorCode::InvalidArgument, "voxel cell size must be positive");
  }
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "voxel grid supports at most 2^32-1 points");
  }
  build();
}

VoxelGrid::Key VoxelGrid::key_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

void VoxelGrid::build() {
  min_key_.fill(std::numeric_limits<std::int64_t>::max());
  max_key_.fill(std::numeric_limits<std::int64_t>::min());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Key k = key_of(points_[i]);
    cells_[k].push_back(static_cast<std::uint32_t>(i));
    for (int a = 0; a < 3; ++a) {
      min_key_[a] = std::min(min_key_[a], k[a]);
      max_key_[a] = std::max(max_key_[a], k[a]);
    }
  }
}

template <class Fn>
void VoxelGrid::visit_shell(const Key& c, std::int64_t ring, Fn&& fn) const {
  for (std::int64_t dx = -ring; dx <= ring; ++dx) {
    for (std::int64_t dy = -ring; dy <= ring; ++dy) {
      const bool edge_xy = std::max(std::abs(dx), std::abs(dy)) == ring;
      for (std::int64_t dz = -ring; dz <= ring; ++dz) {
        if (!edge_xy && std::abs(dz) != ring) {
          dz = ring - 1;  // jump to the far face
          continue;
        }
        const Key k{c[0] + dx, c[1] + dy, c[2] + dz};
        if (auto it = cells_.find(k); it != cells_.end()) fn(k, it->second);
      }
    }
  }
}

void VoxelGrid::consider(const std::vector<std::uint32_t>& cell, const Vec3& q, std::optional<Neighbor>& best) const {
  for (auto idx : cell) {
    const double d = (points_[idx] - q).norm();
    if (better(d, idx, best)) best = Neighbor{idx, d};
  }
}

double VoxelGrid::cell_distance(const Key& k, const Vec3& q) const {
  double sq = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double lo = static_cast<double>(k[a]) * cell_;
    const double gap = std::max({lo - q[a], q[a] - (lo + cell_), 0.0});
    sq += gap * gap;
  }
  return std::sqrt(sq);
}

std::optional<Neighbor> VoxelGrid::nearest_within(const Vec3& q, double max_dist) const {
  std::optional<Neighbor> best;
  if (points_.empty()) return best;
  const Key c = key_of(q);
  const auto rings = static_cast<std::int64_t>(std::ceil(max_dist / cell_));
  for (std::int64_t r = 0; r <= rings; ++r) {
    visit_shell(c, r, [&](const Key& k, const auto& cell) {
      // Cells that cannot hold a point at or under the current bound are skipped.
      if (cell_distance(k, q) <= (best ? best->distance : max_dist)) consider(cell, q, best);
    });
  }
  if (best && best->distance > max_dist) best.reset();
  return best;
}

Neighbor VoxelGrid::nearest(const Vec3& q) const {
  if (points_.empty()) fail(ErrorCode::InvalidArgument, "nearest-neighbor query on an empty grid");
  const Key c = key_of(q);
  std::int64_t last_ring = 0;
  for (int a = 0; a < 3; ++a) {
    last_ring = std::max({last_ring, std::abs(c[a] - min_key_[a]), std::abs(c[a] - max_key_[a])});
  }
  std::optional<Neighbor> best;
  for (std::int64_t r = 0; r <= last_ring; ++r) {
    const double shell_cells = std::pow(2.0 * static_cast<double>(r) + 1.0, 3);
    if (shell_cells > 4.0 * static_cast<double>(cells_.size()) + 27.0) {
      // Far query: scanning every point is cheaper than walking empty shells.
      best.reset();
      for (std::size_t i = 0; i < points_.size(); ++i) {
        const double d = (points_[i] - q).norm();
        if (better(d, i, best)) best = Neighbor{i, d};
      }
      return *best;
    }
    visit_shell(c, r, [&](const Key&, const auto& cell) { consider(cell, q, best); });
    // Any point outside rings 0..r is at least r cells away from q.
    if (best && best->distance < static_cast<double>(r) * cell_) return *best;
  }
  return *best;
}

bool VoxelGrid::any_within(const Vec3& q, double radius) const {
  const Key c = key_of(q);
  const auto rings = static_cast<std::int64_t>(std::ceil(radius / cell_));
  bool found = false;
  for (std::int64_t r = 0; r <= rings && !found; ++r) {
    visit_shell(c, r, [&](const Key& k, const auto& cell) {
      if (found || cell_distance(k, q) > radius) return;
      for (auto idx : cell) {
        if ((points_[idx] - q).norm() <= radius) {
          found = true;
          return;
        }
      }
    });
  }
  return found;
}

}  // namespace xray
