#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "xray/core/geometry.hpp"

namespace xray {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Uniform voxel-hash grid over a point set for nearest-neighbor and radius
/// queries. Equal-distance ties resolve to the lowest point index, so results
/// never depend on hash-table iteration order.
class VoxelGrid {
 public:
  VoxelGrid(const PointCloud& cloud, double cell_size);
  VoxelGrid(std::vector<Vec3> points, double cell_size);

  std::size_t size() const { return points_.size(); }
  double cell_size() const { return cell_; }

  /// Nearest point with distance <= max_dist, if any.
  std::optional<Neighbor> nearest_within(const Vec3& q, double max_dist) const;

  /// Exact nearest point. The grid must be nonempty.
  Neighbor nearest(const Vec3& q) const;

  bool any_within(const Vec3& q, double radius) const;

 private:
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key_of(const Vec3& p) const;
  void build();
  /// Visits every cell whose key lies within Chebyshev ring `ring` of `center`.
  template <class Fn>
  void visit_shell(const Key& center, std::int64_t ring, Fn&& fn) const;
  /// Lower bound on the distance from q to any point of cell k.
  double cell_distance(const Key& k, const Vec3& q) const;
  void consider(const std::vector<std::uint32_t>& cell, const Vec3& q, std::optional<Neighbor>& best) const;

  std::vector<Vec3> points_;
  double cell_;
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
  Key min_key_{};
  Key max_key_{};
};

}  // namespace xray
