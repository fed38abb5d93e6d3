#pragma once

#include "grasp/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace grasp {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Static 3-D k-d tree owning a copy of its points.
///
/// Queries return the exact nearest point; equal distances resolve to the
/// lowest point index so results match an exhaustive scan bit for bit.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

  Neighbor nearest(const Vec3& query) const;

  /// k nearest points ordered by (distance, index).
  std::vector<Neighbor> nearest_k(const Vec3& query, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t axis = -1;  // -1 marks a leaf
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, double& best_d2, std::size_t& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Nearest cloud point for every query. Throws on an empty cloud.
std::vector<Neighbor> nearest_neighbors(const SurfacePointCloud& cloud,
                                        std::span<const Vec3> queries);

}  // namespace grasp
