#include "grasp/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grasp {
namespace {

constexpr std::uint32_t kLeafSize = 8;

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("kd-tree: too many points");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::int32_t node_id, const Vec3& q, double& best_d2,
                    std::size_t& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  search(near, q, best_d2, best);
  // Visit the far side on equality too so index tie-breaking stays exact.
  if (diff * diff <= best_d2) search(far, q, best_d2, best);
}

Neighbor KdTree::nearest(const Vec3& query) const {
  if (points_.empty()) throw std::invalid_argument("empty point cloud");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  search(0, query, best_d2, best);
  return {best, std::sqrt(best_d2)};
}

std::vector<Neighbor> KdTree::nearest_k(const Vec3& query, std::size_t k) const {
  if (points_.empty()) throw std::invalid_argument("empty point cloud");
  k = std::min(k, points_.size());
  // Max-heap on (d2, index) holding the best k so far.
  std::vector<std::pair<double, std::size_t>> heap;
  heap.reserve(k + 1);
  auto worst = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.front().first;
  };
  auto visit = [&](auto&& self, std::int32_t node_id) -> void {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::pair<double, std::size_t> cand{(points_[order_[i]] - query).squaredNorm(),
                                                  order_[i]};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const double diff = query[node.axis] - node.split;
    self(self, diff <= 0.0 ? node.left : node.right);
    if (diff * diff <= worst()) self(self, diff <= 0.0 ? node.right : node.left);
  };
  visit(visit, 0);
  std::sort_heap(heap.begin(), heap.end());
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
  return out;
}

std::vector<Neighbor> nearest_neighbors(const SurfacePointCloud& cloud,
                                        std::span<const Vec3> queries) {
  if (cloud.empty()) throw std::invalid_argument("empty point cloud");
  const KdTree tree(cloud.points());
  std::vector<Neighbor> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(tree.nearest(q));
  return out;
}

}  // namespace grasp
