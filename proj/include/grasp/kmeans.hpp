#pragma once

#include "grasp/geometry.hpp"

#include <cstdint>
#include <vector>

namespace grasp {

struct KMeansResult {
  std::vector<Vec3> centers;
  std::vector<int> labels;            // cluster of each point
  std::vector<double> objective;      // sum of squared distances, per Lloyd step
  int iterations = 0;
};

/// Lloyd's algorithm from a k-means++ seeding, at most max_iterations
/// assignment/update rounds. Deterministic for a fixed seed.
KMeansResult kmeans_cluster(const std::vector<Vec3>& points, std::size_t k, std::uint64_t seed,
                            int max_iterations = 100);

std::vector<Vec3> kmeans(const SurfacePointCloud& cloud, std::size_t k, std::uint64_t seed);

}  // namespace grasp
