#include "grasp/kmeans.hpp"

#include "grasp/random.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace grasp {
namespace {

int closest_center(const Vec3& p, const std::vector<Vec3>& centers, double& d2_out) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d2 = (p - centers[c]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  d2_out = best_d2;
  return best;
}

std::vector<Vec3> seed_plus_plus(const std::vector<Vec3>& points, std::size_t k, Rng& rng) {
  std::vector<Vec3> centers;
  std::vector<bool> taken(points.size(), false);
  const auto first = static_cast<std::size_t>(uniform_index(rng, points.size()));
  centers.push_back(points[first]);
  taken[first] = true;
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = (points[i] - centers[0]).squaredNorm();

  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) total += taken[i] ? 0.0 : d2[i];
    std::size_t pick = points.size();
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (taken[i]) continue;
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    }
    if (pick == points.size()) {
      // Remaining points coincide with chosen centers: take the first free one.
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!taken[i]) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = true;
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], (points[i] - points[pick]).squaredNorm());
    }
  }
  return centers;
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<Vec3>& points, std::size_t k, std::uint64_t seed,
                            int max_iterations) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > points.size()) {
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds point count " +
                                std::to_string(points.size()));
  }
  Rng rng(seed);
  KMeansResult result;
  result.centers = seed_plus_plus(points, k, rng);
  result.labels.assign(points.size(), -1);

  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double d2 = 0.0;
      const int c = closest_center(points[i], result.centers, d2);
      objective += d2;
      if (c != result.labels[i]) {
        result.labels[i] = c;
        changed = true;
      }
    }
    result.objective.push_back(objective);
    result.iterations = it + 1;
    if (!changed && it > 0) break;

    std::vector<Vec3> sums(k, Vec3::Zero());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sums[result.labels[i]] += points[i];
      ++counts[result.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      // An emptied cluster keeps its previous center.
      if (counts[c] > 0) result.centers[c] = sums[c] / static_cast<double>(counts[c]);
    }
  }
  return result;
}

std::vector<Vec3> kmeans(const SurfacePointCloud& cloud, std::size_t k, std::uint64_t seed) {
  return kmeans_cluster(cloud.points(), k, seed).centers;
}

}  // namespace grasp
