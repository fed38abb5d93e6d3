#include "grasp/kmeans.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace grasp;
using namespace grasp::test;

TEST_CASE("two separated blobs are recovered exactly") {
  Rng rng(21);
  const Vec3 a(0.0, 0.0, 0.0), b(1.0, 1.0, 1.0);
  std::vector<Vec3> points;
  Vec3 sum_a = Vec3::Zero(), sum_b = Vec3::Zero();
  for (int i = 0; i < 200; ++i) {
    const Vec3 pa = a + random_vec(rng, 0.05), pb = b + random_vec(rng, 0.05);
    points.push_back(pa);
    points.push_back(pb);
    sum_a += pa;
    sum_b += pb;
  }
  const Vec3 mean_a = sum_a / 200.0, mean_b = sum_b / 200.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const KMeansResult r = kmeans_cluster(points, 2, seed);
    const bool a_first = (r.centers[0] - a).norm() < (r.centers[1] - a).norm();
    CHECK((r.centers[a_first ? 0 : 1] - mean_a).norm() < 1e-6);
    CHECK((r.centers[a_first ? 1 : 0] - mean_b).norm() < 1e-6);
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(r.labels[i] == ((i % 2 == 0) == a_first ? 0 : 1));
    }
  }
}

TEST_CASE("k equal to the point count returns the points; k = 1 returns the centroid") {
  Rng rng(22);
  std::vector<Vec3> points;
  for (int i = 0; i < 12; ++i) points.push_back(random_vec(rng));
  std::vector<Vec3> centers = kmeans_cluster(points, points.size(), 3).centers;
  auto less = [](const Vec3& u, const Vec3& v) {
    return std::lexicographical_compare(u.data(), u.data() + 3, v.data(), v.data() + 3);
  };
  std::vector<Vec3> sorted_points = points;
  std::sort(centers.begin(), centers.end(), less);
  std::sort(sorted_points.begin(), sorted_points.end(), less);
  CHECK(centers == sorted_points);

  const KMeansResult one = kmeans_cluster(points, 1, 3);
  CHECK((one.centers[0] - mean_of(points)).norm() < 1e-15);
}

TEST_CASE("Lloyd objective is non-increasing and runs are deterministic") {
  Rng rng(23);
  std::vector<Vec3> points;
  for (int i = 0; i < 2000; ++i) points.push_back(random_vec(rng));
  const KMeansResult r = kmeans_cluster(points, 10, 99);
  REQUIRE(r.objective.size() >= 2);
  for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1]);
  CHECK(r.iterations <= 100);
  const KMeansResult again = kmeans_cluster(points, 10, 99);
  CHECK(again.centers == r.centers);
  CHECK(again.labels == r.labels);
  const SurfacePointCloud cloud(points, std::vector<Vec3>(points.size(), Vec3::UnitZ()));
  CHECK(kmeans(cloud, 10, 99) == r.centers);
}

TEST_CASE("duplicate points and invalid k") {
  const std::vector<Vec3> same(5, Vec3(1, 2, 3));
  const KMeansResult r = kmeans_cluster(same, 3, 0);
  for (const auto& c : r.centers) CHECK(c == Vec3(1, 2, 3));
  CHECK_THROWS_AS(kmeans_cluster(same, 6, 0), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_cluster(same, 0, 0), std::invalid_argument);
}
