#pragma once

#include "grasp/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace grasp {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  /// Area-weighted centroid of the triangle centroids.
  Vec3 surface_centroid() const;
  double area() const;
  void transform(const RigidTransform& tf);
  /// Concatenates another mesh, re-indexing its faces.
  void append(const TriangleMesh& other);
};

/// Draws n area-weighted uniform surface samples.
///
/// Each sample takes its triangle's plane normal. Winding is assumed
/// consistent across the mesh; the global orientation is chosen by an
/// area-weighted vote of triangle normals against the ray from the surface
/// centroid to each triangle centroid, so inward-wound meshes come out with
/// outward normals. Throws when every triangle is degenerate.
SurfacePointCloud sample_mesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Unoriented normals from a local plane fit over k neighbours, then flipped
/// to point away from the cloud centroid.
std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points, std::size_t k = 15);

/// Drops samples whose height is below z_min (points on a support plane).
SurfacePointCloud clip_below(const SurfacePointCloud& cloud, double z_min);

// Closed primitives with outward (counter-clockwise seen from outside) winding.
TriangleMesh make_box_mesh(const Vec3& half_extents, const Vec3& center = Vec3::Zero());
TriangleMesh make_uv_sphere_mesh(double radius, const Vec3& center, int stacks = 24,
                                 int slices = 48);
TriangleMesh make_cylinder_mesh(double radius, double height, const Vec3& base_center,
                                int slices = 48);
TriangleMesh make_torus_mesh(double major_radius, double minor_radius, const Vec3& center,
                             int major_segments = 48, int minor_segments = 24);
/// Prism from a simple counter-clockwise polygon in the x-z plane, extruded
/// symmetrically along y by depth.
TriangleMesh make_extruded_mesh(const std::vector<Eigen::Vector2d>& polygon_xz, double depth);

}  // namespace grasp
