#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <span>
#include <vector>

namespace grasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Unit-length direction. The alias documents intent; producers normalize.
using UnitVec3 = Eigen::Vector3d;
using RotationMatrix = Eigen::Matrix3d;
/// Rotation vector: axis scaled by angle in radians.
using AxisAngle = Eigen::Vector3d;

/// Cross-product matrix: so3_hat(r) * v == r.cross(v).
Mat3 so3_hat(const Vec3& r);

/// Exponential map from a rotation vector to SO(3) (Rodrigues).
RotationMatrix so3_exp(const AxisAngle& r);

/// Inverse of so3_exp for angles in [0, pi].
AxisAngle so3_log(const RotationMatrix& rotation);

/// True when R^T R = I and det R = 1 within tol.
bool is_rotation(const Mat3& m, double tol = 1e-9);

/// Rotation about a unit axis by angle (radians).
RotationMatrix axis_rotation(const Vec3& axis, double angle);

/// Roll-pitch-yaw (extrinsic x, then y, then z) to a rotation matrix.
RotationMatrix rpy_rotation(double roll, double pitch, double yaw);

class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const RotationMatrix& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) {
    return {Mat3::Identity(), t};
  }

  const RotationMatrix& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
  }

  RigidTransform inverse() const {
    const Mat3 rt = rotation_.transpose();
    return {rt, -(rt * translation_)};
  }

  bool is_approx(const RigidTransform& other, double tol = 1e-9) const;

 private:
  RotationMatrix rotation_;
  Vec3 translation_;
};

/// Surface samples with outward unit normals.
///
/// The center of mass defaults to the arithmetic mean of the points; file
/// loaders may override it. Normals are normalized on construction and a
/// zero-length normal is rejected.
class SurfacePointCloud {
 public:
  SurfacePointCloud() = default;
  SurfacePointCloud(std::vector<Vec3> points, std::vector<Vec3> normals);
  SurfacePointCloud(std::vector<Vec3> points, std::vector<Vec3> normals,
                    const Vec3& center_of_mass);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const Vec3& point(std::size_t i) const { return points_[i]; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  const Vec3& center_of_mass() const { return center_of_mass_; }

  /// Rigidly maps points, normals, and the center of mass.
  SurfacePointCloud transformed(const RigidTransform& tf) const;

  bool operator==(const SurfacePointCloud& other) const;

 private:
  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  Vec3 center_of_mass_ = Vec3::Zero();
};

Vec3 mean_of(std::span<const Vec3> points);

class OrientedBoundingBox {
 public:
  OrientedBoundingBox() = default;
  OrientedBoundingBox(const RigidTransform& frame, const Vec3& half_extents);

  const RigidTransform& frame() const { return frame_; }
  const Vec3& half_extents() const { return half_extents_; }

  Vec3 to_local(const Vec3& p) const;
  /// Inclusion test with every half extent grown by margin.
  bool contains(const Vec3& p, double margin = 0.0) const;

  OrientedBoundingBox transformed(const RigidTransform& tf) const {
    return {tf * frame_, half_extents_};
  }

  bool operator==(const OrientedBoundingBox& other) const;

 private:
  RigidTransform frame_;
  Vec3 half_extents_ = Vec3::Constant(0.5);
};

/// Table plane: z = 0 with upward normal.
inline const Vec3 kGroundNormal{0.0, 0.0, 1.0};

}  // namespace grasp
